"""Two-cluster competition: labels, interface, tracked process, angle laws.

Everything here consumes an immutable passage grid rooted at (1,1).  The
interface chooses the locally shorter step; its hitting times subtract the
origin weight, which makes the whole trace invariant to w(1,1).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _kernels
from .errors import OutOfHorizon, TieDetected, Truncated
from .lpp import PassageGrid


class Label(IntEnum):
    NEUTRAL = 0
    FROM_21 = 1
    FROM_12 = 2


@dataclass
class LabelGrid:
    """Per-site competition labels matching a passage grid's extent."""

    rows: int
    cols: int
    labels: np.ndarray  # int8, shape (rows+1, cols+1); [i, j] = site (i, j)

    def label_at(self, z) -> Label:
        i, j = int(z[0]), int(z[1])
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise ValueError(f"site {(i, j)} outside label grid")
        return Label(int(self.labels[i, j]))

    def counts(self) -> dict:
        flat = self.labels[1:, 1:].ravel()
        return {lab.name: int(np.count_nonzero(flat == lab)) for lab in Label}


@dataclass
class InterfaceTrace:
    """The competition interface and its hitting times.

    sites[k] is the k-th interface point (sites[0] = (1,1)); taus[k] is its
    passage time with the origin weight removed, so taus[0] = 0 and taus is
    strictly increasing.
    """

    sites: np.ndarray   # (n+1, 2) int64
    taus: np.ndarray    # (n+1,) float64
    origin_weight: float

    def __len__(self) -> int:
        return self.sites.shape[0]

    @property
    def n_steps(self) -> int:
        return self.sites.shape[0] - 1

    def to_jsonl(self, path) -> None:
        """One record per step: {n, i, j, tau}."""
        with open(path, "w") as fh:
            for k in range(self.sites.shape[0]):
                fh.write(json.dumps({"n": k,
                                     "i": int(self.sites[k, 0]),
                                     "j": int(self.sites[k, 1]),
                                     "tau": float(self.taus[k])}) + "\n")


def label_clusters(grid: PassageGrid) -> LabelGrid:
    """Propagate cluster membership along the recurrence parents.

    A site is infected through (2,1) exactly when its unique maximizing
    path from (1,1) passes (2,1); with parent tags this is one sweep.
    """
    if grid.origin != (1, 1):
        raise ValueError("competition labels are defined for grids rooted at (1,1)")
    if grid.rows < 2 or grid.cols < 2:
        raise ValueError("need at least a 2x2 grid")
    labels = _kernels.label_fill(grid.parent)
    return LabelGrid(rows=grid.rows, cols=grid.cols, labels=labels)


def competition_interface(grid: PassageGrid, n_steps: int) -> InterfaceTrace:
    """Walk the interface for n_steps locally-shorter steps.

    Needs the grid to contain every candidate site the walk may compare,
    i.e. extents of at least n_steps + 1 in each direction; raises
    Truncated otherwise and TieDetected on a bit-equal comparison.
    """
    if grid.origin != (1, 1):
        raise ValueError("the competition interface starts at (1,1)")
    if n_steps < 1:
        raise ValueError("n_steps must be positive")
    if grid.rows < n_steps + 1 or grid.cols < n_steps + 1:
        raise Truncated(f"grid {grid.rows}x{grid.cols} cannot hold "
                        f"{n_steps} interface steps")
    values = grid.values
    sites = np.empty((n_steps + 1, 2), dtype=np.int64)
    taus = np.empty(n_steps + 1, dtype=np.float64)
    sites[0] = (1, 1)
    taus[0] = 0.0
    w11 = values[1, 1]
    i = j = 1
    for k in range(1, n_steps + 1):
        gr = values[i + 1, j]
        gu = values[i, j + 1]
        if gr == gu:
            raise TieDetected((i + 1, j), "interface argmin candidates bit-equal")
        if gr < gu:
            i += 1
        else:
            j += 1
        sites[k] = (i, j)
        taus[k] = values[i, j] - w11
    return InterfaceTrace(sites=sites, taus=taus, origin_weight=float(w11))


def interface_trace_hashed(seed_field_dseed, n_steps: int) -> InterfaceTrace:
    """Fast path: fused hashing + triangle recurrence + walk.

    Bit-identical to build_grid + competition_interface on the same field;
    used by the replicated experiments where the grid itself is never
    needed again.
    """
    phi, taus, tie_i, tie_j = _kernels.interface_walk_hashed(
        seed_field_dseed, n_steps)
    if tie_i > 0:
        raise TieDetected((tie_i, tie_j))
    w11 = float(_kernels.exp1_at(seed_field_dseed, 1, 1))
    return InterfaceTrace(sites=phi, taus=taus, origin_weight=w11)


def psi_at(trace: InterfaceTrace, t: float) -> tuple[int, int]:
    """Right-continuous step interpolation of the interface along taus."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t >= trace.taus[-1]:
        raise OutOfHorizon(f"t={t} is past the last recorded hitting time "
                           f"{trace.taus[-1]}")
    k = int(np.searchsorted(trace.taus, t, side="right")) - 1
    return int(trace.sites[k, 0]), int(trace.sites[k, 1])


def angle_estimate(trace: InterfaceTrace, n: int) -> float:
    """Direction (radians in [0, pi/2]) of the n-th interface point."""
    if not 0 < n <= trace.n_steps:
        raise ValueError(f"n={n} outside the recorded trace")
    i, j = trace.sites[n]
    return math.atan2(j, i)


def theta_cdf(alpha: float) -> float:
    """Law of the asymptotic interface angle:
    sqrt(sin a) / (sqrt(sin a) + sqrt(cos a)) on [0, pi/2]."""
    if not 0 <= alpha <= math.pi / 2:
        raise ValueError("alpha must lie in [0, pi/2]")
    s = math.sqrt(math.sin(alpha))
    c = math.sqrt(math.cos(alpha))
    return s / (s + c)


def f_of_theta(theta: float) -> float:
    """The strictly decreasing map sending the angle law to Uniform[-1,1]:
    (sqrt(cos t) - sqrt(sin t)) / (sqrt(cos t) + sqrt(sin t))."""
    if not 0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    s = math.sqrt(math.sin(theta))
    c = math.sqrt(math.cos(theta))
    return (c - s) / (c + s)


def speed_point(theta: float) -> tuple[float, float]:
    """Asymptotic velocity of the tracked interface point:
    (cos t, sin t) / mu(cos t, sin t)."""
    if not 0 <= theta <= math.pi / 2:
        raise ValueError("theta must lie in [0, pi/2]")
    u = math.cos(theta)
    v = math.sin(theta)
    mu = (math.sqrt(u) + math.sqrt(v)) ** 2
    return u / mu, v / mu
