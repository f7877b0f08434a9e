"""Totally asymmetric exclusion on a finite window, coupled to the growth
picture.

Three constructions live here:

* the Harris construction (per-site Poisson clocks) for the step profile
  with one second-class discrepancy, and for the pair profile with labeled
  particles and holes;
* the passage-time-driven construction that replays interchanges in the
  order of the grid clocks;
* the splice map that rewrites the Poisson clocks around the second-class
  trajectory and extracts a fresh weight rectangle from the replayed
  interchange times.  Verified pathwise: the discrepancy position and the
  difference of the pair labels must agree exactly, event by event.

Windows are finite with breach detection: any tracked label, the pair, the
discrepancy, or an edge convention firing raises WindowBreach rather than
silently diverging from the infinite-lattice dynamics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .competition import InterfaceTrace
from .errors import (ClockCollision, CouplingViolation, IncompleteRectangle,
                     SimulationError, TieDetected, Truncated, WindowBreach)
from .lpp import PassageGrid, build_grid_from_array
from .weights import (DOMAIN_AUX_CLOCK, DOMAIN_CLOCKS, DOMAIN_CONFIG,
                      DOMAIN_CORNER, domain_seed, exp1_rectangle, hash_u01)


# ---------------------------------------------------------------------------
# Poisson clocks


@dataclass
class ClockSet:
    """Per-site rate-1 event clocks on [0, horizon], plus one auxiliary
    stream, all derived from (seed, window, horizon) by the counter hash.

    Immutable after construction.  merged times are globally sorted; two
    bit-equal epoch times anywhere raise ClockCollision at construction.
    """

    seed: int
    window: tuple[int, int]
    horizon: float
    times: np.ndarray = field(init=False, repr=False)        # sorted epochs
    site_index: np.ndarray = field(init=False, repr=False)   # window index per epoch
    aux_times: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        left, right = self.window
        if right <= left:
            raise ValueError("window must be a nonempty interval")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        nsites = right - left + 1
        dseed = domain_seed(self.seed, DOMAIN_CLOCKS)
        per_site = _epoch_matrix(dseed, left, nsites, self.horizon)
        counts = np.array([len(e) for e in per_site])
        times = np.concatenate(per_site) if counts.sum() else np.empty(0)
        idx = np.repeat(np.arange(nsites, dtype=np.int32), counts)
        order = np.argsort(times, kind="stable")
        self.times = times[order]
        self.site_index = idx[order]
        aux_seed = domain_seed(self.seed, DOMAIN_AUX_CLOCK)
        self.aux_times = _epoch_matrix(aux_seed, 0, 1, self.horizon)[0]
        if self.times.size > 1 and (np.diff(self.times) == 0).any():
            raise ClockCollision(f"bit-equal epoch times (seed={self.seed})")
        if self.aux_times.size and self.times.size:
            pos = np.searchsorted(self.times, self.aux_times)
            hit = np.zeros(self.aux_times.size, dtype=bool)
            inb = pos < self.times.size
            hit[inb] = self.times[pos[inb]] == self.aux_times[inb]
            if hit.any():
                raise ClockCollision(
                    f"auxiliary epoch collides with a site epoch "
                    f"(seed={self.seed})")

    @property
    def left(self) -> int:
        return self.window[0]

    @property
    def right(self) -> int:
        return self.window[1]

    @property
    def n_sites(self) -> int:
        return self.right - self.left + 1

    def site_stream(self, x: int) -> np.ndarray:
        """Epoch times of the clock at absolute site x."""
        if not self.left <= x <= self.right:
            raise ValueError(f"site {x} outside window {self.window}")
        return self.times[self.site_index == x - self.left]


def _epoch_matrix(dseed, first_counter, nstreams, horizon) -> list[np.ndarray]:
    """Epochs on [0, horizon] for nstreams independent rate-1 clocks."""
    base = int(horizon + 6.0 * math.sqrt(horizon + 1.0) + 16)
    cum = np.cumsum(exp1_rectangle(dseed, first_counter, 0, nstreams, base),
                    axis=1)
    out = []
    for r in range(nstreams):
        row = cum[r]
        col = base
        while row[-1] <= horizon:  # rare tail: extend the stream
            extra = exp1_rectangle(dseed, first_counter + r, col, 1, 64)[0]
            row = np.concatenate([row, row[-1] + np.cumsum(extra)])
            col += 64
        k = int(np.searchsorted(row, horizon, side="right"))
        out.append(row[:k])
    return out


# ---------------------------------------------------------------------------
# States and initial configurations


@dataclass
class ExclusionState:
    """Occupation window with optional labels and marked objects.

    kind "step": full left of the origin, one discrepancy marked at x.
    kind "pair-step": the two-site pair encoding; particle labels decrease
    rightward from the pair, hole labels increase, pair = (hole, particle)
    with particle = hole + 1.
    kind "product": Bernoulli profile, no marks.
    """

    kind: str
    window: tuple[int, int]
    occupation: np.ndarray
    x: int | None = None
    pair: tuple[int, int] | None = None
    particle_labels: np.ndarray | None = None   # per-site label, 0 = none
    hole_labels: np.ndarray | None = None
    time: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def left(self) -> int:
        return self.window[0]

    @property
    def right(self) -> int:
        return self.window[1]

    def occupied(self, site: int) -> bool:
        return bool(self.occupation[site - self.left])

    def copy(self) -> "ExclusionState":
        return ExclusionState(
            kind=self.kind, window=self.window,
            occupation=self.occupation.copy(), x=self.x, pair=self.pair,
            particle_labels=None if self.particle_labels is None
            else self.particle_labels.copy(),
            hole_labels=None if self.hole_labels is None
            else self.hole_labels.copy(),
            time=self.time, params=dict(self.params))


def initial_config(kind: str, window: tuple[int, int], lam: float = 1.0,
                   rho: float = 0.0, seed: int = 0) -> ExclusionState:
    """Build the initial occupation for the given profile kind.

    step: occupied iff x <= 0, discrepancy marked at the origin.
    pair-step: step shifted one site right of the origin with the hole/
    particle pair at (0, 1) and labels counted outward from it.
    product: Bernoulli(lam) for x <= 0 and Bernoulli(rho) for x >= 1,
    drawn from the per-site counter hash of `seed`.
    """
    left, right = int(window[0]), int(window[1])
    if left > -4 or right < 4:
        raise ValueError("window too small: needs margin around the origin")
    sites = np.arange(left, right + 1)
    if kind == "step":
        occ = (sites <= 0).astype(np.int8)
        return ExclusionState(kind=kind, window=(left, right), occupation=occ,
                              x=0)
    if kind == "pair-step":
        occ = np.zeros(sites.size, dtype=np.int8)
        occ[sites <= -1] = 1
        occ[sites == 1] = 1
        plab = np.zeros(sites.size, dtype=np.int64)
        hlab = np.zeros(sites.size, dtype=np.int64)
        plab[sites == 1] = 1
        neg = sites <= -1
        plab[neg] = 1 - sites[neg]          # particle at -i+1 has label i
        hlab[sites == 0] = 1
        pos = sites >= 2
        hlab[pos] = sites[pos]              # hole at i has label i
        return ExclusionState(kind=kind, window=(left, right), occupation=occ,
                              pair=(0, 1), particle_labels=plab,
                              hole_labels=hlab)
    if kind == "product":
        if not (0 <= lam <= 1 and 0 <= rho <= 1):
            raise ValueError("densities must lie in [0, 1]")
        dseed = domain_seed(seed, DOMAIN_CONFIG)
        u = hash_u01(dseed, sites, 0)
        dens = np.where(sites <= 0, lam, rho)
        occ = (u < dens).astype(np.int8)
        return ExclusionState(kind=kind, window=(left, right), occupation=occ,
                              params={"lam": lam, "rho": rho, "seed": seed})
    raise ValueError(f"unknown configuration kind {kind!r}")


# ---------------------------------------------------------------------------
# Harris simulation


@dataclass
class Snapshot:
    time: float
    occupation: np.ndarray
    x: int | None = None
    pair: tuple[int, int] | None = None
    pair_labels: tuple[int, int] | None = None


@dataclass
class HarrisResult:
    """Trajectory summary of one Harris run."""

    kind: str
    window: tuple[int, int]
    horizon: float
    final: ExclusionState
    x_jump_times: np.ndarray | None = None
    x_jump_sites: np.ndarray | None = None
    pair_jump_times: np.ndarray | None = None
    pair_jump_labels: np.ndarray | None = None   # (m, 2) int64: (I, J)
    interchange_times: np.ndarray | None = None  # g' table indexed [i, j]
    snapshots: list[Snapshot] = field(default_factory=list)
    events: list[dict] | None = None

    def x_at(self, t: float) -> int:
        """Right-continuous discrepancy position at time t."""
        if self.x_jump_times is None:
            raise ValueError("no discrepancy tracked in this run")
        k = int(np.searchsorted(self.x_jump_times, t, side="right"))
        return 0 if k == 0 else int(self.x_jump_sites[k - 1])

    def pair_labels_at(self, t: float) -> tuple[int, int]:
        if self.pair_jump_times is None:
            raise ValueError("no pair tracked in this run")
        k = int(np.searchsorted(self.pair_jump_times, t, side="right"))
        if k == 0:
            return (1, 1)
        return (int(self.pair_jump_labels[k - 1, 0]),
                int(self.pair_jump_labels[k - 1, 1]))

    def to_jsonl(self, path) -> None:
        """One record per state-changing event:
        {t, kind, x, label_i, label_j, X}."""
        if self.events is None:
            raise ValueError("run was not recorded with record_events=True")
        with open(path, "w") as fh:
            for ev in self.events:
                fh.write(json.dumps(ev) + "\n")


def harris_simulate(state: ExclusionState, clocks: ClockSet, T: float,
                    snapshot_times=(), record_events: bool = False,
                    _event_stream=None) -> HarrisResult:
    """Run the Harris dynamics to horizon T.

    Processes the merged epoch stream in global time order; a jump happens
    when the epoch's site holds a particle and its right neighbour is
    empty.  The step profile additionally tracks the marked discrepancy
    (right over an empty neighbour, left past an occupied one) and the
    pair profile tracks labels and the marked pair.  Raises WindowBreach
    if any tracked object or an edge convention would be clipped.
    """
    if T > clocks.horizon:
        raise ValueError("T exceeds the clock horizon")
    if state.window != clocks.window and _event_stream is None:
        raise ValueError("state and clocks disagree on the window")
    if _event_stream is None:
        times, sidx = clocks.times, clocks.site_index
    else:
        times, sidx = _event_stream
    cut = int(np.searchsorted(times, T, side="right"))
    times, sidx = times[:cut], sidx[:cut]
    snap = np.asarray(sorted(snapshot_times), dtype=np.float64)

    if state.kind == "step":
        if record_events:
            return _step_python(state, times, sidx, T, snap)
        occ = state.occupation.copy()
        jt, jx, breach, snaps, snap_x = _kernels.harris_second_class(
            occ, sidx.astype(np.int64), times, state.x - state.left,
            occ.shape[0] - 1, snap)
        if breach:
            raise WindowBreach(f"step run breached the window (code {breach})")
        final = ExclusionState(kind="step", window=state.window,
                               occupation=occ,
                               x=int(jx[-1] + state.left) if jx.size else state.x,
                               time=T)
        snapshots = [Snapshot(time=float(t), occupation=snaps[k].copy(),
                              x=int(snap_x[k] + state.left))
                     for k, t in enumerate(snap)]
        return HarrisResult(kind="step", window=state.window, horizon=T,
                            final=final, x_jump_times=jt.copy(),
                            x_jump_sites=jx + state.left,
                            snapshots=snapshots)
    if state.kind == "pair-step":
        return _labeled_replay(state, times, sidx, T, snap, record_events)
    if state.kind == "product":
        return _plain_python(state, times, sidx, T, snap, record_events)
    raise ValueError(f"unknown state kind {state.kind!r}")


def _step_python(state, times, sidx, T, snap_times) -> HarrisResult:
    """Reference implementation of the step+discrepancy dynamics; the
    compiled kernel is held to bit-equality against this."""
    occ = state.occupation.copy()
    last = occ.shape[0] - 1
    x = state.x - state.left
    jt, jx, events = [], [], []
    snaps = []
    si = 0
    for k in range(times.shape[0]):
        t = float(times[k])
        s = int(sidx[k])
        while si < snap_times.size and snap_times[si] < t:
            snaps.append(Snapshot(time=float(snap_times[si]),
                                  occupation=occ.copy(), x=x + state.left))
            si += 1
        if s == x:
            if s + 1 > last:
                raise WindowBreach("discrepancy at the right edge")
            if occ[s + 1] == 0:
                occ[s] = 0
                occ[s + 1] = 1
                x = s + 1
                jt.append(t)
                jx.append(x + state.left)
                events.append({"t": t, "kind": "jump", "x": s + state.left,
                               "X": x + state.left})
        elif occ[s] == 1:
            if s + 1 == x:
                x = s
                jt.append(t)
                jx.append(x + state.left)
                events.append({"t": t, "kind": "swap", "x": s + state.left,
                               "X": x + state.left})
            elif s + 1 > last:
                raise WindowBreach("particle jump past the right edge")
            elif occ[s + 1] == 0:
                occ[s] = 0
                occ[s + 1] = 1
                events.append({"t": t, "kind": "jump", "x": s + state.left,
                               "X": x + state.left})
                if s == 0:
                    raise WindowBreach("left edge vacated")
        if x <= 1 or x >= last - 1:
            raise WindowBreach("discrepancy too close to the window edge")
    while si < snap_times.size:
        snaps.append(Snapshot(time=float(snap_times[si]),
                              occupation=occ.copy(), x=x + state.left))
        si += 1
    final = ExclusionState(kind="step", window=state.window, occupation=occ,
                           x=x + state.left, time=T)
    return HarrisResult(kind="step", window=state.window, horizon=T,
                        final=final,
                        x_jump_times=np.array(jt), x_jump_sites=np.array(jx, dtype=np.int64),
                        snapshots=snaps, events=events)


def _labeled_replay(state, times, sidx, T, snap_times,
                    record_events) -> HarrisResult:
    """Pair-profile dynamics with full label tracking.

    Records every interchange time by (hole label, particle label); those
    are the replayed passage times the coupling map differences into
    weights.
    """
    occ = state.occupation.copy()
    plab = state.particle_labels.copy()
    hlab = state.hole_labels.copy()
    last = occ.shape[0] - 1
    left = state.left
    hstar = state.pair[0] - left          # window index of the pair hole
    big_i, big_j = 1, 1
    maxlab = last + 2
    gp = np.full((maxlab + 1, maxlab + 1), np.nan)
    pj_t, pj_ij = [], []
    events = [] if record_events else None
    snaps = []
    si = 0
    for k in range(times.shape[0]):
        t = float(times[k])
        s = int(sidx[k])
        while si < snap_times.size and snap_times[si] < t:
            snaps.append(Snapshot(time=float(snap_times[si]),
                                  occupation=occ.copy(),
                                  pair=(hstar + left, hstar + left + 1),
                                  pair_labels=(big_i, big_j)))
            si += 1
        jlab = plab[s]
        if jlab == 0:
            continue
        if s + 1 > last:
            raise WindowBreach("particle jump past the right edge")
        ilab = hlab[s + 1]
        if ilab == 0:
            continue
        plab[s + 1] = jlab
        plab[s] = 0
        hlab[s] = ilab
        hlab[s + 1] = 0
        occ[s] = 0
        occ[s + 1] = 1
        if s == 0:
            raise WindowBreach("left edge vacated")
        if ilab <= maxlab and jlab <= maxlab:
            gp[ilab, jlab] = t
        if s + 1 == hstar:
            # a particle entered the pair hole: the pair steps left
            hstar -= 1
            big_j += 1
            pj_t.append(t)
            pj_ij.append((big_i, big_j))
        elif s == hstar + 1:
            # the pair particle hopped right over the next hole
            hstar += 1
            big_i += 1
            pj_t.append(t)
            pj_ij.append((big_i, big_j))
        if record_events:
            events.append({"t": t, "kind": "swap", "x": s + left,
                           "label_i": int(ilab), "label_j": int(jlab),
                           "X": big_i - big_j})
        if hstar <= 1 or hstar >= last - 2:
            raise WindowBreach("pair too close to the window edge")
    while si < snap_times.size:
        snaps.append(Snapshot(time=float(snap_times[si]),
                              occupation=occ.copy(),
                              pair=(hstar + left, hstar + left + 1),
                              pair_labels=(big_i, big_j)))
        si += 1
    final = ExclusionState(kind="pair-step", window=state.window,
                           occupation=occ, pair=(hstar + left, hstar + left + 1),
                           particle_labels=plab, hole_labels=hlab, time=T)
    return HarrisResult(kind="pair-step", window=state.window, horizon=T,
                        final=final,
                        pair_jump_times=np.array(pj_t),
                        pair_jump_labels=np.array(pj_ij, dtype=np.int64).reshape(-1, 2),
                        interchange_times=gp, snapshots=snaps, events=events)


def _plain_python(state, times, sidx, T, snap_times,
                  record_events) -> HarrisResult:
    """Unlabeled exclusion dynamics for product profiles."""
    occ = state.occupation.copy()
    last = occ.shape[0] - 1
    events = [] if record_events else None
    snaps = []
    si = 0
    for k in range(times.shape[0]):
        t = float(times[k])
        s = int(sidx[k])
        while si < snap_times.size and snap_times[si] < t:
            snaps.append(Snapshot(time=float(snap_times[si]),
                                  occupation=occ.copy()))
            si += 1
        if occ[s] == 1:
            if s + 1 > last:
                raise WindowBreach("particle jump past the right edge")
            if occ[s + 1] == 0:
                occ[s] = 0
                occ[s + 1] = 1
                if s == 0:
                    raise WindowBreach("left edge vacated")
                if record_events:
                    events.append({"t": t, "kind": "jump", "x": s + state.left})
    while si < snap_times.size:
        snaps.append(Snapshot(time=float(snap_times[si]),
                              occupation=occ.copy()))
        si += 1
    final = ExclusionState(kind="product", window=state.window,
                           occupation=occ, time=T, params=dict(state.params))
    return HarrisResult(kind="product", window=state.window, horizon=T,
                        final=final, snapshots=snaps, events=events)


# ---------------------------------------------------------------------------
# Passage-time-driven construction


@dataclass
class DrivenTrajectory:
    """Label trajectory of the grid-clock construction.

    events rows are (time, hole label, particle label); positions are the
    piecewise-constant label positions right-continuous in time.  The pair
    label path doubles as a competition-interface trace.
    """

    rows: int
    cols: int
    horizon: float
    event_times: np.ndarray
    event_holes: np.ndarray
    event_particles: np.ndarray
    pair_trace: InterfaceTrace
    final_particle_pos: np.ndarray
    final_hole_pos: np.ndarray

    def positions_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(particle positions, hole positions) indexed by label at time t."""
        ppos = _initial_particle_positions(self.cols)
        hpos = _initial_hole_positions(self.rows)
        upto = int(np.searchsorted(self.event_times, t, side="right"))
        for k in range(upto):
            i = self.event_holes[k]
            j = self.event_particles[k]
            ppos[j], hpos[i] = hpos[i], ppos[j]
        return ppos, hpos

    def occupation_at(self, t: float) -> tuple[np.ndarray, int, int]:
        """Occupation over the fully determined span [-cols+1, rows].

        Returns (occupation, span_left, span_right)."""
        ppos, hpos = self.positions_at(t)
        span_left = -self.cols + 1
        span_right = self.rows
        occ = np.zeros(span_right - span_left + 1, dtype=np.int8)
        for j in range(1, self.cols + 1):
            p = ppos[j]
            if span_left <= p <= span_right:
                occ[p - span_left] = 1
        return occ, span_left, span_right


def _initial_particle_positions(n: int) -> np.ndarray:
    pos = np.zeros(n + 1, dtype=np.int64)
    pos[1] = 1
    for j in range(2, n + 1):
        pos[j] = -j + 1
    return pos


def _initial_hole_positions(n: int) -> np.ndarray:
    pos = np.zeros(n + 1, dtype=np.int64)
    pos[1] = 0
    for i in range(2, n + 1):
        pos[i] = i
    return pos


def lpp_driven_simulate(grid: PassageGrid, T: float) -> DrivenTrajectory:
    """Replay interchanges in the order of the origin-removed grid clocks.

    At the clock of site (i, j) the j-th particle and the i-th hole swap
    positions; the pair labels advance exactly when the swap touches the
    pair, tracing the competition interface.  Raises Truncated unless every
    far-edge clock exceeds T (otherwise off-grid interchanges would be
    missing from the replay) and TieDetected on equal clocks.
    """
    if grid.origin != (1, 1):
        raise ValueError("the driven construction is rooted at (1,1)")
    g01 = grid.g01()
    far_edge_min = min(g01[-1, :].min(), g01[:, -1].min())
    if far_edge_min <= T:
        raise Truncated(f"far-edge clock {far_edge_min:.6g} <= T={T}; "
                        f"grid too small for this horizon")
    flat = g01.ravel()
    live = np.nonzero(flat <= T)[0]
    live = live[live != 0]          # (1,1) is the start, never an interchange
    order = live[np.argsort(flat[live])]
    tvals = flat[order]
    if tvals.size > 1 and (np.diff(tvals) == 0).any():
        k = int(np.nonzero(np.diff(tvals) == 0)[0][0])
        a, b = np.unravel_index(order[k], g01.shape)
        raise TieDetected((int(a) + 1, int(b) + 1), "equal interchange clocks")
    holes = (order // g01.shape[1] + 1).astype(np.int64)      # i = row + 1
    parts = (order % g01.shape[1] + 1).astype(np.int64)       # j = col + 1
    ppos = _initial_particle_positions(grid.cols)
    hpos = _initial_hole_positions(grid.rows)
    big_i, big_j = 1, 1
    phi = [(1, 1)]
    taus = [0.0]
    for k in range(order.size):
        i = int(holes[k])
        j = int(parts[k])
        if hpos[i] != ppos[j] + 1:
            raise SimulationError(
                f"interchange ({i},{j}) fired while not adjacent: "
                f"hole at {hpos[i]}, particle at {ppos[j]}")
        ppos[j], hpos[i] = hpos[i], ppos[j]
        if (i, j) == (big_i + 1, big_j):
            big_i += 1
            phi.append((big_i, big_j))
            taus.append(float(tvals[k]))
        elif (i, j) == (big_i, big_j + 1):
            big_j += 1
            phi.append((big_i, big_j))
            taus.append(float(tvals[k]))
    trace = InterfaceTrace(sites=np.array(phi, dtype=np.int64),
                           taus=np.array(taus),
                           origin_weight=grid.origin_weight)
    return DrivenTrajectory(rows=grid.rows, cols=grid.cols, horizon=T,
                            event_times=tvals,
                            event_holes=holes, event_particles=parts,
                            pair_trace=trace,
                            final_particle_pos=ppos, final_hole_pos=hpos)


# ---------------------------------------------------------------------------
# The clock splice and the coupling map


def splice_clocks(clocks: ClockSet, x_jump_times: np.ndarray,
                  x_jump_sites: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rewrite the clocks around the discrepancy trajectory.

    On each inter-jump interval, sites left of the discrepancy keep their
    stream, the discrepancy site takes the auxiliary stream, and sites to
    the right take their left neighbour's stream.  Returns the merged
    (times, window indices) of the rewritten clocks on the same window.
    """
    left, right = clocks.window
    taus = np.asarray(x_jump_times, dtype=np.float64)
    xpos = np.concatenate([[0], np.asarray(x_jump_sites, dtype=np.int64)])
    iv = np.searchsorted(taus, clocks.times, side="left")
    x_at = xpos[iv]
    site_abs = clocks.site_index.astype(np.int64) + left
    new_site = np.where(site_abs < x_at, site_abs, site_abs + 1)
    keep = new_site <= right
    iv_aux = np.searchsorted(taus, clocks.aux_times, side="left")
    aux_site = xpos[iv_aux]
    times = np.concatenate([clocks.times[keep], clocks.aux_times])
    sites = np.concatenate([new_site[keep], aux_site])
    order = np.argsort(times, kind="stable")
    times = times[order]
    sites = sites[order]
    if times.size > 1 and (np.diff(times) == 0).any():
        raise ClockCollision("bit-equal epochs after the splice")
    return times, (sites - left).astype(np.int32)


def _spliced_pair_run(clocks: ClockSet, T: float, snapshot_times=()):
    """Shared plumbing: step run under the clocks, splice, replayed pair
    run under the rewritten clocks."""
    step0 = initial_config("step", clocks.window)
    step_run = harris_simulate(step0, clocks, T, snapshot_times=snapshot_times)
    times2, sidx2 = splice_clocks(clocks, step_run.x_jump_times,
                                  step_run.x_jump_sites)
    pair0 = initial_config("pair-step", clocks.window)
    pair_run = harris_simulate(pair0, clocks, T,
                               snapshot_times=snapshot_times,
                               _event_stream=(times2, sidx2))
    return step_run, pair_run


def coupling_map(clocks: ClockSet, T: float, rect: tuple[int, int],
                 _pair_run: HarrisResult | None = None) -> np.ndarray:
    """Extract a weight rectangle from the replayed interchange times.

    w'(i, j) = G'(i, j) - max(G'(i-1, j), G'(i, j-1)) over the requested
    rectangle, with G'(1, 1) = 0 and a fresh independent corner draw for
    w'(1, 1).  Raises IncompleteRectangle when some requested site has not
    interchanged by T.
    """
    if _pair_run is None:
        _, _pair_run = _spliced_pair_run(clocks, T)
    return _weights_from_interchanges(_pair_run.interchange_times, rect,
                                      clocks.seed)


def _weights_from_interchanges(gp: np.ndarray, rect: tuple[int, int],
                               seed: int) -> np.ndarray:
    a, b = int(rect[0]), int(rect[1])
    if a < 1 or b < 1:
        raise ValueError("rectangle extents must be positive")
    if a >= gp.shape[0] or b >= gp.shape[1]:
        raise IncompleteRectangle("rectangle exceeds the recorded label range")
    sub = gp[1:a + 1, 1:b + 1].copy()
    sub[0, 0] = 0.0                      # G'(1,1) := 0 by definition
    if np.isnan(sub).any():
        missing = np.argwhere(np.isnan(sub)) + 1
        raise IncompleteRectangle(
            f"{missing.shape[0]} sites not interchanged by the horizon; "
            f"first missing {tuple(missing[0])}")
    padded = np.zeros((a + 1, b + 1))
    padded[1:, 1:] = sub
    w = padded[1:, 1:] - np.maximum(padded[:-1, 1:], padded[1:, :-1])
    w[0, 0] = float(_kernels.exp1_at(domain_seed(seed, DOMAIN_CORNER), 0, 0))
    return w


def completed_square(gp: np.ndarray) -> int:
    """Largest k with every (i, j) in [1,k]^2 except (1,1) interchanged."""
    limit = min(gp.shape[0], gp.shape[1]) - 1
    k = 1                                # (1,1) never interchanges
    while k < limit:
        nxt = k + 1
        if (np.isnan(gp[nxt, 1:nxt + 1]).any()
                or np.isnan(gp[1:nxt + 1, nxt]).any()):
            break
        k = nxt
    return k


# ---------------------------------------------------------------------------
# Pathwise verification


@dataclass
class CouplingReport:
    """Outcome of one pathwise coupling check."""

    seed: int
    T: float
    window: tuple[int, int]
    rect: tuple[int, int]
    events_checked: int
    x_jumps: int
    pair_jumps: int
    replay_jumps_checked: int
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"seed": self.seed, "T": self.T,
                "window": list(self.window), "rect": list(self.rect),
                "events_checked": self.events_checked,
                "x_jumps": self.x_jumps, "pair_jumps": self.pair_jumps,
                "replay_jumps_checked": self.replay_jumps_checked,
                "violations": self.violations}


_REPLAY_TIME_TOL = 1e-8   # float reconstruction slack for replayed clocks


def verify_coupling(seed: int, T: float, window: tuple[int, int],
                    rect: tuple[int, int] | None = None,
                    snapshot_count: int = 4,
                    strict: bool = False) -> CouplingReport:
    """Run both constructions from one seed and compare them pathwise.

    Checks, in order: the discrepancy trajectory against the difference of
    the replayed pair labels at every event time of either process (exact
    integer equality, bit-identical jump times); the occupation collapse at
    sampled times; and the grid replay of the extracted weights against the
    clock replay (exact labels, times within float-reconstruction slack).
    With strict=True the first violation raises CouplingViolation instead
    of being reported.
    """
    snap_times = [T * (k + 1) / snapshot_count for k in range(snapshot_count)]
    clocks = ClockSet(seed=seed, window=window, horizon=T)
    step_run, pair_run = _spliced_pair_run(clocks, T,
                                           snapshot_times=snap_times)
    violations: list[dict] = []

    def note(time, what):
        violations.append({"t": float(time), "detail": what})
        if strict:
            raise CouplingViolation(seed, time, what)

    xt, xs = step_run.x_jump_times, step_run.x_jump_sites
    pt = pair_run.pair_jump_times
    pl = pair_run.pair_jump_labels
    if xt.shape[0] != pt.shape[0]:
        note(min(xt[-1] if xt.size else T, pt[-1] if pt.size else T),
             f"jump counts differ: {xt.shape[0]} discrepancy vs "
             f"{pt.shape[0]} pair")
    n = min(xt.shape[0], pt.shape[0])
    for k in range(n):
        if xt[k] != pt[k]:
            note(xt[k], f"jump {k}: times differ ({xt[k]!r} vs {pt[k]!r})")
            break
        if xs[k] != pl[k, 0] - pl[k, 1]:
            note(xt[k], f"jump {k}: X={xs[k]} but I-J={pl[k,0]-pl[k,1]}")
            break
    # merged event-time scan: right-continuous values must agree everywhere
    all_times = np.concatenate([xt, pt, np.asarray(snap_times)])
    events_checked = 0
    for t in np.sort(all_times):
        if step_run.x_at(t) != (pair_run.pair_labels_at(t)[0]
                                - pair_run.pair_labels_at(t)[1]):
            note(t, "X(t) != I(t) - J(t) at an event time")
            break
        events_checked += 1
    # occupation collapse at the sampled times
    for snap_s, snap_p in zip(step_run.snapshots, pair_run.snapshots):
        x_here = snap_s.x
        occ1 = snap_s.occupation
        occ01 = snap_p.occupation
        left, right = window
        lo, hi = left + 2, right - 2
        ok = True
        for site in range(lo, hi + 1):
            v01 = occ01[site - left]
            if site < x_here:
                ok = v01 == occ1[site - left]
            elif site == x_here:
                ok = v01 == 0
            elif site == x_here + 1:
                ok = v01 == 1
            else:
                ok = v01 == occ1[site - 1 - left]
            if not ok:
                note(snap_s.time, f"occupation collapse fails at site {site}")
                break
        if not ok:
            break
    # grid replay of the extracted weights
    gp = pair_run.interchange_times
    if rect is None:
        k = completed_square(gp)
        rect = (k, k)
    replay_checked = 0
    if rect[0] >= 2 and rect[1] >= 2:
        wprime = _weights_from_interchanges(gp, rect, seed)
        grid = build_grid_from_array(wprime)
        g01 = grid.g01()
        horizon = float(min(g01[-1, :].min(), g01[:, -1].min()))
        driven = lpp_driven_simulate(grid, math.nextafter(horizon, 0.0))
        # Jumps before the far-edge clock stay strictly inside the
        # rectangle, so a pure time cut matches the two traces; the margin
        # absorbs the reconstruction rounding of the extracted weights.
        cut = horizon - 1e-6
        ref_t, ref_ij = [], []
        for k2 in range(pt.shape[0]):
            if pt[k2] < cut:
                ref_t.append(float(pt[k2]))
                ref_ij.append((int(pl[k2, 0]), int(pl[k2, 1])))
        drv = driven.pair_trace
        drv_t = [float(drv.taus[k2]) for k2 in range(1, len(drv))
                 if drv.taus[k2] < cut]
        drv_ij = [tuple(map(int, drv.sites[k2])) for k2 in range(1, len(drv))
                  if drv.taus[k2] < cut]
        m = min(len(ref_t), len(drv_t))
        if abs(len(ref_t) - len(drv_t)) > 1:
            note(cut, f"replay pair-jump counts differ: {len(ref_t)} vs "
                 f"{len(drv_t)}")
        elif len(ref_t) != len(drv_t):
            extra = (ref_t + drv_t)[-1]
            if abs(extra - cut) > _REPLAY_TIME_TOL * max(1.0, cut):
                note(extra, "replay pair-jump counts differ away from the "
                     "comparison horizon")
        for k2 in range(m):
            if ref_ij[k2] != drv_ij[k2]:
                note(ref_t[k2], f"replay jump {k2}: labels {ref_ij[k2]} vs "
                     f"{drv_ij[k2]}")
                break
            if abs(ref_t[k2] - drv_t[k2]) > _REPLAY_TIME_TOL * max(1.0, ref_t[k2]):
                note(ref_t[k2], f"replay jump {k2}: time drift "
                     f"{abs(ref_t[k2]-drv_t[k2]):.3e}")
                break
            replay_checked += 1
    return CouplingReport(seed=seed, T=T, window=window, rect=tuple(rect),
                          events_checked=events_checked,
                          x_jumps=int(xt.shape[0]),
                          pair_jumps=int(pt.shape[0]),
                          replay_jumps_checked=replay_checked,
                          violations=violations)


# ---------------------------------------------------------------------------
# Staircase boundary of a configuration


def staircase_boundary(config: ExclusionState) -> np.ndarray:
    """Lattice staircase encoding of a two-sided configuration.

    Anchored at (1,1) with the two conventional neighbours; away from the
    anchor each occupied site contributes a down step and each empty site a
    right step.  Returns rows (n, i, j) ordered by n over the window.
    """
    left, right = config.window
    occ = config.occupation
    gamma = {0: (1, 1), 1: (1, 0), -1: (0, 1)}
    for n in range(2, right + 1):
        eta = int(occ[n - left])
        di, dj = (1 - eta, -eta)
        prev = gamma[n - 1]
        gamma[n] = (prev[0] + di, prev[1] + dj)
    for n in range(-1, left - 1, -1):
        eta = int(occ[n - left])
        di, dj = (1 - eta, -eta)
        here = gamma[n]
        gamma[n - 1] = (here[0] - di, here[1] - dj)
    ns = sorted(gamma)
    return np.array([(n, gamma[n][0], gamma[n][1]) for n in ns],
                    dtype=np.int64)
