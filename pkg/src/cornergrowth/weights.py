"""Deterministic lattice field of i.i.d. mean-1 exponential weights.

Every weight is a pure function of (seed, site): the site coordinates are
mixed into the seed with a splitmix64-style counter hash, so any
sub-rectangle can be evaluated in any order, on any worker, and reproduce
bit-identical values.  The same hash core also feeds the Poisson clocks and
Bernoulli initial configurations used elsewhere in the package; each
consumer gets its own domain constant so the streams never overlap.

Production Exp(1) draws all go through the compiled kernels in `_kernels`
(one log1p implementation, hence one bit pattern); `hash_exp1_reference`
is the plain-numpy twin kept for cross-checking in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Domain constants: one per independent consumer of the hash core.
DOMAIN_WEIGHTS = 0x5753E4B1C9A2F06D
DOMAIN_CLOCKS = 0xA11CE5D1E6B2C947
DOMAIN_AUX_CLOCK = 0xC3D6A98F124E77B5
DOMAIN_CONFIG = 0x6E2F0B54D8A1C3E9
DOMAIN_CORNER = 0x1B8E2D94F6C0A753

# 2**-53: top 53 hash bits -> uniform on [0, 1).
_U53 = 1.0 / (1 << 53)


def _mix64(x):
    """splitmix64 finalizer; full-avalanche bijection on uint64."""
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _MIX1
        x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


def _as_u64(values) -> np.ndarray:
    """Two's-complement encode (possibly negative) integers as uint64."""
    return np.asarray(values, dtype=np.int64).view(np.uint64)


def domain_seed(seed: int, domain: int) -> np.uint64:
    """Per-domain sub-seed so distinct consumers draw disjoint streams."""
    return _mix64(np.uint64(seed & _MASK64) ^ np.uint64(domain))


def hash_u01(dseed: np.uint64, a, b) -> np.ndarray:
    """Uniform [0, 1) from a domain seed and two integer counters.

    `a` and `b` broadcast; the return value has their broadcast shape.
    """
    h = _mix64(_mix64(dseed ^ _as_u64(a)) ^ _as_u64(b))
    return (h >> np.uint64(11)).astype(np.float64) * _U53


def hash_exp1_reference(dseed: np.uint64, a, b) -> np.ndarray:
    """Reference (numpy) Exp(1) transform of the counter hash.

    numpy's SIMD log1p can differ from libm by one ulp, so this path is
    for validation only; production draws use the compiled kernels.
    """
    h = _mix64(_mix64(dseed ^ _as_u64(a)) ^ _as_u64(b))
    shape = h.shape
    flat = np.atleast_1d(h).reshape(-1)
    bits = flat >> np.uint64(11)
    while True:
        zero = bits == np.uint64(0)
        if not zero.any():
            break
        flat[zero] = _mix64(flat[zero] + _GOLD)
        bits[zero] = flat[zero] >> np.uint64(11)
    u = bits.astype(np.float64) * _U53
    return -np.log1p(-u).reshape(shape)


def exp1_rectangle(dseed: np.uint64, a0: int, b0: int, na: int, nb: int) -> np.ndarray:
    """(na, nb) grid of Exp(1) draws at counters (a0 + r, b0 + c)."""
    return _kernels.exp1_grid(dseed, np.int64(a0), np.int64(b0), na, nb)


@dataclass(frozen=True)
class WeightField:
    """The quenched environment: w(seed, z) for z in Z^2.

    Read-only after construction and trivially thread-safe; replications
    should use distinct seeds rather than distinct fields.

    cache: "none" recomputes on demand; "rectangle" memoizes full-rectangle
    evaluations (useful when several consumers walk the same grid).
    """

    seed: int
    cache: str = "none"
    _memo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.cache not in ("none", "rectangle"):
            raise ValueError(f"unknown cache policy {self.cache!r}")

    @property
    def dseed(self) -> np.uint64:
        return domain_seed(self.seed, DOMAIN_WEIGHTS)

    def weight_at(self, z) -> float:
        """Exp(1) weight at lattice site z = (i, j); pure in (seed, z)."""
        return float(_kernels.exp1_at(self.dseed, int(z[0]), int(z[1])))

    def rectangle(self, rows: int, cols: int, origin=(1, 1)) -> np.ndarray:
        """Dense (rows, cols) array of weights for the rectangle with the
        given south-west corner; entry [a, b] is w(origin + (a, b))."""
        if rows < 1 or cols < 1:
            raise ValueError("rectangle extents must be positive")
        key = (int(origin[0]), int(origin[1]), rows, cols)
        if self.cache == "rectangle" and key in self._memo:
            return self._memo[key]
        w = exp1_rectangle(self.dseed, int(origin[0]), int(origin[1]), rows, cols)
        w.setflags(write=False)
        if self.cache == "rectangle":
            self._memo[key] = w
        return w


def weight_at(field: WeightField, z) -> float:
    return field.weight_at(z)
