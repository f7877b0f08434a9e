"""Passage times over rectangles: recurrence, oracle, interface, shape.

The passage time G(z) from the rectangle origin obeys
G(z) = w(z) + max(G(z - (1,0)), G(z - (0,1))) with a zero virtual boundary,
computed densely in one row-major pass.  A brute-force path enumeration is
kept as the independent oracle for small rectangles.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import OutOfGrid, RectangleTooLarge, TieDetected, Truncated
from .weights import WeightField

# Parent tags stored in PassageGrid.parent.
PARENT_ORIGIN = 0   # (1,1): both virtual predecessors are zero
PARENT_FIRST = 1    # predecessor z - (1,0)
PARENT_SECOND = 2   # predecessor z - (0,1)

_PARENT_CHAR = {PARENT_ORIGIN: "O", PARENT_FIRST: "L", PARENT_SECOND: "D"}

BRUTE_FORCE_MAX_CELLS = 49


@dataclass
class PassageGrid:
    """Dense rectangle of passage times rooted at `origin`.

    values[a, b] is G(origin, origin + (a-1, b-1)) for a, b >= 1; row and
    column 0 hold the zero virtual boundary.  parent records the recurrence
    argmax.  Immutable once built; share freely across consumers.
    """

    origin: tuple[int, int]
    rows: int
    cols: int
    values: np.ndarray
    parent: np.ndarray
    weights: np.ndarray
    field: WeightField | None = None

    def in_grid(self, z) -> bool:
        a = z[0] - self.origin[0]
        b = z[1] - self.origin[1]
        return 0 <= a < self.rows and 0 <= b < self.cols

    def _index(self, z) -> tuple[int, int]:
        if not self.in_grid(z):
            raise OutOfGrid(f"site {tuple(z)} outside grid "
                            f"[{self.origin}, +({self.rows},{self.cols}))")
        return z[0] - self.origin[0] + 1, z[1] - self.origin[1] + 1

    def value_at(self, z) -> float:
        """G(origin, z), the passage time including both endpoint weights."""
        a, b = self._index(z)
        return float(self.values[a, b])

    @property
    def origin_weight(self) -> float:
        """w at the origin site; equals G(origin)."""
        return float(self.values[1, 1])

    def g01_at(self, z) -> float:
        """G(z) - w(origin): the passage time with the origin weight removed.

        This is the clock that drives the exclusion construction; both
        accessors are exposed because which one is "the" passage time
        depends on the consumer.
        """
        a, b = self._index(z)
        return float(self.values[a, b] - self.values[1, 1])

    def g01(self) -> np.ndarray:
        """(rows, cols) array of g01 values; entry [a, b] for origin+(a,b)."""
        return self.values[1:, 1:] - self.values[1, 1]

    def weight_site(self, z) -> float:
        a, b = self._index(z)
        return float(self.weights[a - 1, b - 1])

    def parent_at(self, z) -> int:
        a, b = self._index(z)
        return int(self.parent[a, b])

    def to_csv(self, path) -> None:
        """Dump `i,j,G,parent` rows (parent in {O, L, D})."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j", "G", "parent"])
            for a in range(1, self.rows + 1):
                i = self.origin[0] + a - 1
                for b in range(1, self.cols + 1):
                    j = self.origin[1] + b - 1
                    writer.writerow([i, j, repr(float(self.values[a, b])),
                                     _PARENT_CHAR[int(self.parent[a, b])]])


def build_grid(field: WeightField, rows: int, cols: int,
               origin: tuple[int, int] = (1, 1)) -> PassageGrid:
    """Fill the passage-time recurrence over a rows x cols rectangle.

    Raises TieDetected if the two candidate predecessors of any site carry
    bit-equal passage times (a probability-zero event that flags a defect).
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid extents must be positive")
    w = field.rectangle(rows, cols, origin=origin)
    grid = build_grid_from_array(w, origin=origin)
    grid.field = field
    return grid


def build_grid_from_array(weights: np.ndarray,
                          origin: tuple[int, int] = (1, 1)) -> PassageGrid:
    """Same recurrence, but over an explicit weight rectangle.

    Used for replayed environments (e.g. the clock-extracted weights of the
    exclusion coupling) where there is no hash field behind the numbers.
    """
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
        raise ValueError("weights must be a non-empty 2-d array")
    if not np.all(w > 0):
        raise ValueError("weights must be strictly positive")
    values, parent, tie_i, tie_j = _kernels.dp_fill(w)
    if tie_i > 0:
        site = (origin[0] + tie_i - 1, origin[1] + tie_j - 1)
        raise TieDetected(site)
    return PassageGrid(origin=(int(origin[0]), int(origin[1])),
                       rows=w.shape[0], cols=w.shape[1],
                       values=values, parent=parent, weights=w)


def passage_last_row(field: WeightField, rows: int, cols: int,
                     origin: tuple[int, int] = (1, 1)) -> np.ndarray:
    """Row `rows` of the passage grid in O(cols) memory.

    The rolling-row mode for shape experiments that only need G near the
    far corner; entry [b] is G(origin, origin + (rows-1, b-1)) for b >= 1.
    """
    return _kernels.dp_last_row(field.dseed, int(origin[0]), int(origin[1]),
                                rows, cols)


def brute_force_passage(field: WeightField, z, zp) -> float:
    """Maximal path weight from z to zp by explicit enumeration.

    Independent oracle for build_grid on small instances; guards at
    BRUTE_FORCE_MAX_CELLS cells.
    """
    di = zp[0] - z[0]
    dj = zp[1] - z[1]
    if di < 0 or dj < 0:
        raise ValueError("need z <= z' coordinate-wise")
    cells = (di + 1) * (dj + 1)
    if cells > BRUTE_FORCE_MAX_CELLS:
        raise RectangleTooLarge(f"{cells} cells exceeds the enumeration guard "
                                f"({BRUTE_FORCE_MAX_CELLS})")
    w = field.rectangle(di + 1, dj + 1, origin=(int(z[0]), int(z[1])))
    best = -math.inf

    def walk(a, b, acc):
        nonlocal best
        acc += w[a, b]
        if a == di and b == dj:
            if acc > best:
                best = acc
            return
        if a < di:
            walk(a + 1, b, acc)
        if b < dj:
            walk(a, b + 1, acc)

    walk(0, 0, 0.0)
    return best


def growth_interface(grid: PassageGrid, t: float) -> np.ndarray:
    """Sites z with G(z) <= t and G(z + (1,1)) > t, ordered by first
    coordinate (then second).

    Raises Truncated when the t-level set reaches the far boundary, since
    the interface would then be clipped.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    inner = grid.values[1:, 1:]
    infected = inner <= t
    if infected[-1, :].any() or infected[:, -1].any():
        raise Truncated(f"level set at t={t} touches the far boundary")
    member = infected[:-1, :-1] & (grid.values[2:, 2:] > t)
    aa, bb = np.nonzero(member)
    order = np.lexsort((bb, aa))
    sites = np.column_stack([aa[order] + grid.origin[0],
                             bb[order] + grid.origin[1]])
    return sites


def shape_mu(u: float, v: float) -> float:
    """The limit shape (sqrt(u) + sqrt(v))**2."""
    if u < 0 or v < 0:
        raise ValueError("shape function needs nonnegative coordinates")
    return (math.sqrt(u) + math.sqrt(v)) ** 2
