"""Maximizing paths, geodesic trees, directional proxies, fluctuations.

Semi-infinite directional geodesics are not representable; the finite
proxy is the path to the lattice square containing r*e^{i alpha}, and the
stabilization of passage-time differences over an r-ladder stands in for
the almost-sure coalescence statements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfGrid, SimulationError, Truncated
from .lpp import (PARENT_FIRST, PARENT_ORIGIN, PARENT_SECOND, PassageGrid,
                  build_grid, shape_mu)


@dataclass
class GeodesicPath:
    """The unique maximizing up/right path between two sites.

    sites runs from start to end inclusive; total_weight is the passage
    time realized along it.
    """

    sites: np.ndarray      # (m, 2) int64
    total_weight: float

    @property
    def start(self) -> tuple[int, int]:
        return int(self.sites[0, 0]), int(self.sites[0, 1])

    @property
    def end(self) -> tuple[int, int]:
        return int(self.sites[-1, 0]), int(self.sites[-1, 1])

    def __len__(self) -> int:
        return self.sites.shape[0]


@dataclass
class GeodesicTree:
    """Parent-pointer view of all geodesics out of one root.

    parent[a, b] tags the predecessor of root+(a-1, b-1) exactly as in the
    passage grid; the tree edges are the maximizing-path edges, so chasing
    pointers from any site reproduces the root-to-site geodesic.
    """

    root: tuple[int, int]
    rows: int
    cols: int
    parent: np.ndarray

    def branch(self, z) -> np.ndarray:
        """Site list of the root -> z tree branch."""
        return _backtrack(self.parent, self.root, self.rows, self.cols, z)

    def subtree_mask(self, z) -> np.ndarray:
        """Boolean (rows, cols) mask of sites whose branch passes z."""
        a0 = z[0] - self.root[0]
        b0 = z[1] - self.root[1]
        if not (0 <= a0 < self.rows and 0 <= b0 < self.cols):
            raise OutOfGrid(f"{tuple(z)} outside tree rectangle")
        mask = np.zeros((self.rows, self.cols), dtype=bool)
        mask[a0, b0] = True
        for a in range(a0, self.rows):
            for b in range(b0, self.cols):
                if mask[a, b]:
                    continue
                tag = self.parent[a + 1, b + 1]
                if tag == PARENT_FIRST:
                    mask[a, b] = mask[a - 1, b]
                elif tag == PARENT_SECOND:
                    mask[a, b] = mask[a, b - 1]
        return mask


def _backtrack(parent, origin, rows, cols, z) -> np.ndarray:
    a = z[0] - origin[0] + 1
    b = z[1] - origin[1] + 1
    if not (1 <= a <= rows and 1 <= b <= cols):
        raise OutOfGrid(f"site {tuple(z)} outside grid")
    rev = []
    while True:
        rev.append((a + origin[0] - 1, b + origin[1] - 1))
        tag = parent[a, b]
        if tag == PARENT_ORIGIN:
            break
        if tag == PARENT_FIRST:
            a -= 1
        elif tag == PARENT_SECOND:
            b -= 1
        else:
            raise OutOfGrid(f"backtrack fell off the grid at {(a, b)}")
    rev.reverse()
    return np.array(rev, dtype=np.int64)


def geodesic(grid: PassageGrid, z, zp) -> GeodesicPath:
    """Backtrack the maximizing path from zp down to z.

    When z is not the grid origin the relevant sub-rectangle is rebuilt
    from the grid's weight field (same pure hash, hence the same weights);
    the weight-sum identity against the passage time holds either way.
    """
    z = (int(z[0]), int(z[1]))
    zp = (int(zp[0]), int(zp[1]))
    if zp[0] < z[0] or zp[1] < z[1]:
        raise ValueError("need z <= z' coordinate-wise")
    if not (grid.in_grid(z) and grid.in_grid(zp)):
        raise OutOfGrid(f"endpoints {z}, {zp} must lie in the grid")
    if z != grid.origin:
        if grid.field is None:
            raise OutOfGrid("grid has no weight field; geodesics must start "
                            "at the grid origin")
        sub = build_grid(grid.field, zp[0] - z[0] + 1, zp[1] - z[1] + 1,
                         origin=z)
        return geodesic(sub, z, zp)
    sites = _backtrack(grid.parent, grid.origin, grid.rows, grid.cols, zp)
    return GeodesicPath(sites=sites, total_weight=grid.value_at(zp))


def geodesic_tree(grid: PassageGrid) -> GeodesicTree:
    """The maximizing paths out of the grid origin, as parent pointers."""
    return GeodesicTree(root=grid.origin, rows=grid.rows, cols=grid.cols,
                        parent=grid.parent)


def real_point_target(u) -> tuple[int, int]:
    """North-east lattice corner of the unit square containing the real
    point u; squares are half-open: (i-1, i] x (j-1, j]."""
    x, y = float(u[0]), float(u[1])
    if x <= 0 or y <= 0:
        raise ValueError("point must lie in the open positive quadrant")
    return int(math.ceil(x)), int(math.ceil(y))


def directional_target(alpha: float, r: float) -> tuple[int, int]:
    """Lattice target for the point r*e^{i alpha}; axis directions clamp
    the degenerate coordinate to 1."""
    if not 0 <= alpha <= math.pi / 2:
        raise ValueError("alpha must lie in [0, pi/2]")
    if r <= 0:
        raise ValueError("r must be positive")
    x = r * math.cos(alpha)
    y = r * math.sin(alpha)
    return max(1, int(math.ceil(x))), max(1, int(math.ceil(y)))


def directional_geodesic(grid: PassageGrid, z, alpha: float,
                         r: float) -> GeodesicPath:
    """Finite-r proxy for the alpha-directional geodesic out of z.

    The target is the lattice square containing the absolute plane point
    r*e^{i alpha}.
    """
    target = directional_target(alpha, r)
    if not grid.in_grid(target):
        raise Truncated(f"target {target} for r={r} lies outside the grid")
    return geodesic(grid, z, target)


def coalescence_point(grid: PassageGrid, z, zp, target):
    """Earliest common site of the geodesics z->target and zp->target.

    Returns None when the paths are site-disjoint.  When a common site
    exists the suffixes from it onward are asserted identical (the planar
    tree property, which holds exactly, not just asymptotically).
    """
    pa = geodesic(grid, z, target)
    pb = geodesic(grid, zp, target)
    return coalescence_of_paths(pa, pb)


def coalescence_of_paths(pa: GeodesicPath, pb: GeodesicPath):
    """First shared site of two paths toward a common target, with the
    shared-suffix identity checked exactly."""
    set_b = {(int(i), int(j)) for i, j in pb.sites}
    first = None
    idx_a = None
    for k in range(pa.sites.shape[0]):
        s = (int(pa.sites[k, 0]), int(pa.sites[k, 1]))
        if s in set_b:
            first = s
            idx_a = k
            break
    if first is None:
        return None
    idx_b = int(np.nonzero((pb.sites[:, 0] == first[0])
                           & (pb.sites[:, 1] == first[1]))[0][0])
    suf_a = pa.sites[idx_a:]
    suf_b = pb.sites[idx_b:]
    if suf_a.shape != suf_b.shape or not np.array_equal(suf_a, suf_b):
        raise SimulationError(f"shared geodesic suffixes disagree past the "
                              f"first common site {first}")
    return first


def transversal_deviation(path: GeodesicPath, z=None) -> float:
    """Maximum Euclidean distance from path sites to the straight segment
    joining the path endpoints."""
    if z is not None:
        if (int(z[0]), int(z[1])) != path.end:
            raise ValueError("z must be the path endpoint")
    s = path.sites[0].astype(np.float64)
    e = path.sites[-1].astype(np.float64)
    d = e - s
    norm = math.hypot(d[0], d[1])
    if norm == 0:
        return 0.0
    rel = path.sites.astype(np.float64) - s
    cross = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0]) / norm
    return float(cross.max())


def shape_fluctuation(grid: PassageGrid, z) -> float:
    """Signed fluctuation G(z) - mu(z) of the passage time around the
    limit shape."""
    if z[0] < 1 or z[1] < 1:
        raise ValueError("the passage time is undefined on the axes")
    return grid.value_at(z) - shape_mu(float(z[0]), float(z[1]))


def curvature_gap(z, zp) -> float:
    """mu(z) - mu(z') - mu(z - z') via the product identity:
    2*(sqrt(z1 z2) - sqrt(z1' z2') - sqrt((z1-z1')(z2-z2')))."""
    z1, z2 = float(z[0]), float(z[1])
    p1, p2 = float(zp[0]), float(zp[1])
    if not (0 <= p1 <= z1 and 0 <= p2 <= z2):
        raise ValueError("need 0 <= z' <= z coordinate-wise")
    return 2.0 * (math.sqrt(z1 * z2) - math.sqrt(p1 * p2)
                  - math.sqrt((z1 - p1) * (z2 - p2)))
