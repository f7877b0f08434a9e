"""Numba inner loops: hashing, passage-time recurrences, label fill, Harris.

Lattice problems here are dynamic programs or event replays over millions
of cells; these kernels keep them at native speed while every public
contract stays in the plain-Python modules.  The hash kernels are the
bit-identical twins of the numpy paths in `weights`; equality of the two
routes is pinned by tests.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U53 = 1.0 / (1 << 53)


@njit(cache=True, inline="always")
def _mix64(x):
    x = (x ^ (x >> _S30)) * _MIX1
    x = (x ^ (x >> _S27)) * _MIX2
    return x ^ (x >> _S31)


@njit(cache=True, inline="always")
def _exp1_one(dseed, a, b):
    h = _mix64(_mix64(dseed ^ np.uint64(a)) ^ np.uint64(b))
    bits = h >> _S11
    while bits == np.uint64(0):
        h = _mix64(h + _GOLD)
        bits = h >> _S11
    return -np.log1p(-(float(bits) * _U53))


@njit(cache=True)
def exp1_grid(dseed, a0, b0, na, nb):
    """(na, nb) grid of Exp(1) draws at counters (a0 + r, b0 + c)."""
    out = np.empty((na, nb), dtype=np.float64)
    for r in range(na):
        a = np.int64(a0 + r)
        for c in range(nb):
            out[r, c] = _exp1_one(dseed, a, np.int64(b0 + c))
    return out


@njit(cache=True)
def exp1_at(dseed, a, b):
    """Scalar Exp(1) draw; bit-identical to the matching exp1_grid entry."""
    return _exp1_one(dseed, np.int64(a), np.int64(b))


@njit(cache=True)
def dp_fill(w):
    """Passage-time recurrence over a weight rectangle.

    Returns (values, parent, tie_i, tie_j): values has a zero virtual
    boundary at row/column 0; parent tags the recurrence argmax
    (0 = origin, 1 = first-coordinate predecessor, 2 = second-coordinate
    predecessor, -1 = boundary).  tie_i > 0 flags the first bit-equal
    argmax candidate pair encountered.
    """
    rows, cols = w.shape
    values = np.zeros((rows + 1, cols + 1), dtype=np.float64)
    parent = np.full((rows + 1, cols + 1), -1, dtype=np.int8)
    tie_i = 0
    tie_j = 0
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            a = values[i - 1, j]
            b = values[i, j - 1]
            if a > b:
                values[i, j] = w[i - 1, j - 1] + a
                parent[i, j] = 1
            elif b > a:
                values[i, j] = w[i - 1, j - 1] + b
                parent[i, j] = 2
            else:
                values[i, j] = w[i - 1, j - 1] + a
                if i == 1 and j == 1:
                    parent[i, j] = 0
                elif tie_i == 0:
                    tie_i = i
                    tie_j = j
    return values, parent, tie_i, tie_j


@njit(cache=True)
def dp_last_row(dseed, a0, b0, rows, cols):
    """Rolling-row recurrence: returns only row `rows` of the passage grid.

    O(cols) memory; weights are hashed on the fly (same stream as
    exp1_grid).
    """
    buf = np.zeros(cols + 1, dtype=np.float64)
    for i in range(1, rows + 1):
        a = np.int64(a0 + i - 1)
        for j in range(1, cols + 1):
            wij = _exp1_one(dseed, a, np.int64(b0 + j - 1))
            above = buf[j]
            left = buf[j - 1]
            buf[j] = wij + (above if above > left else left)
    return buf


@njit(cache=True)
def interface_walk_hashed(dseed, n_steps):
    """Fused triangle recurrence plus locally-shortest-step walk.

    Fills passage times only on the triangle i + j <= n_steps + 2 (the walk
    never looks further) and immediately walks the competition interface
    for n_steps steps.  Returns (phi, taus, tie_i, tie_j) with phi of shape
    (n_steps + 1, 2); taus[0] = 0.  Bit-identical to building the full grid
    and walking it, since both consume the same hashed weights in the same
    recurrence.
    """
    m = n_steps
    size = m + 2
    values = np.zeros((size, size), dtype=np.float64)
    tie_i = 0
    tie_j = 0
    for i in range(1, size):
        a = np.int64(i)
        jmax = m + 2 - i
        if jmax > size - 1:
            jmax = size - 1
        for j in range(1, jmax + 1):
            va = values[i - 1, j]
            vb = values[i, j - 1]
            if va == vb and not (i == 1 and j == 1) and tie_i == 0:
                tie_i = i
                tie_j = j
            values[i, j] = _exp1_one(dseed, a, np.int64(j)) + (va if va > vb else vb)
    phi = np.empty((m + 1, 2), dtype=np.int64)
    taus = np.empty(m + 1, dtype=np.float64)
    phi[0, 0] = 1
    phi[0, 1] = 1
    taus[0] = 0.0
    w11 = values[1, 1]
    ci = 1
    cj = 1
    for k in range(1, m + 1):
        gr = values[ci + 1, cj]
        gu = values[ci, cj + 1]
        if gr == gu and tie_i == 0:
            tie_i = ci + 1
            tie_j = cj
        if gr < gu:
            ci += 1
        else:
            cj += 1
        phi[k, 0] = ci
        phi[k, 1] = cj
        taus[k] = values[ci, cj] - w11
    return phi, taus, tie_i, tie_j


@njit(cache=True)
def label_fill(parent):
    """Propagate competition labels along parent tags in one pass.

    0 = neutral origin, 1 = infected through (2,1), 2 = through (1,2).
    Assumes parent was produced by dp_fill for a grid rooted at (1,1).
    """
    rows = parent.shape[0] - 1
    cols = parent.shape[1] - 1
    labels = np.zeros((rows + 1, cols + 1), dtype=np.int8)
    if rows >= 2:
        labels[2, 1] = 1
    if cols >= 2:
        labels[1, 2] = 2
    for i in range(1, rows + 1):
        for j in range(1, cols + 1):
            if (i == 1 and j <= 2) or (j == 1 and i <= 2):
                continue
            if parent[i, j] == 1:
                labels[i, j] = labels[i - 1, j]
            else:
                labels[i, j] = labels[i, j - 1]
    return labels


@njit(cache=True)
def harris_second_class(occ, sites, times, x0, right_guard, snap_times):
    """Step-profile exclusion with one marked discrepancy site.

    occ: occupation over the window (modified in place), index = site - L.
    sites: per-event window indices, times: matching epoch times (sorted).
    x0: window index of the discrepancy.  right_guard: last usable index.
    snap_times: sorted times at which to copy the occupation out.

    Returns (jump_times, jump_positions, n_jumps, breach, snaps) where
    breach != 0 encodes which containment rule fired.
    """
    n = sites.shape[0]
    jt = np.empty(n, dtype=np.float64)
    jx = np.empty(n, dtype=np.int64)
    nj = 0
    x = x0
    breach = 0
    nsnap = snap_times.shape[0]
    snaps = np.zeros((nsnap, occ.shape[0]), dtype=np.int8)
    snap_x = np.zeros(nsnap, dtype=np.int64)
    si = 0
    for k in range(n):
        t = times[k]
        s = sites[k]
        while si < nsnap and snap_times[si] < t:
            snaps[si, :] = occ
            snap_x[si] = x
            si += 1
        if s == x:
            if s + 1 > right_guard:
                breach = 1
                break
            if occ[s + 1] == 0:
                occ[s] = 0
                occ[s + 1] = 1
                x = s + 1
                jt[nj] = t
                jx[nj] = x
                nj += 1
        elif occ[s] == 1:
            if s + 1 == x:
                x = s
                jt[nj] = t
                jx[nj] = x
                nj += 1
            elif s + 1 > right_guard:
                breach = 2
                break
            elif occ[s + 1] == 0:
                occ[s] = 0
                occ[s + 1] = 1
                if s == 0:
                    breach = 3
                    break
        if x <= 1 or x >= right_guard - 1:
            breach = 4
            break
    while si < nsnap and breach == 0:
        snaps[si, :] = occ
        snap_x[si] = x
        si += 1
    return jt[:nj], jx[:nj], breach, snaps, snap_x
