"""Numeric inner loops: group-DP level updates, basis scans, knapsack layers.

Each kernel has a numba implementation and a vectorised numpy one.  The
numba path is used when numba imports and ``LATCOUNT_NUMBA`` is not set to
``0``; object-dtype tables (coefficients that might overflow int64) always
take the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False

NEG = -(2**62)


def numba_enabled() -> bool:
    flag = os.environ.get("LATCOUNT_NUMBA", "1").strip().lower()
    return _HAVE_NUMBA and flag not in ("0", "false", "no", "off")


def _njit(fn):
    if not _HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


# --------------------------------------------------------------------------
# group DP: one level of the coset recurrence
#
# Tables have shape (|G|, W); column c holds the coefficient of t**(c + lo).
# Multiplying by t**s moves column c to c + s.


@_njit
def _shift_add_nb(dst, src, s, sign):
    W = dst.shape[0]
    if s >= 0:
        for c in range(W - s):
            dst[c + s] += sign * src[c]
    else:
        for c in range(-s, W):
            dst[c + s] += sign * src[c]


@_njit
def _level_sliding_nb(prev, cosets, w):
    nc, r = cosets.shape
    new = np.zeros_like(prev)
    for q in range(nc):
        e0 = cosets[q, 0]
        for i in range(r):
            _shift_add_nb(new[e0], prev[cosets[q, (r - i) % r]], w * i, 1)
        for j in range(1, r):
            ej = cosets[q, j]
            _shift_add_nb(new[ej], new[cosets[q, j - 1]], w, 1)
            _shift_add_nb(new[ej], prev[ej], 0, 1)
            _shift_add_nb(new[ej], prev[ej], w * r, -1)
    return new


@_njit
def _level_naive_nb(prev, cosets, w):
    nc, r = cosets.shape
    new = np.zeros_like(prev)
    for q in range(nc):
        for j in range(r):
            ej = cosets[q, j]
            for i in range(r):
                _shift_add_nb(new[ej], prev[cosets[q, (j - i) % r]], w * i, 1)
    return new


def _shift_np(block, s):
    out = np.zeros_like(block)
    W = block.shape[-1]
    if s == 0:
        out[...] = block
    elif s > 0:
        if s < W:
            out[..., s:] = block[..., :W - s]
        if np.any(block[..., max(W - s, 0):]):
            raise OverflowError("coefficient window too narrow")
    else:
        if -s < W:
            out[..., :W + s] = block[..., -s:]
        if np.any(block[..., :min(-s, W)]):
            raise OverflowError("coefficient window too narrow")
    return out


def _level_sliding_np(prev, cosets, w):
    nc, r = cosets.shape
    new = np.zeros_like(prev)
    acc = np.zeros((nc, prev.shape[1]), dtype=prev.dtype)
    for i in range(r):
        acc += _shift_np(prev[cosets[:, (r - i) % r]], w * i)
    new[cosets[:, 0]] = acc
    for j in range(1, r):
        cur = prev[cosets[:, j]]
        acc = _shift_np(acc, w) + cur - _shift_np(cur, w * r)
        new[cosets[:, j]] = acc
    return new


def _level_naive_np(prev, cosets, w):
    nc, r = cosets.shape
    new = np.zeros_like(prev)
    for j in range(r):
        acc = np.zeros((nc, prev.shape[1]), dtype=prev.dtype)
        for i in range(r):
            acc += _shift_np(prev[cosets[:, (j - i) % r]], w * i)
        new[cosets[:, j]] = acc
    return new


def dp_level(prev: np.ndarray, cosets: np.ndarray, w: int, method: str = "sliding",
             use_numba: bool | None = None) -> np.ndarray:
    """Advance the level table by one generator.

    ``cosets[q, j]`` is the index of ``rep_q + j * g``; ``w`` is the exponent
    step contributed by one copy of the generator.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    if method not in ("sliding", "naive"):
        raise ValueError(f"unknown method {method!r}")
    if use_numba and prev.dtype == np.int64:
        fn = _level_sliding_nb if method == "sliding" else _level_naive_nb
        return fn(prev, np.ascontiguousarray(cosets, dtype=np.int64), int(w))
    fn = _level_sliding_np if method == "sliding" else _level_naive_np
    return fn(prev, cosets, int(w))


# --------------------------------------------------------------------------
# basis scan: float prefilter for vertex enumeration


@_njit
def _basis_scan_nb(A, b, subsets, tol):
    k, n = subsets.shape
    m = A.shape[0]
    dets = np.zeros(k)
    ok = np.zeros(k, dtype=np.bool_)
    M = np.empty((n, n + 1))
    x = np.empty(n)
    for s in range(k):
        for i in range(n):
            row = subsets[s, i]
            for j in range(n):
                M[i, j] = A[row, j]
            M[i, n] = b[row]
        det = 1.0
        for c in range(n):
            piv = c
            for i in range(c + 1, n):
                if abs(M[i, c]) > abs(M[piv, c]):
                    piv = i
            if M[piv, c] == 0.0:
                det = 0.0
                break
            if piv != c:
                for j in range(n + 1):
                    tmp = M[c, j]
                    M[c, j] = M[piv, j]
                    M[piv, j] = tmp
                det = -det
            det *= M[c, c]
            for i in range(c + 1, n):
                f = M[i, c] / M[c, c]
                for j in range(c, n + 1):
                    M[i, j] -= f * M[c, j]
        dets[s] = det
        if abs(det) < 0.5:
            continue
        for i in range(n - 1, -1, -1):
            acc = M[i, n]
            for j in range(i + 1, n):
                acc -= M[i, j] * x[j]
            x[i] = acc / M[i, i]
        good = True
        for i in range(m):
            lhs = 0.0
            scale = 1.0 + abs(b[i])
            for j in range(n):
                lhs += A[i, j] * x[j]
                scale += abs(A[i, j] * x[j])
            if lhs - b[i] > tol * scale:
                good = False
                break
        ok[s] = good
    return dets, ok


def _basis_scan_np(A, b, subsets, tol):
    stack = A[subsets]
    dets = np.linalg.det(stack) if len(subsets) else np.zeros(0)
    ok = np.zeros(len(subsets), dtype=bool)
    nonsing = np.abs(dets) >= 0.5
    if nonsing.any():
        xs = np.linalg.solve(stack[nonsing], b[subsets[nonsing]][..., None])[..., 0]
        prod = xs @ A.T
        scale = 1.0 + np.abs(b)[None, :] + np.abs(xs[:, None, :] * A[None, :, :]).sum(axis=2)
        ok[nonsing] = np.all(prod - b[None, :] <= tol * scale, axis=1)
    return dets, ok


def basis_scan(A: np.ndarray, b: np.ndarray, subsets: np.ndarray, tol: float = 1e-9,
               use_numba: bool | None = None):
    """Float determinants and approximate feasibility of each row basis.

    Returns ``(dets, candidate_mask)``.  Bases that are exactly feasible are
    always candidates; callers confirm candidates in exact arithmetic.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    A = np.ascontiguousarray(A, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    subsets = np.ascontiguousarray(subsets, dtype=np.int64)
    if use_numba:
        return _basis_scan_nb(A, b, subsets, tol)
    return _basis_scan_np(A, b, subsets, tol)


# --------------------------------------------------------------------------
# bounded knapsack layer over a grid of right-hand sides


@_njit
def _knapsack_layer_nb(old, coords, a, offset, w, u):
    N = old.shape[0]
    k = coords.shape[1]
    new = np.full(N, NEG, dtype=np.int64)
    take = np.zeros(N, dtype=np.int64)
    for y in range(N):
        tmax = u
        for i in range(k):
            if a[i] > 0:
                lim = coords[y, i] // a[i]
                if tmax < 0 or lim < tmax:
                    tmax = lim
        if tmax < 0:
            tmax = 0
        best = NEG
        bt = 0
        for t in range(tmax + 1):
            v = old[y - t * offset]
            if v > NEG // 2:
                cand = v + t * w
                if cand > best:
                    best = cand
                    bt = t
        new[y] = best
        take[y] = bt
    return new, take


def _knapsack_layer_np(old, coords, a, offset, w, u):
    N = old.shape[0]
    pos = a > 0
    if pos.any():
        tmax = (coords[:, pos] // a[pos]).min(axis=1)
        if u >= 0:
            tmax = np.minimum(tmax, u)
    else:
        tmax = np.full(N, max(u, 0), dtype=np.int64)
    new = np.full(N, NEG, dtype=np.int64)
    take = np.zeros(N, dtype=np.int64)
    idx = np.arange(N)
    for t in range(int(tmax.max(initial=0)) + 1):
        valid = tmax >= t
        src = np.where(valid, idx - t * offset, 0)
        v = old[src]
        cand = np.where(valid & (v > NEG // 2), v + t * w, NEG)
        better = cand > new
        new = np.where(better, cand, new)
        take = np.where(better, t, take)
    return new, take


def knapsack_layer(old, coords, a, offset, w, u=-1, use_numba=None):
    """Add one column with multiplicity cap ``u`` (``-1`` = uncapped).

    ``old[y]`` is the best objective reaching right-hand side ``y`` (flattened
    mixed-radix index, ``coords[y]`` its coordinates) or ``NEG``.
    Returns the new values and the chosen copy count per state.
    """
    if use_numba is None:
        use_numba = numba_enabled()
    args = (np.ascontiguousarray(old, dtype=np.int64),
            np.ascontiguousarray(coords, dtype=np.int64),
            np.ascontiguousarray(a, dtype=np.int64), int(offset), int(w), int(u))
    if use_numba:
        return _knapsack_layer_nb(*args)
    return _knapsack_layer_np(*args)
