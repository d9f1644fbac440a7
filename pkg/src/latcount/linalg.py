"""Exact integer linear algebra on small dense matrices.

Matrices are tuples of tuples of Python ints, so every operation is exact
regardless of entry size.  Functions accept any nested sequence (including
numpy integer arrays) and normalise it with :func:`as_matrix`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, SingularMatrixError, budget

Matrix = tuple[tuple[int, ...], ...]

# |det| below this is recovered exactly by rounding a float64 LU determinant
_FLOAT_DET_SAFE = 2.0**40


def as_matrix(A) -> Matrix:
    if isinstance(A, np.ndarray):
        A = A.tolist()
    rows = tuple(tuple(int(x) for x in row) for row in A)
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A)) if A else ()


def matmul(A, B) -> Matrix:
    A, B = as_matrix(A), as_matrix(B)
    Bt = transpose(B)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in Bt) for row in A)


def matvec(A, x: Sequence) -> list:
    return [sum(a * xi for a, xi in zip(row, x)) for row in A]


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g == gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def det_exact(A) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in as_matrix(A)]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("det_exact needs a square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        rk = M[k]
        for i in range(k + 1, n):
            ri = M[i]
            a = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pk - a * rk[j]) // prev
        prev = pk
    return sign * M[n - 1][n - 1]


def rank(A) -> int:
    M = [[Fraction(x) for x in r] for r in as_matrix(A)]
    if not M:
        return 0
    m, n = len(M), len(M[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(r + 1, m):
            if M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
        if r == m:
            break
    return r


def inverse(A) -> tuple[tuple[Fraction, ...], ...]:
    """Exact rational inverse by Gauss-Jordan elimination."""
    A = as_matrix(A)
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        M[c], M[piv] = M[piv], M[c]
        p = M[c][c]
        M[c] = [x / p for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return tuple(tuple(row[n:]) for row in M)


def adjugate(A) -> Matrix:
    """Adjugate ``A*`` with ``A @ A* == det(A) * I``; ``A`` must be nonsingular."""
    A = as_matrix(A)
    d = det_exact(A)
    if d == 0:
        raise SingularMatrixError("adjugate requested for a singular matrix")
    inv = inverse(A)
    out = []
    for row in inv:
        vals = [x * d for x in row]
        assert all(v.denominator == 1 for v in vals)
        out.append(tuple(int(v) for v in vals))
    return tuple(out)


def solve(A, b: Sequence) -> list[Fraction]:
    """Exact solution of a nonsingular square system by Cramer's rule."""
    A = as_matrix(A)
    d = det_exact(A)
    if d == 0:
        raise SingularMatrixError("singular system")
    n = len(A)
    den = math.lcm(*(Fraction(x).denominator for x in b)) if n else 1
    bi = [int(Fraction(x) * den) for x in b]
    out = []
    for j in range(n):
        Mj = [row[:j] + (bi[i],) + row[j + 1:] for i, row in enumerate(A)]
        out.append(Fraction(det_exact(Mj), d * den))
    return out


def kernel_vector(rows) -> tuple[int, ...]:
    """Generalised cross product of ``n-1`` rows in ``Z^n``.

    The result is orthogonal to every row and is zero iff the rows are
    linearly dependent.
    """
    rows = as_matrix(rows)
    n = len(rows) + 1
    if rows and len(rows[0]) != n:
        raise ValueError("kernel_vector needs n-1 rows of length n")
    out = []
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows]
        out.append((-1) ** j * det_exact(minor))
    return tuple(out)


# --------------------------------------------------------------------------
# Normal forms


@dataclass(frozen=True)
class HNFDecomposition:
    """Row-style Hermite form: ``A @ Q == H`` with ``Q`` unimodular.

    ``H`` is lower-triangular in staircase shape, its pivots are positive,
    and entries left of a pivot lie in ``[0, pivot)``.
    """

    H: Matrix
    Q: Matrix
    pivots: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class SNFDecomposition:
    """Smith form ``S == P @ A @ Q`` with ``P, Q`` unimodular."""

    S: Matrix
    P: Matrix
    Q: Matrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i][i] for i in range(min(shape(self.S))))

    @property
    def sigma(self) -> int:
        """Largest invariant factor."""
        d = self.diagonal
        return d[-1] if d else 0


def _col_op(M, j, k, a, b, c, d):
    """Columns (j, k) <- (a*col_j + b*col_k, c*col_j + d*col_k)."""
    for row in M:
        x, y = row[j], row[k]
        row[j], row[k] = a * x + b * y, c * x + d * y


def hnf(A) -> HNFDecomposition:
    A = as_matrix(A)
    m, n = shape(A)
    H = [list(r) for r in A]
    Q = [list(r) for r in identity(n)]
    col = 0
    pivots = []
    for i in range(m):
        if col >= n:
            break
        for j in range(col + 1, n):
            if H[i][j] != 0:
                a, b = H[i][col], H[i][j]
                g, s, t = xgcd(a, b)
                for M in (H, Q):
                    _col_op(M, col, j, s, t, -b // g, a // g)
        p = H[i][col]
        if p == 0:
            continue
        if p < 0:
            for M in (H, Q):
                for row in M:
                    row[col] = -row[col]
            p = -p
        for j in range(col):
            q = H[i][j] // p
            if q:
                for M in (H, Q):
                    for row in M:
                        row[j] -= q * row[col]
        pivots.append((i, col))
        col += 1
    return HNFDecomposition(as_matrix(H), as_matrix(Q), tuple(pivots))


def snf(A) -> SNFDecomposition:
    A = as_matrix(A)
    m, n = shape(A)
    S = [list(r) for r in A]
    P = [list(r) for r in identity(m)]
    Q = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        for M in (S, P):
            M[i], M[j] = M[j], M[i]

    def swap_cols(i, j):
        for M in (S, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = S[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                return SNFDecomposition(as_matrix(S), as_matrix(P), as_matrix(Q))
            _, i, j = best
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = S[t][t]
            clean = True
            for i in range(t + 1, m):
                q = S[i][t] // p
                if q:
                    for M in (S, P):
                        M[i] = [a - q * b for a, b in zip(M[i], M[t])]
                clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                q = S[t][j] // p
                if q:
                    for M in (S, Q):
                        for row in M:
                            row[j] -= q * row[t]
                clean = clean and S[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(S[i][j] % p for j in range(t + 1, n))), None)
            if bad is None:
                break
            for M in (S, P):
                M[t] = [a + b for a, b in zip(M[t], M[bad])]
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            P[t] = [-x for x in P[t]]
    return SNFDecomposition(as_matrix(S), as_matrix(P), as_matrix(Q))


# --------------------------------------------------------------------------
# Minors and sparsity diagnostics


def _submatrix_stack(A: Matrix, k: int):
    m, n = shape(A)
    rows = np.array(list(combinations(range(m), k)), dtype=np.int64).reshape(-1, k)
    cols = np.array(list(combinations(range(n), k)), dtype=np.int64).reshape(-1, k)
    R = np.repeat(rows, len(cols), axis=0)
    C = np.tile(cols, (len(rows), 1))
    return R, C


def minors(A, k: int, limit: int | None = None):
    """All ``k x k`` minors of ``A``.

    Returns ``(row_index_sets, col_index_sets, dets)``; ``dets`` is an array of
    Python ints (object dtype) so values are exact.
    """
    A = as_matrix(A)
    m, n = shape(A)
    if k < 1 or k > min(m, n):
        raise ValueError(f"minor order {k} out of range for a {m}x{n} matrix")
    total = math.comb(m, k) * math.comb(n, k)
    if total > (budget() if limit is None else limit):
        raise BudgetExceeded(f"{total} minors of order {k} exceed the budget")
    R, C = _submatrix_stack(A, k)
    maxabs = max((abs(x) for row in A for x in row), default=0)
    hadamard = float(maxabs) ** k * k ** (k / 2)
    if hadamard < _FLOAT_DET_SAFE and k <= 12:
        arr = np.array(A, dtype=np.float64)
        subs = arr[R[:, :, None], C[:, None, :]]
        dets = np.rint(np.linalg.det(subs)).astype(np.int64).astype(object)
    else:
        dets = np.array([det_exact([[A[i][j] for j in c] for i in r]) for r, c in zip(R, C)],
                        dtype=object)
    return R, C, dets


def delta_k(A, k: int) -> int:
    """Maximum absolute ``k x k`` minor."""
    _, _, dets = minors(A, k)
    return int(max(abs(d) for d in dets)) if len(dets) else 0


def delta(A) -> int:
    """Maximum absolute minor of order ``rank(A)``."""
    r = rank(A)
    return delta_k(A, r) if r else 0


def delta_max(A, max_order: int | None = None) -> int:
    """Maximum absolute minor over all orders up to ``max_order``."""
    A = as_matrix(A)
    top = min(shape(A)) if max_order is None else max_order
    return max((delta_k(A, k) for k in range(1, top + 1)), default=0)


@dataclass(frozen=True)
class SparsityStats:
    row_sparse: int
    col_sparse: int
    weak_row_sparse: int
    weak_col_sparse: int
    norm1: int          # max row l1-norm
    norm_inf: int       # max column l1-norm
    max_norm: int
    gamma1: int
    gamma_inf: int
    totn: int
    delta_k: tuple[int, ...]   # delta_k[k-1] is the max |k x k minor|
    delta_gcd: int
    detlb: tuple[int, int]     # (t, delta_t) maximising delta_t ** (1/t)

    @property
    def sparse(self) -> int:
        return min(self.row_sparse, self.col_sparse)

    @property
    def weak_sparse(self) -> int:
        return min(self.weak_row_sparse, self.weak_col_sparse)

    def delta(self, k: int) -> int:
        return self.delta_k[k - 1]


def sparsity_stats(A, max_minor_order: int | None = None) -> SparsityStats:
    """Sparsity, norm and subdeterminant parameters of ``A`` by brute force.

    Weak sparsities and the ``gamma`` norms range over nondegenerate square
    submatrices of order at most ``max_minor_order``.
    """
    A = as_matrix(A)
    m, n = shape(A)
    K = min(m, n) if max_minor_order is None else max_minor_order
    if K < 0 or K > min(m, n):
        raise ValueError(f"minor order {K} too large for a {m}x{n} matrix")
    total = sum(math.comb(m, k) * math.comb(n, k) for k in range(1, K + 1))
    if total > budget():
        raise BudgetExceeded(f"{total} submatrices exceed the budget")

    arr = np.array(A, dtype=object).reshape(m, n)
    nz = (np.array(A, dtype=np.int64).reshape(m, n) != 0) if m and n else np.zeros((m, n), bool)
    absA = np.abs(arr)
    row_sparse = int(nz.sum(axis=1).max()) if m and n else 0
    col_sparse = int(nz.sum(axis=0).max()) if m and n else 0
    norm1 = int(absA.sum(axis=1).max()) if m and n else 0
    norm_inf = int(absA.sum(axis=0).max()) if m and n else 0
    max_norm = int(absA.max()) if m and n else 0

    deltas, wr, wc, g1, ginf = [], 0, 0, 0, 0
    gcd_by_order = {}
    for k in range(1, K + 1):
        R, C, dets = minors(A, k, limit=total)
        good = np.array([d != 0 for d in dets], dtype=bool)
        deltas.append(int(max((abs(d) for d in dets), default=0)))
        gcd_by_order[k] = math.gcd(*(int(d) for d in dets)) if len(dets) else 0
        if good.any():
            Rg, Cg = R[good], C[good]
            sub_nz = nz[Rg[:, :, None], Cg[:, None, :]]
            sub_abs = np.abs(np.array(A, dtype=np.int64))[Rg[:, :, None], Cg[:, None, :]]
            wr = max(wr, int(sub_nz.sum(axis=2).max()))
            wc = max(wc, int(sub_nz.sum(axis=1).max()))
            g1 = max(g1, int(sub_abs.sum(axis=2).max()))
            ginf = max(ginf, int(sub_abs.sum(axis=1).max()))

    top = max((k for k in range(1, K + 1) if deltas[k - 1] > 0), default=0)
    delta_gcd = gcd_by_order.get(top, 0)
    detlb = (0, 0)
    for t in range(1, K + 1):
        d = deltas[t - 1]
        s, ds = detlb
        # d**(1/t) > ds**(1/s)  <=>  d**s > ds**t
        if s == 0 or d ** s > ds ** t:
            detlb = (t, d)
    return SparsityStats(
        row_sparse=row_sparse, col_sparse=col_sparse,
        weak_row_sparse=wr, weak_col_sparse=wc,
        norm1=norm1, norm_inf=norm_inf, max_norm=max_norm,
        gamma1=g1, gamma_inf=ginf, totn=min(g1, ginf),
        delta_k=tuple(deltas), delta_gcd=delta_gcd, detlb=detlb,
    )
