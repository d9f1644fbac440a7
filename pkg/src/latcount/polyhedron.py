"""Polyhedra given by ``Ax <= b`` or ``Ax = b, 0 <= x (<= u)``.

All transformations here preserve the set of integer points (or map it
bijectively through a recorded affine map).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain, combinations
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import BudgetExceeded, LatcountError, budget
from .linalg import (Matrix, as_matrix, det_exact, hnf, identity, kernel_vector, matmul, minors,
                     rank, sparsity_stats)


class UnboundedPolyhedron(LatcountError):
    pass


class DegenerateVertexError(LatcountError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def floor_frac(x) -> int:
    x = _frac(x)
    return x.numerator // x.denominator


@dataclass(frozen=True, init=False)
class CanonicalSystem:
    """``{x in R^n : A x <= b}`` with integer ``A`` and rational ``b``.

    Rows whose entries share a factor ``g > 1`` are divided by ``g`` on
    construction (together with their right-hand side).
    """

    A: Matrix
    b: tuple[Fraction, ...]
    n: int

    def __init__(self, A, b, n: int | None = None):
        A = as_matrix(A)
        b = tuple(_frac(x) for x in b)
        if len(A) != len(b):
            raise ValueError(f"{len(A)} rows but {len(b)} right-hand sides")
        if n is None:
            if not A:
                raise ValueError("n is required for a system without rows")
            n = len(A[0])
        if any(len(r) != n for r in A):
            raise ValueError("row length does not match n")
        rows, rhs = [], []
        for row, beta in zip(A, b):
            g = math.gcd(*row) if row else 0
            if g > 1:
                row = tuple(x // g for x in row)
                beta = beta / g
            rows.append(row)
            rhs.append(beta)
        object.__setattr__(self, "A", tuple(rows))
        object.__setattr__(self, "b", tuple(rhs))
        object.__setattr__(self, "n", n)

    @property
    def m(self) -> int:
        return len(self.A)

    def with_rows(self, rows, rhs) -> "CanonicalSystem":
        return CanonicalSystem(self.A + as_matrix(rows), self.b + tuple(rhs), self.n)

    def contains(self, x: Sequence) -> bool:
        return all(sum(a * xi for a, xi in zip(row, x)) <= beta
                   for row, beta in zip(self.A, self.b))

    def floored(self) -> "CanonicalSystem":
        """Same integer points, integer right-hand side."""
        return CanonicalSystem(self.A, [floor_frac(x) for x in self.b], self.n)


@dataclass(frozen=True, init=False)
class StandardSystem:
    """``{x : A x = b, x >= 0}`` optionally with ``x <= u``.

    Linearly dependent rows are dropped on construction so that
    ``rank(A) == k``.  If a dropped row is inconsistent with the rest the
    original rows are kept and ``consistent`` is False (the system is empty).
    """

    A: Matrix
    b: tuple[Fraction, ...]
    n: int
    u: tuple[int, ...] | None = None
    consistent: bool = True

    def __init__(self, A, b, u=None, n: int | None = None):
        A = as_matrix(A)
        b = tuple(_frac(x) for x in b)
        if len(A) != len(b):
            raise ValueError(f"{len(A)} rows but {len(b)} right-hand sides")
        if n is None:
            if not A:
                raise ValueError("n is required for a system without rows")
            n = len(A[0])
        if u is not None:
            u = tuple(int(x) for x in u)
            if len(u) != n or any(x < 0 for x in u):
                raise ValueError("multiplicities must be n nonnegative integers")
        keep, r = [], 0
        for i in range(len(A)):
            if rank([A[j] for j in keep] + [A[i]]) > r:
                keep.append(i)
                r += 1
        consistent = True
        if len(keep) < len(A):
            aug = [A[i] + (0,) for i in range(len(A))]
            # compare rank of [A | b] with rank of A using integer scaling
            den = math.lcm(*(x.denominator for x in b)) if b else 1
            aug = [A[i] + (int(b[i] * den),) for i in range(len(A))]
            consistent = rank(aug) == r
        if consistent:
            A = tuple(A[i] for i in keep)
            b = tuple(b[i] for i in keep)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "consistent", consistent)

    @property
    def k(self) -> int:
        return len(self.A)

    def contains(self, x: Sequence) -> bool:
        if any(xi < 0 for xi in x):
            return False
        if self.u is not None and any(xi > ui for xi, ui in zip(x, self.u)):
            return False
        return all(sum(a * xi for a, xi in zip(row, x)) == beta
                   for row, beta in zip(self.A, self.b))


def standard_to_canonical(S: StandardSystem) -> CanonicalSystem:
    n = S.n
    rows, rhs = [], []
    for row, beta in zip(S.A, S.b):
        rows.append(row)
        rhs.append(beta)
        rows.append(tuple(-x for x in row))
        rhs.append(-beta)
    for i in range(n):
        rows.append(tuple(-int(i == j) for j in range(n)))
        rhs.append(0)
    if S.u is not None:
        for i in range(n):
            rows.append(tuple(int(i == j) for j in range(n)))
            rhs.append(S.u[i])
    return CanonicalSystem(rows, rhs, n)


# --------------------------------------------------------------------------
# vertices


@dataclass(frozen=True)
class Vertex:
    point: tuple[Fraction, ...]
    basis: tuple[int, ...]
    basis_det: int
    tight: tuple[int, ...] = field(default=())

    @property
    def simple(self) -> bool:
        return len(self.tight) == len(self.basis)


def _scaled_rhs(b: Sequence[Fraction]) -> tuple[int, list[int]]:
    den = math.lcm(*(x.denominator for x in b)) if b else 1
    return den, [int(x * den) for x in b]


def _cramer(AJ: Matrix, rhs: Sequence[int]) -> tuple[int, list[int]]:
    d = det_exact(AJ)
    n = len(AJ)
    nums = []
    for j in range(n):
        Mj = [row[:j] + (rhs[i],) + row[j + 1:] for i, row in enumerate(AJ)]
        nums.append(det_exact(Mj))
    return d, nums


def _combinations(m: int, k: int, total: int) -> np.ndarray:
    flat = np.fromiter(chain.from_iterable(combinations(range(m), k)), dtype=np.int64,
                       count=total * k)
    return flat.reshape(total, k)


def _candidate_bases(A: Matrix, b: Sequence[Fraction], n: int):
    """Row bases that pass the float feasibility prefilter, with float solutions."""
    m = len(A)
    total = math.comb(m, n)
    if total > budget():
        raise BudgetExceeded(f"{total} row bases exceed the budget")
    subsets = _combinations(m, n, total)
    if not len(subsets):
        return subsets, np.zeros((0, n))
    Af = np.array(A, dtype=np.float64).reshape(m, n)
    bf = np.array([float(x) for x in b], dtype=np.float64)
    _, ok = _kernels.basis_scan(Af, bf, subsets)
    subsets = subsets[ok]
    xs = np.linalg.solve(Af[subsets], bf[subsets][..., None])[..., 0] if len(subsets) \
        else np.zeros((0, n))
    return subsets, xs


def enumerate_vertices(C: CanonicalSystem, check_bounded: bool = True) -> list[Vertex]:
    """All vertices of a bounded polyhedron by an exhaustive basis scan.

    Vertices reached from several bases are merged; ``basis`` is the first
    basis in lexicographic order and ``tight`` lists every row tight there.
    """
    if check_bounded and not is_bounded(C):
        raise UnboundedPolyhedron("polyhedron is unbounded")
    A, n = C.A, C.n
    if len(A) < n:
        return []
    den, bi = _scaled_rhs(C.b)
    subsets, xs = _candidate_bases(A, C.b, n)
    found: dict[tuple[Fraction, ...], Vertex] = {}
    # a degenerate vertex is reached from many bases; a basis inside the
    # tight set of a known vertex determines that vertex, so skip Cramer
    near: dict[tuple[float, ...], list[frozenset]] = {}
    keys = (np.round(xs, 6) + 0.0).tolist()
    for J, key in zip(subsets.tolist(), keys):
        J = tuple(J)
        key = tuple(key)
        if any(set(J) <= T for T in near.get(key, ())):
            continue
        AJ = tuple(A[j] for j in J)
        d, nums = _cramer(AJ, [bi[j] for j in J])
        if d == 0:
            continue
        # A x <= b  <=>  A @ nums <= d * bi  (times sign d)
        sgn = 1 if d > 0 else -1
        tight, feasible = [], True
        for i, row in enumerate(A):
            lhs = sum(a * v for a, v in zip(row, nums))
            rhs = d * bi[i]
            if lhs == rhs:
                tight.append(i)
            elif sgn * lhs > sgn * rhs:
                feasible = False
                break
        if not feasible:
            continue
        point = tuple(Fraction(v, d * den) for v in nums)
        if point not in found:
            found[point] = Vertex(point, J, d, tuple(tight))
            near.setdefault(key, []).append(frozenset(tight))
    return sorted(found.values(), key=lambda v: v.basis)


def is_bounded(C_or_A, n: int | None = None) -> bool:
    """Whether ``{x : A x <= 0} = {0}``, i.e. every ``Ax <= b`` is bounded."""
    if isinstance(C_or_A, CanonicalSystem):
        A, n = C_or_A.A, C_or_A.n
    else:
        A = as_matrix(C_or_A)
        n = len(A[0]) if n is None else n
    m = len(A)
    if m == 0 or rank(A) < n:
        return False
    Ai = np.array(A, dtype=object).reshape(m, n)
    if n == 1:
        col = [row[0] for row in A]
        return any(x > 0 for x in col) and any(x < 0 for x in col)
    rays = _edge_directions(A, n)
    if not len(rays):
        return True
    prod = Ai.dot(rays.T)
    pos = np.all(prod <= 0, axis=0)
    neg = np.all(prod >= 0, axis=0)
    nonzero = np.any(rays != 0, axis=1)
    return not bool(np.any((pos | neg) & nonzero))


def _edge_directions(A: Matrix, n: int) -> np.ndarray:
    """Kernel vectors of every ``(n-1)``-row subset (exact, object dtype)."""
    m = len(A)
    total = math.comb(m, n - 1)
    if total > budget():
        raise BudgetExceeded(f"{total} row subsets exceed the budget")
    subs = _combinations(m, n - 1, total)
    maxabs = max((abs(x) for row in A for x in row), default=0)
    k = n - 1
    if float(maxabs) ** k * k ** (k / 2) < 2.0**40:
        stack = np.array(A, dtype=np.float64)[subs]
        out = np.empty((len(subs), n), dtype=np.int64)
        for j in range(n):
            minor = np.delete(stack, j, axis=2)
            out[:, j] = (-1) ** j * np.rint(np.linalg.det(minor)).astype(np.int64)
        return out.astype(object)
    return np.array([kernel_vector([A[i] for i in S]) for S in subs], dtype=object)


def has_improving_ray(C: CanonicalSystem, c: Sequence[int]) -> bool:
    """Whether some ``d`` with ``A d <= 0`` has ``c.d > 0``."""
    n = C.n
    if not any(c):
        return False
    rows = list(C.A) + [tuple(int(i == j) for j in range(n)) for i in range(n)] \
        + [tuple(-int(i == j) for j in range(n)) for i in range(n)]
    capped = CanonicalSystem(rows, [0] * C.m + [1] * (2 * n), n)
    verts = enumerate_vertices(capped, check_bounded=False)
    return any(sum(ci * xi for ci, xi in zip(c, v.point)) > 0 for v in verts)


# --------------------------------------------------------------------------
# full-dimension reduction


@dataclass(frozen=True)
class AffineMap:
    """``x_original = M @ x_reduced + t``."""

    M: Matrix
    t: tuple[int, ...]

    def __call__(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(a * xi for a, xi in zip(row, x)) + ti for row, ti in zip(self.M, self.t))

    def compose(self, M2: Matrix, t2: Sequence[int]) -> "AffineMap":
        """Map for ``x_reduced = M2 @ x_new + t2``."""
        M = matmul(self.M, M2) if M2 and M2[0] else tuple(() for _ in self.M)
        t = tuple(sum(a * x for a, x in zip(row, t2)) + ti for row, ti in zip(self.M, self.t))
        return AffineMap(M, t)


@dataclass(frozen=True)
class Reduction:
    system: CanonicalSystem | None
    lift: AffineMap
    status: str   # "ok" | "point" | "empty" | "integer-infeasible"
    vertices: tuple[Vertex, ...] = ()


def _explicit_equality(C: CanonicalSystem) -> int | None:
    """Index of a row ``a x <= beta`` whose negation ``-a x <= -beta`` is also present."""
    rows = {}
    for i, (row, beta) in enumerate(zip(C.A, C.b)):
        rows.setdefault((row, beta), i)
    for i, (row, beta) in enumerate(zip(C.A, C.b)):
        if any(row) and (tuple(-x for x in row), -beta) in rows:
            return i
    return None


def _substitute(sys: CanonicalSystem, j: int, lift: AffineMap):
    """Solve row ``j`` as an equality by a unimodular change of variables.

    Returns ``(system, lift, status)`` with status ``None`` while work remains.
    """
    bj = sys.b[j]
    if bj.denominator != 1:
        return None, lift, "integer-infeasible"
    bj = int(bj)
    Q = hnf([sys.A[j]]).Q
    AQ = matmul(sys.A, Q)
    assert AQ[j][0] == 1 and not any(AQ[j][1:])
    rows, rhs = [], []
    for i, row in enumerate(AQ):
        if i == j:
            continue
        beta = sys.b[i] - bj * row[0]
        rest = row[1:]
        if not any(rest):
            if beta < 0:
                return None, lift, "empty"
            continue
        rows.append(rest)
        rhs.append(beta)
    M2 = tuple(r[1:] for r in Q)
    t2 = tuple(r[0] * bj for r in Q)
    lift = lift.compose(M2, t2)
    if sys.n == 1:
        return None, lift, "point"
    if not rows:
        raise UnboundedPolyhedron("reduction produced an unbounded system")
    return CanonicalSystem(rows, rhs, sys.n - 1), lift, None


def reduce_to_full_dim(C: CanonicalSystem) -> Reduction:
    """Eliminate implicit equalities of a bounded system by unimodular substitution.

    Equalities written as a pair of opposite rows are removed first, without
    enumerating vertices; the remaining ones are the rows tight at every vertex.
    """
    n0 = C.n
    lift = AffineMap(identity(n0), (0,) * n0)
    sys = C
    while (j := _explicit_equality(sys)) is not None:
        sys, lift, status = _substitute(sys, j, lift)
        if status is not None:
            return Reduction(None, lift, status)
    while True:
        verts = enumerate_vertices(sys, check_bounded=False)
        if not verts:
            return Reduction(None, lift, "empty")
        common = set(verts[0].tight)
        for v in verts[1:]:
            common &= set(v.tight)
        if not common:
            return Reduction(sys, lift, "ok", tuple(verts))
        sys, lift, status = _substitute(sys, min(common), lift)
        if status is not None:
            return Reduction(None, lift, status)


# --------------------------------------------------------------------------
# simplicity


def _perturb(C: CanonicalSystem, eps: Fraction, max_tries: int):
    base = C.floored()
    for _ in range(max_tries):
        b = [beta + eps ** (i + 1) for i, beta in enumerate(base.b)]
        P = CanonicalSystem(base.A, b, base.n)
        verts = enumerate_vertices(P, check_bounded=False)
        if all(len(v.tight) == P.n for v in verts):
            return P, verts
        eps /= 2
    raise LatcountError("perturbation did not produce a simple polytope")


def perturb_to_simple(C: CanonicalSystem, eps: Fraction = Fraction(1, 4),
                      max_tries: int = 64) -> CanonicalSystem:
    """Integrally equivalent simple polytope ``A x <= floor(b) + (eps, eps^2, ...)``.

    ``C`` must be full-dimensional and bounded.  Since ``A`` is integral and
    ``eps < 1`` no integer point is gained or lost; ``eps`` is halved until
    every vertex has exactly ``n`` tight rows.
    """
    return _perturb(C, Fraction(eps), max_tries)[0]


@dataclass(frozen=True)
class TangentCone:
    A: Matrix
    b: tuple[int, ...]
    vertex: Vertex


def tangent_cone(C: CanonicalSystem, v: Vertex) -> TangentCone:
    """Cone of the rows tight at a simple vertex; right-hand side floored."""
    if len(v.tight) != C.n:
        raise DegenerateVertexError(f"vertex {v.point} has {len(v.tight)} tight rows")
    J = v.tight
    return TangentCone(tuple(C.A[j] for j in J), tuple(floor_frac(C.b[j]) for j in J), v)


# --------------------------------------------------------------------------
# unbounded systems


def box_bound(C: CanonicalSystem) -> int:
    """``(n+1) * Delta_ext`` with ``Delta_ext`` the largest minor of ``(A | floor b)``."""
    F = C.floored()
    ext = [row + (int(beta),) for row, beta in zip(F.A, F.b)]
    top = min(len(ext), C.n + 1)
    try:
        dext = max(max(abs(int(d)) for d in minors(ext, k)[2]) for k in range(1, top + 1))
    except BudgetExceeded:
        mx = max(abs(x) for row in ext for x in row)
        dext = math.isqrt(top ** top) + 1
        dext *= mx ** top
    return (C.n + 1) * max(dext, 1)


def box_if_unbounded(C: CanonicalSystem) -> CanonicalSystem:
    if is_bounded(C):
        return C
    n = C.n
    B = box_bound(C)
    rows = [tuple(int(i == j) for j in range(n)) for i in range(n)] + \
           [tuple(-int(i == j) for j in range(n)) for i in range(n)]
    return C.with_rows(rows, [B] * (2 * n))


def vertex_count_bound(C: CanonicalSystem) -> int:
    """``min(2^n totn(A)^n, (2 maxnorm)^n wsparse^n)``; needs ``rank(A) = n``."""
    n = C.n
    st = sparsity_stats(C.A, min(C.m, n))
    return min(2 ** n * st.totn ** n, (2 * st.max_norm) ** n * st.weak_sparse ** n)
