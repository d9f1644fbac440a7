"""Feasibility, optimisation and optimum counting on top of the counter.

Every decision is a question "does this system have an integer point?",
answered by the counting routine.  Points are recovered one coordinate at a
time by binary search, objectives by binary search on a slab ``c x >= alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .counting import INFINITE, count_canonical
from .errors import BudgetExceeded, LatcountError, budget
from .linalg import delta_max
from .polyhedron import (CanonicalSystem, StandardSystem, box_if_unbounded, enumerate_vertices,
                         has_improving_ray, is_bounded, standard_to_canonical)

FEASIBLE = "FEASIBLE"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"


@dataclass
class SolveReport:
    status: str
    witness: tuple[int, ...] | None = None
    optimum: int | None = None
    optima_count: object = None
    oracle_calls: int = 0


class _Oracle:
    """Counts calls to the integer-point existence test."""

    def __init__(self, method: str, use_numba):
        self.calls = 0
        self.method = method
        self.use_numba = use_numba

    def positive(self, C: CanonicalSystem) -> bool:
        self.calls += 1
        return count_canonical(C, method=self.method, use_numba=self.use_numba).positive


def _unit(n: int, i: int, s: int = 1) -> tuple[int, ...]:
    return tuple(s if j == i else 0 for j in range(n))


def _restrict(C: CanonicalSystem, a: Sequence[int], lo=None, hi=None) -> CanonicalSystem:
    """Add ``lo <= a x <= hi`` (either side optional)."""
    rows, rhs = [], []
    if hi is not None:
        rows.append(tuple(a))
        rhs.append(hi)
    if lo is not None:
        rows.append(tuple(-x for x in a))
        rhs.append(-lo)
    return C.with_rows(rows, rhs) if rows else C


def proximity_delta(C: CanonicalSystem) -> int | None:
    """Largest minor of ``A`` over all orders up to ``n``; None if too costly."""
    try:
        return max(delta_max(C.A, min(C.m, C.n)), 1)
    except BudgetExceeded:
        return None


def oracle_call_cap(n: int, delta: int) -> int:
    """Allowed existence tests for one coordinate-wise point recovery."""
    return n * (2 * math.ceil(math.log2(2 * n * delta + 1)) + 2)


def _lp_range(C: CanonicalSystem, i: int):
    verts = enumerate_vertices(C, check_bounded=False)
    vals = [v.point[i] for v in verts]
    return verts[0].point, math.ceil(min(vals)), math.floor(max(vals))


def _recover_point(P: CanonicalSystem, oracle: _Oracle, delta: int | None) -> tuple[int, ...]:
    """Integer point of the bounded, integer-feasible ``P``."""
    n = P.n
    cur = P
    z: list[int] = []
    for i in range(n):
        v, lp_lo, lp_hi = _lp_range(cur, i)
        lo, hi = lp_lo, lp_hi
        if delta is not None:
            r = n * delta
            lo = max(lo, math.floor(v[i] - r))
            hi = min(hi, math.ceil(v[i] + r))
            if not oracle.positive(_restrict(cur, _unit(n, i), lo, hi)):
                lo, hi = lp_lo, lp_hi
        # smallest z with a point in lo <= x_i <= z; the top value always works
        a, b = lo, hi
        while a < b:
            mid = (a + b) // 2
            if oracle.positive(_restrict(cur, _unit(n, i), lo, mid)):
                b = mid
            else:
                a = mid + 1
        z.append(a)
        cur = _restrict(cur, _unit(n, i), a, a)
    return tuple(z)


def feasible(C: CanonicalSystem, method: str = "sliding", use_numba: bool | None = None) -> SolveReport:
    """Decide integer feasibility and return a witness point when feasible."""
    oracle = _Oracle(method, use_numba)
    P = C if is_bounded(C) else box_if_unbounded(C)
    if not oracle.positive(P):
        return SolveReport(INFEASIBLE, oracle_calls=oracle.calls)
    w = _recover_point(P, oracle, proximity_delta(P))
    if not C.contains(w):
        raise LatcountError(f"recovered point {w} violates the system")
    return SolveReport(FEASIBLE, witness=w, oracle_calls=oracle.calls)


def _dot(c, x):
    return sum(ci * xi for ci, xi in zip(c, x))


def _optimum(C: CanonicalSystem, c: Sequence[int], oracle: _Oracle, method, use_numba):
    """``(status, optimum)`` of ``max c x`` over the integer points of ``C``."""
    n = C.n
    c = tuple(int(x) for x in c)
    if len(c) != n:
        raise ValueError("objective length does not match the system")
    bounded = is_bounded(C)
    P = C if bounded else box_if_unbounded(C)
    if not oracle.positive(P):
        return INFEASIBLE, None
    if not any(c):
        return FEASIBLE, 0
    if not bounded and has_improving_ray(C, c):
        return UNBOUNDED, None
    if bounded:
        verts = enumerate_vertices(C, check_bounded=False)
        lo = math.ceil(min(_dot(c, v.point) for v in verts))
        hi = math.floor(max(_dot(c, v.point) for v in verts))
    else:
        w = feasible(C, method, use_numba)
        oracle.calls += w.oracle_calls
        lo = _dot(c, w.witness)
        step = 1
        while oracle.positive(_restrict(C, c, lo + step)):
            step *= 2
        hi = lo + step - 1
    # largest alpha with an integer point in alpha <= c x <= hi
    best_yes, best_no = lo, hi + 1
    a, b = lo, hi
    while a < b:
        mid = (a + b + 1) // 2
        if oracle.positive(_restrict(C, c, mid, hi)):
            a = mid
            best_yes = max(best_yes, mid)
        else:
            b = mid - 1
            best_no = min(best_no, mid)
        if best_yes >= best_no:
            raise LatcountError("slab feasibility is not monotone")
    return FEASIBLE, a


def optimize(C: CanonicalSystem, c: Sequence[int], method: str = "sliding",
             use_numba: bool | None = None) -> SolveReport:
    """Maximise ``c x`` over the integer points of ``C``."""
    oracle = _Oracle(method, use_numba)
    status, opt = _optimum(C, c, oracle, method, use_numba)
    if status != FEASIBLE:
        return SolveReport(status, oracle_calls=oracle.calls)
    w = feasible(_restrict(C, c, opt, opt), method, use_numba)
    return SolveReport(FEASIBLE, w.witness, opt, oracle_calls=oracle.calls + w.oracle_calls)


def optimize_and_count(C: CanonicalSystem, c: Sequence[int], method: str = "sliding",
                       use_numba: bool | None = None) -> SolveReport:
    """Optimum of ``c x``, one optimal point, and the number of optimal points."""
    rep = optimize(C, c, method, use_numba)
    if rep.status != FEASIBLE:
        return rep
    face = _restrict(C, c, rep.optimum, rep.optimum)
    rep.optima_count = count_canonical(face, method=method, use_numba=use_numba).count
    rep.oracle_calls += 1
    return rep


# --------------------------------------------------------------------------
# dynamic program for nonnegative standard form


def standard_dp_optimize(S: StandardSystem, w: Sequence[int],
                         use_numba: bool | None = None) -> SolveReport:
    """``max w x`` s.t. ``A x = b, 0 <= x (<= u)`` for ``A >= 0``, ``b >= 0``.

    A table over all right-hand sides ``0 <= y <= b`` is filled one column at
    a time; each column may be used up to its multiplicity.
    """
    w = [int(x) for x in w]
    n = S.n
    if len(w) != n:
        raise ValueError("objective length does not match the system")
    if any(x < 0 for row in S.A for x in row):
        raise ValueError("standard_dp_optimize needs a nonnegative matrix")
    if any(Fraction(x).denominator != 1 or x < 0 for x in S.b):
        raise ValueError("standard_dp_optimize needs a nonnegative integer right-hand side")
    if not S.consistent:
        return SolveReport(INFEASIBLE)
    b = [int(x) for x in S.b]
    k = len(b)
    dims = tuple(x + 1 for x in b)
    N = math.prod(dims)
    if N > budget():
        raise BudgetExceeded(f"table of {N} states exceeds the budget")
    coords = np.indices(dims).reshape(k, -1).T.astype(np.int64) if k else np.zeros((1, 0), np.int64)
    radix = [math.prod(dims[i + 1:]) for i in range(k)]
    table = np.full(N, _kernels.NEG, dtype=np.int64)
    table[0] = 0
    takes: list[np.ndarray | None] = []
    unbounded = False
    free_gain = 0
    for j in range(n):
        col = [S.A[i][j] for i in range(k)]
        u = -1 if S.u is None else S.u[j]
        if not any(col):
            takes.append(None)
            if w[j] > 0:
                if u < 0:
                    unbounded = True
                else:
                    free_gain += w[j] * u
            continue
        offset = sum(a * r for a, r in zip(col, radix))
        table, take = _kernels.knapsack_layer(table, coords, np.array(col), offset, w[j], u,
                                              use_numba)
        takes.append(take)
    target = sum(x * r for x, r in zip(b, radix))
    if table[target] <= _kernels.NEG // 2:
        return SolveReport(INFEASIBLE)
    if unbounded:
        return SolveReport(UNBOUNDED)
    x = [0] * n
    y = target
    for j in range(n - 1, -1, -1):
        if takes[j] is None:
            x[j] = S.u[j] if (S.u is not None and w[j] > 0) else 0
            continue
        t = int(takes[j][y])
        x[j] = t
        y -= t * sum(S.A[i][j] * radix[i] for i in range(k))
    x = tuple(x)
    if not S.contains(x):
        raise LatcountError(f"reconstructed point {x} violates the system")
    return SolveReport(FEASIBLE, x, int(table[target]) + free_gain)


def optimize_standard(S: StandardSystem, w: Sequence[int], method: str = "sliding",
                      use_numba: bool | None = None) -> SolveReport:
    """``max w x`` over a standard-form system via the canonical route."""
    if not S.consistent:
        return SolveReport(INFEASIBLE)
    return optimize(standard_to_canonical(S), w, method, use_numba)


def optimize_and_count_standard(S: StandardSystem, w: Sequence[int], method: str = "sliding",
                                use_numba: bool | None = None) -> SolveReport:
    if not S.consistent:
        return SolveReport(INFEASIBLE)
    return optimize_and_count(standard_to_canonical(S), w, method, use_numba)


def feasible_standard(S: StandardSystem, method: str = "sliding",
                      use_numba: bool | None = None) -> SolveReport:
    if not S.consistent:
        return SolveReport(INFEASIBLE)
    return feasible(standard_to_canonical(S), method, use_numba)


__all__ = ["FEASIBLE", "INFEASIBLE", "UNBOUNDED", "INFINITE", "SolveReport", "feasible",
           "optimize", "optimize_and_count", "standard_dp_optimize", "optimize_standard",
           "optimize_and_count_standard", "feasible_standard", "oracle_call_cap",
           "proximity_delta"]
