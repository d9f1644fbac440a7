"""Brute-force ground truth by exhaustive enumeration of a box.

Nothing here calls into the counting pipeline or its linear algebra: the
bounding box comes from Fourier-Motzkin projection and points are tested by
plain integer matrix products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, LatcountError, budget


class OracleUnbounded(LatcountError):
    pass


@dataclass(frozen=True)
class BoxSpec:
    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("bound lengths differ")

    @property
    def empty(self) -> bool:
        return any(lo > hi for lo, hi in zip(self.lower, self.upper))

    @property
    def volume(self) -> int:
        if self.empty:
            return 0
        return math.prod(hi - lo + 1 for lo, hi in zip(self.lower, self.upper))


@dataclass(frozen=True)
class OracleResult:
    status: str                     # FEASIBLE | INFEASIBLE
    optimum: int | None = None
    witness: tuple[int, ...] | None = None
    count: int = 0


def _integer_rows(A, b) -> list[tuple[tuple[int, ...], int]]:
    """Rows ``a x <= beta`` rescaled to integers (``beta`` kept exact)."""
    out = []
    for row, beta in zip(A, b):
        beta = Fraction(beta)
        q = beta.denominator
        out.append((tuple(int(x) * q for x in row), beta.numerator))
    return out


def _normalise(a: tuple[int, ...], beta: int):
    g = math.gcd(*a, beta)
    if g > 1:
        return tuple(x // g for x in a), beta // g
    return a, beta


def _prune(rows):
    best: dict[tuple[int, ...], int] = {}
    for a, beta in rows:
        a, beta = _normalise(a, beta)
        if a not in best or beta < best[a]:
            best[a] = beta
    return list(best.items())


def _project(rows, n: int, keep: int):
    """Fourier-Motzkin elimination of every variable except ``keep``.

    Returns ``(lo, hi)`` as Fractions or None for an infinite side, or None
    when the real relaxation is empty.
    """
    cur = _prune(rows)
    for j in range(n):
        if j == keep:
            continue
        pos = [r for r in cur if r[0][j] > 0]
        neg = [r for r in cur if r[0][j] < 0]
        new = [r for r in cur if r[0][j] == 0]
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = ap[j], -an[j]
                a = tuple(ln * x + lp * y for x, y in zip(ap, an))
                new.append((a, ln * bp + lp * bn))
        cur = _prune(new)
    lo = hi = None
    for a, beta in cur:
        coef = a[keep]
        if coef == 0:
            if beta < 0:
                return None
            continue
        bound = Fraction(beta, coef)
        if coef > 0:
            hi = bound if hi is None else min(hi, bound)
        else:
            lo = bound if lo is None else max(lo, bound)
    if lo is not None and hi is not None and lo > hi:
        return None
    return lo, hi


def auto_box(C) -> BoxSpec:
    """Tightest integer box around the real polyhedron of ``C``.

    Raises OracleUnbounded if some coordinate is unbounded; an empty
    relaxation yields an empty box.
    """
    n = C.n
    rows = _integer_rows(C.A, C.b)
    lower, upper = [], []
    for i in range(n):
        res = _project(rows, n, i)
        if res is None:
            return BoxSpec((1,) * n, (0,) * n)
        lo, hi = res
        if lo is None or hi is None:
            raise OracleUnbounded(f"coordinate {i} is unbounded")
        lower.append(math.ceil(lo))
        upper.append(math.floor(hi))
    return BoxSpec(tuple(lower), tuple(upper))


_CHUNK = 1 << 18


def enumerate_points(C, box: BoxSpec | None = None, limit: int | None = None) -> list[tuple[int, ...]]:
    """Integer points of ``C`` inside ``box`` in lexicographic order."""
    if box is None:
        box = auto_box(C)
    vol = box.volume
    if vol == 0:
        return []
    cap = budget() if limit is None else limit
    if vol > cap:
        raise BudgetExceeded(f"box volume {vol} exceeds the budget {cap}")
    rows = _integer_rows(C.A, C.b)
    n = C.n
    dims = tuple(hi - lo + 1 for lo, hi in zip(box.lower, box.upper))
    lo = np.array(box.lower, dtype=np.int64)
    if not rows:
        M = np.zeros((0, n), dtype=np.int64)
        p = np.zeros(0, dtype=np.int64)
    else:
        M = np.array([a for a, _ in rows], dtype=object)
        p = np.array([beta for _, beta in rows], dtype=object)
    reach = max((abs(x) for x in box.lower + box.upper), default=0)
    big = max((abs(int(x)) for x in M.flat), default=0) * reach * max(n, 1)
    use_obj = big >= 2**62 or any(abs(int(x)) >= 2**62 for x in p.flat)
    if not use_obj:
        M = M.astype(np.int64)
        p = p.astype(np.int64)
    out: list[tuple[int, ...]] = []
    for start in range(0, vol, _CHUNK):
        idx = np.arange(start, min(vol, start + _CHUNK), dtype=np.int64)
        pts = np.stack(np.unravel_index(idx, dims), axis=1).astype(np.int64) + lo
        P = pts.astype(object) if use_obj else pts
        ok = np.all(P @ M.T <= p, axis=1) if len(p) else np.ones(len(pts), dtype=bool)
        out.extend(tuple(int(v) for v in row) for row in pts[ok])
    return out


enumerate = enumerate_points


def oracle_count(C, box: BoxSpec | None = None) -> int:
    return len(enumerate_points(C, box))


def oracle_optimize(C, c: Sequence[int], box: BoxSpec | None = None) -> OracleResult:
    return oracle_optcount(C, c, box)


def oracle_optcount(C, c: Sequence[int], box: BoxSpec | None = None) -> OracleResult:
    """Maximum of ``c x``, the first optimal point, and the number of optima."""
    pts = enumerate_points(C, box)
    if not pts:
        return OracleResult("INFEASIBLE")
    vals = [sum(ci * xi for ci, xi in zip(c, x)) for x in pts]
    best = max(vals)
    first = vals.index(best)
    return OracleResult("FEASIBLE", best, pts[first], vals.count(best))
