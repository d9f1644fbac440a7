"""Exact integer-point counting for ``A x <= b``.

The bounded full-dimensional case is handled by summing, over the vertices
of an integrally equivalent simple polytope, the constant terms of the
tangent-cone generating functions (Brion's identity evaluated along one
direction ``c``).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import DirectionError
from .genfun import cone_constant_term, cone_parameters, cone_weights
from .polyhedron import (CanonicalSystem, StandardSystem, Vertex, _perturb, box_if_unbounded,
                         floor_frac, is_bounded, reduce_to_full_dim, standard_to_canonical,
                         tangent_cone)


class _Infinite:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITE"

    __str__ = __repr__

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass
class CountReport:
    count: int | _Infinite
    vertex_count: int = 0
    delta_used: int = 0
    sigma_max: int = 0
    chi_max: int = 0
    dimension: int = 0
    direction: tuple[int, ...] | None = None
    per_vertex: list[dict] = field(default_factory=list)

    @property
    def infinite(self) -> bool:
        return self.count is INFINITE

    @property
    def positive(self) -> bool:
        return self.count is INFINITE or self.count > 0


def _preprocess(C: CanonicalSystem):
    """Floor the right-hand side, drop zero rows and duplicates.

    Returns the cleaned system, or None when a zero row is violated.
    """
    best: dict[tuple[int, ...], int] = {}
    for row, beta in zip(C.A, C.b):
        fb = floor_frac(beta)
        if not any(row):
            if fb < 0:
                return None
            continue
        if row not in best or fb < best[row]:
            best[row] = fb
    rows = sorted(best)
    return CanonicalSystem(rows, [best[r] for r in rows], C.n)


def direction_ok(c: Sequence[int], cones: Sequence[Sequence[Sequence[int]]]) -> bool:
    """Every cone weight ``<c, h_i>`` is nonzero for every cone matrix."""
    return all(all(w != 0 for w in cone_weights(A, c)[1]) for A in cones)


def choose_direction(C: CanonicalSystem, vertices: Sequence[Vertex],
                     start_rows: Sequence[int] | None = None, seed: int = 0,
                     max_tries: int = 200) -> tuple[int, ...]:
    """Direction ``c`` usable for every vertex cone of ``C``.

    Starts from the sum of ``n`` linearly independent rows (the basis of the
    first vertex unless ``start_rows`` is given) and, while some cone weight
    vanishes, adds random small positive combinations of those rows.
    """
    cones = [[C.A[j] for j in v.tight] for v in vertices]
    basis = list(start_rows) if start_rows is not None else list(vertices[0].basis)
    B = [C.A[j] for j in basis]
    n = C.n
    c0 = tuple(sum(row[i] for row in B) for i in range(n))
    if direction_ok(c0, cones):
        return c0
    rng = random.Random(seed)
    for attempt in range(max_tries):
        span = 2 + attempt // 8
        lam = [rng.randint(1, span) for _ in B]
        c = tuple(c0[i] + sum(l * row[i] for l, row in zip(lam, B)) for i in range(n))
        if direction_ok(c, cones):
            return c
    raise DirectionError("no admissible direction found")


def _count_bounded(P: CanonicalSystem, method: str, representation: str,
                   use_numba) -> CountReport:
    # substitution can create rows with a common factor whose floored
    # right-hand side exposes new implicit equalities, so iterate
    while True:
        red = reduce_to_full_dim(P)
        if red.status in ("empty", "integer-infeasible"):
            return CountReport(0, dimension=0)
        if red.status == "point":
            return CountReport(1, vertex_count=1, dimension=0)
        Q = _preprocess(red.system)
        if Q is None:
            return CountReport(0, dimension=0)
        if Q.A == red.system.A and Q.b == red.system.b:
            break
        P = Q
    simple, verts = _perturb(Q, Fraction(1, 4), 64)
    c = choose_direction(simple, verts)
    total = Fraction(0)
    rep = CountReport(0, vertex_count=len(verts), dimension=Q.n, direction=c)
    for v in verts:
        cone = tangent_cone(simple, v)
        ct = cone_constant_term(cone.A, cone.b, c, method, representation, use_numba=use_numba)
        total += ct
        par = cone_parameters(cone.A, c)
        rep.delta_used = max(rep.delta_used, par["delta"])
        rep.sigma_max = max(rep.sigma_max, par["sigma"])
        rep.chi_max = max(rep.chi_max, par["chi"])
        rep.per_vertex.append({"vertex": v.point, **par, "constant": ct})
    if total.denominator != 1:
        raise ArithmeticError(f"Brion sum {total} is not an integer")
    rep.count = int(total)
    return rep


def count_canonical(C: CanonicalSystem, method: str = "sliding", representation: str = "auto",
                    use_numba: bool | None = None) -> CountReport:
    """``|{x in Z^n : A x <= b}|`` or ``INFINITE``.

    ``method`` selects the level recurrence (``"sliding"`` or ``"naive"``);
    ``representation`` is passed to ``cone_constant_term``.
    """
    P = _preprocess(C)
    if P is None:
        return CountReport(0)
    if P.m == 0:
        return CountReport(INFINITE, dimension=C.n)
    if not is_bounded(P):
        rep = _count_bounded(box_if_unbounded(P), method, representation, use_numba)
        rep.count = INFINITE if rep.count > 0 else 0
        return rep
    return _count_bounded(P, method, representation, use_numba)


def count_standard(S: StandardSystem, method: str = "sliding", representation: str = "auto",
                   use_numba: bool | None = None) -> CountReport:
    """``|{x in Z^n : A x = b, 0 <= x (<= u)}|``."""
    if not S.consistent:
        return CountReport(0)
    return count_canonical(standard_to_canonical(S), method, representation, use_numba)
