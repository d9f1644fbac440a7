"""Multi-packing and multi-cover problems on hypergraphs.

Vertex-based problems put a variable on every vertex and a two-sided bound
on every hyperedge (``c_E <= sum_{v in E} x_v <= p_E``); edge-based problems
put a variable on every hyperedge and a bound on every vertex.  Missing
bounds (``None``) stand for minus or plus infinity and produce no row.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetExceeded, LatcountError, budget
from .polyhedron import CanonicalSystem, StandardSystem
from .solver import (FEASIBLE, INFEASIBLE, UNBOUNDED, SolveReport, optimize_and_count,
                     optimize_and_count_standard)

STABLE_MULTISET = "stable-multiset"
VERTEX_MULTICOVER = "vertex-multicover"
SET_MULTICOVER = "set-multicover"
MULTIMATCHING = "multimatching"
GENERAL_VERTEX = "general-vertex"
GENERAL_EDGE = "general-edge"

VERTEX_MODES = (STABLE_MULTISET, VERTEX_MULTICOVER, GENERAL_VERTEX)
EDGE_MODES = (MULTIMATCHING, SET_MULTICOVER, GENERAL_EDGE)
_SENSE = {STABLE_MULTISET: "max", MULTIMATCHING: "max",
          VERTEX_MULTICOVER: "min", SET_MULTICOVER: "min"}


class InconsistentBounds(LatcountError, ValueError):
    pass


def _bounds(values, count: int, name: str) -> tuple:
    if values is None:
        return (None,) * count
    if isinstance(values, int):
        values = (values,) * count
    values = tuple(None if v is None else int(v) for v in values)
    if len(values) != count:
        raise ValueError(f"{name} needs {count} entries")
    if any(v is not None and v < 0 for v in values):
        raise ValueError(f"finite {name} must be nonnegative")
    return values


@dataclass(frozen=True, init=False)
class HypergraphInstance:
    """Vertices ``0..nv-1`` and a multiset of nonempty hyperedges."""

    vertex_count: int
    edges: tuple[tuple[int, ...], ...]
    edge_lower: tuple
    edge_upper: tuple
    vertex_lower: tuple
    vertex_upper: tuple
    weights: tuple[int, ...] | None
    mult: tuple[int, ...] | None

    def __init__(self, vertex_count: int, edges: Iterable[Iterable[int]], *, edge_lower=None,
                 edge_upper=None, vertex_lower=None, vertex_upper=None, weights=None, mult=None):
        nv = int(vertex_count)
        if nv < 0:
            raise ValueError("vertex count must be nonnegative")
        E = []
        for e in edges:
            e = tuple(sorted(set(int(v) for v in e)))
            if not e:
                raise ValueError("hyperedges must be nonempty")
            if e[0] < 0 or e[-1] >= nv:
                raise ValueError(f"hyperedge {e} leaves the vertex set")
            E.append(e)
        ne = len(E)
        object.__setattr__(self, "vertex_count", nv)
        object.__setattr__(self, "edges", tuple(E))
        object.__setattr__(self, "edge_lower", _bounds(edge_lower, ne, "edge lower bounds"))
        object.__setattr__(self, "edge_upper", _bounds(edge_upper, ne, "edge upper bounds"))
        object.__setattr__(self, "vertex_lower", _bounds(vertex_lower, nv, "vertex lower bounds"))
        object.__setattr__(self, "vertex_upper", _bounds(vertex_upper, nv, "vertex upper bounds"))
        object.__setattr__(self, "weights", None if weights is None else tuple(int(w) for w in weights))
        object.__setattr__(self, "mult", None if mult is None else tuple(int(u) for u in mult))
        if self.mult is not None and any(u < 0 for u in self.mult):
            raise ValueError("multiplicities must be nonnegative")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def d1(self) -> int:
        """Largest vertex degree counting each distinct hyperedge once."""
        unique = set(self.edges)
        return max((sum(v in e for e in unique) for v in range(self.vertex_count)), default=0)

    @property
    def d2(self) -> int:
        """Largest hyperedge cardinality."""
        return max((len(e) for e in self.edges), default=0)

    def incidence_matrix(self) -> tuple[tuple[int, ...], ...]:
        """``nv x ne`` matrix with a 1 where the vertex lies in the hyperedge."""
        return tuple(tuple(int(v in e) for e in self.edges) for v in range(self.vertex_count))


def incidence_matrix(H: HypergraphInstance):
    return H.incidence_matrix()


@dataclass(frozen=True)
class Encoding:
    """An ILP ``max objective . x`` over ``system``; ``sense`` is the original goal."""

    system: CanonicalSystem
    objective: tuple[int, ...]
    sense: str


def _nvars(H: HypergraphInstance, mode: str) -> int:
    return H.vertex_count if mode in VERTEX_MODES else H.edge_count


def _mode_bounds(H: HypergraphInstance, mode: str):
    """Constraint lists (member sets, lower, upper) for the chosen mode."""
    if mode in VERTEX_MODES:
        members = H.edges
        lower, upper = H.edge_lower, H.edge_upper
    elif mode in EDGE_MODES:
        members = tuple(tuple(j for j, e in enumerate(H.edges) if v in e)
                        for v in range(H.vertex_count))
        lower, upper = H.vertex_lower, H.vertex_upper
    else:
        raise ValueError(f"unknown mode {mode!r}")
    packing = mode in (STABLE_MULTISET, MULTIMATCHING)
    covering = mode in (VERTEX_MULTICOVER, SET_MULTICOVER)
    if packing and any(x is not None for x in lower):
        raise InconsistentBounds(f"{mode} takes no lower bounds")
    if covering and any(x is not None for x in upper):
        raise InconsistentBounds(f"{mode} takes no upper bounds")
    for lo, hi in zip(lower, upper):
        if lo is not None and hi is not None and lo > hi:
            raise InconsistentBounds(f"lower bound {lo} exceeds upper bound {hi}")
    return members, lower, upper


def _objective(H: HypergraphInstance, mode: str, sense: str | None) -> tuple[tuple[int, ...], str]:
    k = _nvars(H, mode)
    w = H.weights if H.weights is not None else (1,) * k
    if len(w) != k:
        raise ValueError(f"{mode} needs {k} weights")
    sense = sense or _SENSE.get(mode, "max")
    if sense not in ("max", "min"):
        raise ValueError(f"unknown sense {sense!r}")
    return (tuple(w) if sense == "max" else tuple(-x for x in w)), sense


def _encode(H: HypergraphInstance, mode: str, sense: str | None) -> Encoding:
    members, lower, upper = _mode_bounds(H, mode)
    k = _nvars(H, mode)
    if k == 0:
        raise ValueError("problem has no variables")
    rows, rhs = [], []
    for S, lo, hi in zip(members, lower, upper):
        ind = tuple(int(j in S) for j in range(k))
        if hi is not None:
            rows.append(ind)
            rhs.append(hi)
        if lo is not None:
            rows.append(tuple(-x for x in ind))
            rhs.append(-lo)
    for j in range(k):
        rows.append(tuple(-int(i == j) for i in range(k)))
        rhs.append(0)
    if H.mult is not None:
        if len(H.mult) != k:
            raise ValueError(f"{mode} needs {k} multiplicities")
        for j in range(k):
            rows.append(tuple(int(i == j) for i in range(k)))
            rhs.append(H.mult[j])
    obj, sense = _objective(H, mode, sense)
    return Encoding(CanonicalSystem(rows, rhs, k), obj, sense)


def encode_vertex_based(H: HypergraphInstance, mode: str = STABLE_MULTISET,
                        sense: str | None = None) -> Encoding:
    """``c_E <= A(H)^T x <= p_E``, ``x >= 0`` over one variable per vertex."""
    if mode not in VERTEX_MODES:
        raise ValueError(f"{mode} is not a vertex-based mode")
    return _encode(H, mode, sense)


def encode_edge_based(H: HypergraphInstance, mode: str = MULTIMATCHING,
                      sense: str | None = None) -> Encoding:
    """``c_v <= A(H) x <= p_v``, ``x >= 0`` over one variable per hyperedge."""
    if mode not in EDGE_MODES:
        raise ValueError(f"{mode} is not an edge-based mode")
    return _encode(H, mode, sense)


@dataclass(frozen=True)
class StandardEncoding:
    """``max objective . (x, s)`` over a standard-form system with slacks ``s``."""

    system: StandardSystem
    objective: tuple[int, ...]
    sense: str
    edge_vars: int


def encode_edge_based_standard(H: HypergraphInstance, mode: str) -> StandardEncoding:
    """Slack form ``(A I)(x, s) = p`` (packing) or ``(-A I)(x, s) = -c`` (covering)."""
    if mode not in EDGE_MODES:
        raise ValueError(f"{mode} is not an edge-based mode")
    _, lower, upper = _mode_bounds(H, mode)
    nv, ne = H.vertex_count, H.edge_count
    inc = H.incidence_matrix()
    has_lo = [x is not None for x in lower]
    has_hi = [x is not None for x in upper]
    if any(a and b for a, b in zip(has_lo, has_hi)) or (any(has_lo) and any(has_hi)):
        raise InconsistentBounds("two-sided vertex bounds need the canonical encoding")
    packing = not any(has_lo)
    if packing and not all(has_hi):
        raise InconsistentBounds("every vertex needs a finite packing bound")
    ident = [tuple(int(i == j) for j in range(nv)) for i in range(nv)]
    if packing:
        A = [tuple(inc[v]) + ident[v] for v in range(nv)]
        b = list(upper)
    else:
        A = [tuple(-x for x in inc[v]) + ident[v] for v in range(nv)]
        b = [-(x or 0) for x in lower]
    u = None
    if H.mult is not None:
        if len(H.mult) != ne:
            raise ValueError(f"{mode} needs {ne} multiplicities")
        if packing:
            slack = list(upper)
        else:
            slack = [max(0, sum(H.mult[j] for j in range(ne) if inc[v][j]) - (lower[v] or 0))
                     for v in range(nv)]
        u = tuple(H.mult) + tuple(slack)
    obj, sense = _objective(H, mode, None)
    return StandardEncoding(StandardSystem(A, b, u, n=ne + nv), obj + (0,) * nv, sense, ne)


def _finish(rep: SolveReport, sense: str, k: int | None = None) -> SolveReport:
    if rep.status == FEASIBLE and sense == "min":
        rep.optimum = -rep.optimum
    if rep.witness is not None and k is not None:
        rep.witness = rep.witness[:k]
    return rep


def unbounded_packing(H: HypergraphInstance, mode: str, sense: str | None = None) -> bool:
    """Packing problem with a profitable variable that nothing caps.

    Packing problems have no lower bounds, so ``x = 0`` is feasible and such
    a variable makes the maximum infinite.
    """
    if mode not in (STABLE_MULTISET, MULTIMATCHING):
        return False
    members, _, upper = _mode_bounds(H, mode)
    obj, sense = _objective(H, mode, sense)
    if sense != "max" or H.mult is not None:
        return False
    capped = set()
    for S, hi in zip(members, upper):
        if hi is not None:
            capped.update(S)
    return any(o > 0 and j not in capped for j, o in enumerate(obj))


def solve(H: HypergraphInstance, mode: str, sense: str | None = None,
          method: str = "sliding") -> SolveReport:
    """Optimum, one optimal solution and the number of optimal solutions."""
    if unbounded_packing(H, mode, sense):
        return SolveReport(UNBOUNDED)
    enc = _encode(H, mode, sense)
    rep = optimize_and_count(enc.system, enc.objective, method)
    return _finish(rep, enc.sense)


def solve_standard(H: HypergraphInstance, mode: str, method: str = "sliding") -> SolveReport:
    enc = encode_edge_based_standard(H, mode)
    rep = optimize_and_count_standard(enc.system, enc.objective, method)
    return _finish(rep, enc.sense, enc.edge_vars)


def graph_hypergraph(vertex_count: int, edges: Iterable[tuple[int, int]]) -> HypergraphInstance:
    return HypergraphInstance(vertex_count, [tuple(e) for e in edges])


def neighbourhood_hypergraph(vertex_count: int, edges: Iterable[tuple[int, int]],
                             closed: bool = True) -> list[tuple[int, ...]]:
    adj = [set() for _ in range(vertex_count)]
    for a, b in edges:
        if a == b:
            raise ValueError("simple graphs have no loops")
        adj[a].add(b)
        adj[b].add(a)
    sets = []
    for v in range(vertex_count):
        s = adj[v] | ({v} if closed else set())
        if not s:
            raise ValueError(f"vertex {v} has an empty open neighbourhood")
        sets.append(tuple(sorted(s)))
    return sets


def dominating_multiset(vertex_count: int, edges: Iterable[tuple[int, int]], demand=1,
                        weights=None, mult=None, closed: bool = True,
                        method: str = "sliding") -> SolveReport:
    """Smallest multiset of vertices whose neighbourhoods cover ``v`` ``demand_v`` times.

    ``closed`` selects closed neighbourhoods ``N[v]`` (a vertex dominates
    itself) or open ones ``N(v)``.  Witness entry ``i`` is the multiplicity of
    vertex ``i``.
    """
    edges = list(edges)
    sets = neighbourhood_hypergraph(vertex_count, edges, closed)
    if isinstance(demand, int):
        demand = [demand] * vertex_count
    H = HypergraphInstance(vertex_count, sets, vertex_lower=demand, weights=weights, mult=mult)
    return solve(H, SET_MULTICOVER, method=method)


def glue_duplicates(H: HypergraphInstance) -> HypergraphInstance:
    """Merge identical hyperedges.

    Edge variables of equal hyperedges are glued into one (multiplicities add
    up, weights must agree); edge bounds keep the stronger of each side.
    """
    order: dict[tuple[int, ...], list[int]] = {}
    for j, e in enumerate(H.edges):
        order.setdefault(e, []).append(j)
    groups = list(order.values())

    def pick(vals, fn):
        vals = [v for v in vals if v is not None]
        return fn(vals) if vals else None

    w = None
    if H.weights is not None:
        w = []
        for g in groups:
            ws = {H.weights[j] for j in g}
            if len(ws) > 1:
                raise ValueError("cannot glue hyperedges with different weights")
            w.append(ws.pop())
    mult = None if H.mult is None else [sum(H.mult[j] for j in g) for g in groups]
    return HypergraphInstance(
        H.vertex_count, [H.edges[g[0]] for g in groups],
        edge_lower=[pick([H.edge_lower[j] for j in g], max) for g in groups],
        edge_upper=[pick([H.edge_upper[j] for j in g], min) for g in groups],
        vertex_lower=H.vertex_lower, vertex_upper=H.vertex_upper, weights=w, mult=mult)


# --------------------------------------------------------------------------
# exhaustive check


def _var_caps(H: HypergraphInstance, mode: str) -> list[int]:
    members, lower, upper = _mode_bounds(H, mode)
    k = _nvars(H, mode)
    caps: list[int | None] = [None] * k
    for S, hi in zip(members, upper):
        if hi is not None:
            for j in S:
                caps[j] = hi if caps[j] is None else min(caps[j], hi)
    cover = max((x for x in lower if x is not None), default=0)
    out = []
    for j in range(k):
        cap = caps[j]
        if cap is None:
            # a single variable never needs to exceed the largest demand
            cap = cover
        if H.mult is not None:
            cap = min(cap, H.mult[j])
        out.append(cap)
    return out


def brute_force(H: HypergraphInstance, mode: str, sense: str | None = None):
    """``(optimum, count, first optimal x)`` by exhaustion, or None if infeasible.

    Variable ranges come from the finite bounds; for covering the range is
    capped at the largest demand, which keeps every optimum when all weights
    are positive.
    """
    members, lower, upper = _mode_bounds(H, mode)
    k = _nvars(H, mode)
    obj, sense = _objective(H, mode, sense)
    caps = _var_caps(H, mode)
    vol = math.prod(c + 1 for c in caps)
    if vol > budget():
        raise BudgetExceeded(f"{vol} candidate solutions exceed the budget")
    best, count, arg = None, 0, None
    for x in itertools.product(*(range(c + 1) for c in caps)):
        ok = True
        for S, lo, hi in zip(members, lower, upper):
            s = sum(x[j] for j in S)
            if (lo is not None and s < lo) or (hi is not None and s > hi):
                ok = False
                break
        if not ok:
            continue
        val = sum(o * xi for o, xi in zip(obj, x))
        if best is None or val > best:
            best, count, arg = val, 1, x
        elif val == best:
            count += 1
    if best is None:
        return None
    return (best if sense == "max" else -best), count, arg
