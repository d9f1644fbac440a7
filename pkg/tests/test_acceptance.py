"""Acceptance suite: one test per criterion, summarised as PASS/FAIL lines."""

import itertools
import math
import random
import sys
import time
from fractions import Fraction

import mpmath
import networkx as nx
import numpy as np
import pytest

from gen import iter_bounded, random_square
from latcount.counting import count_canonical
from latcount.genfun import (ShortRatExpFun, cone_genfun, cone_weights, constant_term,
                             constant_term_todd, evaluate_numeric, group_context, level_tables)
from latcount.hypergraph import (EDGE_MODES, MULTIMATCHING, SET_MULTICOVER, STABLE_MULTISET,
                                 VERTEX_MULTICOVER, HypergraphInstance, brute_force,
                                 dominating_multiset, encode_edge_based, encode_vertex_based,
                                 neighbourhood_hypergraph, solve, solve_standard)
from latcount.linalg import adjugate, delta, det_exact, hnf, matmul, minors, snf, sparsity_stats
from latcount.oracle import oracle_count, oracle_optcount
from latcount.polyhedron import CanonicalSystem, enumerate_vertices
from latcount.solver import FEASIBLE, feasible, optimize_and_count, oracle_call_cap

COUNT_FIXTURES = 500
OPT_FIXTURES = 300


def mixed_fixtures(seed, count):
    """Bounded fixtures, four in five of them nonempty."""
    pool = iter_bounded(seed)
    full, empty = [], []
    while len(full) + len(empty) < count:
        C = next(pool)
        if oracle_count(C):
            full.append(C)
        elif len(empty) < count // 5:
            empty.append(C)
    return full + empty


@pytest.fixture(scope="module")
def count_fixtures():
    return mixed_fixtures(20261018, COUNT_FIXTURES)


@pytest.fixture(scope="module")
def opt_fixtures():
    rng = random.Random(7)
    systems = mixed_fixtures(314159, OPT_FIXTURES)
    return [(C, tuple(rng.randint(-3, 3) for _ in range(C.n))) for C in systems]


@pytest.mark.criterion(1, "counting agrees with the oracle on 500 random bounded systems")
def test_c1_count_oracle_equivalence(count_fixtures):
    assert len(count_fixtures) >= 500
    assert all(C.n <= 4 and C.m <= 8 for C in count_fixtures)
    assert all(abs(x) <= 3 for C in count_fixtures for row in C.A for x in row)
    start = time.perf_counter()
    bad = []
    for C in count_fixtures:
        got, want = count_canonical(C).count, oracle_count(C)
        if got != want:
            bad.append((C, got, want))
    elapsed = time.perf_counter() - start
    nonzero = sum(oracle_count(C) > 0 for C in count_fixtures)
    print(f"criterion 1: {len(count_fixtures)} fixtures, {nonzero} nonempty, "
          f"{len(bad)} mismatches, {elapsed:.1f}s")
    assert not bad, bad[:3]
    assert elapsed < 300


@pytest.mark.criterion(2, "optimum and optimum count agree with the oracle on 300 fixtures")
def test_c2_optcount_oracle_equivalence(opt_fixtures):
    assert len(opt_fixtures) >= 300
    bad = []
    feasible_cases = 0
    for C, c in opt_fixtures:
        assert max(map(abs, c)) <= 3
        got, want = optimize_and_count(C, c), oracle_optcount(C, c)
        if want.status == FEASIBLE:
            feasible_cases += 1
            ok = (got.status, got.optimum, got.optima_count) == (want.status, want.optimum, want.count)
            ok = ok and C.contains(got.witness)
            ok = ok and sum(a * b for a, b in zip(c, got.witness)) == got.optimum
        else:
            ok = got.status == want.status
        if not ok:
            bad.append((C, c, got, want))
    print(f"criterion 2: {len(opt_fixtures)} fixtures, {feasible_cases} feasible, "
          f"{len(bad)} mismatches")
    assert not bad, bad[:3]


@pytest.mark.criterion(3, "simplex dilations count binomial(t+n, n)")
def test_c3_ehrhart_simplex():
    for n in range(1, 5):
        for t in range(7):
            rows = [[-int(i == j) for j in range(n)] for i in range(n)] + [[1] * n]
            C = CanonicalSystem(rows, [0] * n + [t])
            brute = sum(1 for x in itertools.product(range(t + 1), repeat=n) if sum(x) <= t)
            assert brute == math.comb(t + n, n) == oracle_count(C)
            assert count_canonical(C).count == brute, (n, t)


def _random_cone_with_direction(rng, n):
    A = random_square(rng, n, entry=4, max_delta=50)
    b = [rng.randint(-6, 6) for _ in range(n)]
    while True:
        c = [rng.randint(-5, 5) for _ in range(n)]
        _, w = cone_weights(A, c)
        if all(w):
            return A, b, c, w


@pytest.mark.criterion(4, "sliding-window recurrence equals naive convolution (100 systems)")
def test_c4_recurrence_equivalence():
    rng = random.Random(44)
    systems = 0
    nontrivial = 0
    while systems < 120:
        n = rng.randint(1, 4)
        A, b, c, w = _random_cone_with_direction(rng, n)
        ctx = group_context(A, b)
        assert abs(det_exact(A)) <= 50
        for use_numba in (False, True):
            slid, _, _ = level_tables(ctx, w, "sliding", use_numba, keep_all=True)
            naive, _, _ = level_tables(ctx, w, "naive", use_numba, keep_all=True)
            assert len(slid) == len(naive) == n
            for level, (s, t) in enumerate(zip(slid, naive)):
                assert np.array_equal(s, t), (A, b, c, level)
        f1 = cone_genfun(A, b, c, strict=False, method="sliding")
        f2 = cone_genfun(A, b, c, strict=False, method="naive")
        assert f1 == f2
        systems += 1
        nontrivial += ctx.order > 1
    print(f"criterion 4: {systems} systems, {nontrivial} with a nontrivial group")
    assert nontrivial >= 50


@pytest.mark.criterion(5, "Todd-polynomial constant term equals series division (50+ functions)")
def test_c5_constant_term_double_path():
    rng = random.Random(55)
    fs = []
    while len(fs) < 60:
        n = rng.randint(0, 4)
        betas = []
        while len(betas) < n:
            x = Fraction(rng.randint(-9, 9), rng.randint(1, 6))
            if x:
                betas.append(x)
        terms = [(rng.randint(-5, 5), Fraction(rng.randint(-12, 12), rng.randint(1, 6)))
                 for _ in range(rng.randint(1, 6))]
        fs.append(ShortRatExpFun.from_terms(terms, betas))
    while len(fs) < 80:
        n = rng.randint(1, 3)
        A, b, c, _ = _random_cone_with_direction(rng, n)
        fs.append(cone_genfun(A, b, c, strict=False))
    for f in fs:
        assert constant_term(f) == constant_term_todd(f), f
    print(f"criterion 5: {len(fs)} functions agree exactly")


def _truncated_check(A, b, c, tau):
    """Closed form versus the lattice sum over the cone cut at <c, z> >= top - T."""
    n = len(A)
    f = cone_genfun(A, b, c)
    d = det_exact(A)
    adj = adjugate(A)
    apex = [Fraction(sum(adj[i][j] * b[j] for j in range(n)), d) for i in range(n)]
    top = sum(ci * vi for ci, vi in zip(c, apex))
    # z = apex - A^{-1} s with s = b - A z a nonnegative integer vector
    u = [Fraction(sum(c[i] * adj[i][j] for i in range(n)), d) for j in range(n)]
    assert all(x > 0 for x in u)
    tau = Fraction(tau)
    with mpmath.workdps(40):
        t = mpmath.mpf(tau.numerator) / tau.denominator
        uf = [mpmath.mpf(x.numerator) / x.denominator for x in u]
        topf = mpmath.mpf(top.numerator) / top.denominator
        # sum_{u.s > T} e^{-t u.s} <= e^{-t T / 2} prod 1 / (1 - e^{-t u_i / 2})
        log_rest = topf * t - sum(mpmath.log(1 - mpmath.exp(-t * x / 2)) for x in uf)
        T = int(mpmath.ceil(2 * (log_rest + 12 * mpmath.log(10)) / t))
        tail = mpmath.exp(log_rest - t * T / 2)
        # slack vectors s >= 0 with u.s <= T; keep those with A^{-1}(b - s) integral
        scale = math.lcm(*(x.denominator for x in u))
        ui = np.array([int(x * scale) for x in u], dtype=np.int64)
        grid = np.stack(np.meshgrid(*[np.arange(T * scale // k + 1) for k in ui],
                                    indexing="ij"), -1).reshape(-1, n)
        grid = grid[grid @ ui <= T * scale]
        num = (np.array(b, dtype=np.int64) - grid) @ np.array(adj, dtype=np.int64).T
        grid = grid[np.all(num % d == 0, axis=1)]
        values = top - (grid.astype(object) @ np.array(u, dtype=object))
        pts = grid
        partial = mpmath.fsum(mpmath.exp(t * mpmath.mpf(v.numerator) / v.denominator)
                              for v in values)
        closed = evaluate_numeric(f, tau, dps=40)
        residual = closed - partial
    return residual, tail, len(pts)


@pytest.mark.criterion(6, "closed forms match truncated lattice sums on 5 cones")
def test_c6_convergence():
    rng = random.Random(66)
    cones = []
    while len(cones) < 5:
        n = 1 + len(cones) % 3
        A = random_square(rng, n, entry=3, max_delta=6)
        b = [rng.randint(-3, 3) for _ in range(n)]
        c = [sum(row[j] for row in A) for j in range(n)]
        cones.append((A, b, c))
    for A, b, c in cones:
        for tau in (1, Fraction(1, 2)):
            residual, tail, npts = _truncated_check(A, b, c, tau)
            assert -1e-30 <= residual <= tail + 1e-30, (A, b, c, tau, residual, tail)
            assert abs(residual) <= 1e-9
            print(f"criterion 6: A={A} tau={tau} points={npts} residual={float(residual):.1e}")


@pytest.mark.criterion(7, "vertex count at most 2^n totn(A)^n on every bounded fixture")
def test_c7_vertex_bound(count_fixtures):
    violations = []
    for C in count_fixtures:
        V = enumerate_vertices(C)
        totn = sparsity_stats(C.A, C.n).totn
        if len(V) > 2 ** C.n * totn ** C.n:
            violations.append(C)
    assert not violations


def _random_matrix(rng):
    m, n = rng.randint(1, 5), rng.randint(1, 5)
    entry = rng.choice([1, 3, 9])
    return [[rng.randint(-entry, entry) for _ in range(n)] for _ in range(m)]


@pytest.mark.criterion(8, "SNF and HNF identities on 1000 random matrices")
def test_c8_normal_forms():
    rng = random.Random(88)
    squares = 0
    for _ in range(1000):
        A = _random_matrix(rng)
        h = hnf(A)
        assert matmul(A, h.Q) == h.H and abs(det_exact(h.Q)) == 1
        n = rng.randint(1, 5)
        S_in = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        if rng.random() < 0.2:
            S_in[-1] = [2 * x for x in S_in[0]]
        d = snf(S_in)
        assert matmul(matmul(d.P, S_in), d.Q) == d.S
        assert abs(det_exact(d.P)) == 1 and abs(det_exact(d.Q)) == 1
        assert all(d.S[i][j] == 0 for i in range(n) for j in range(n) if i != j)
        diag = d.diagonal
        assert all(x >= 0 for x in diag)
        for a, b in zip(diag, diag[1:]):
            assert (b == 0) if a == 0 else (b % a == 0)
        assert abs(det_exact(S_in)) == math.prod(diag)
        squares += 1
    print(f"criterion 8: 1000 HNF and {squares} SNF decompositions verified")


K3 = [(0, 1), (1, 2), (0, 2)]
P3 = [(0, 1), (1, 2)]

HYPERGRAPH_CASES = [
    ("K3 stable, p=1", HypergraphInstance(3, K3, edge_upper=1), STABLE_MULTISET, (1, 3)),
    ("K3 stable, p=2", HypergraphInstance(3, K3, edge_upper=2), STABLE_MULTISET, (3, 1)),
    ("K3 vertex multicover", HypergraphInstance(3, K3, edge_lower=1), VERTEX_MULTICOVER, (2, 3)),
    ("set multicover", HypergraphInstance(2, [(0,), (0, 1)], vertex_lower=[2, 1]),
     SET_MULTICOVER, (2, 2)),
    ("P3 matching, p=1", HypergraphInstance(3, P3, vertex_upper=1), MULTIMATCHING, (1, 2)),
    ("P3 matching, p=2", HypergraphInstance(3, P3, vertex_upper=2), MULTIMATCHING, (2, 3)),
]

DOMINATING_CASES = [("K3", 3, K3, (1, 3)), ("two isolated vertices", 2, [], (2, 1)),
                    ("P3", 3, P3, (1, 1))]


def _oracle_on_encoding(H, mode):
    """Optimum and count of the ILP encoding by oracle enumeration."""
    enc = (encode_edge_based if mode in EDGE_MODES else encode_vertex_based)(H, mode)
    k = enc.system.n
    demands = [x for x in H.edge_lower + H.vertex_lower if x is not None]
    rows, rhs = [list(r) for r in enc.system.A], list(enc.system.b)
    if demands:
        # covering: no variable needs more than the largest demand
        for j in range(k):
            rows.append([int(i == j) for i in range(k)])
            rhs.append(max(demands))
    r = oracle_optcount(CanonicalSystem(rows, rhs, k), enc.objective)
    return (r.optimum if enc.sense == "max" else -r.optimum), r.count


@pytest.mark.criterion(9, "nine hypergraph examples reproduced and checked by exhaustion")
def test_c9_hypergraph_suite():
    done = 0
    for name, H, mode, want in HYPERGRAPH_CASES:
        r = solve(H, mode)
        assert (r.optimum, r.optima_count) == want, name
        assert brute_force(H, mode)[:2] == want, name
        assert _oracle_on_encoding(H, mode) == want, name
        if mode in (MULTIMATCHING, SET_MULTICOVER):
            s = solve_standard(H, mode)
            assert (s.optimum, s.optima_count) == want, name
        done += 1
    for name, nv, edges, want in DOMINATING_CASES:
        r = dominating_multiset(nv, edges)
        assert (r.optimum, r.optima_count) == want, name
        H = HypergraphInstance(nv, neighbourhood_hypergraph(nv, edges), vertex_lower=1)
        assert brute_force(H, SET_MULTICOVER)[:2] == want, name
        assert _oracle_on_encoding(H, SET_MULTICOVER) == want, name
        # plain exhaustion over multiplicities 0..2 of every vertex
        best = min(sum(x) for x in itertools.product(range(3), repeat=nv)
                   if all(sum(x[j] for j in S) >= 1 for S in H.edges))
        cnt = sum(1 for x in itertools.product(range(3), repeat=nv)
                  if sum(x) == best and all(sum(x[j] for j in S) >= 1 for S in H.edges))
        assert (best, cnt) == want, name
        done += 1
    assert done == 9


@pytest.mark.criterion(10, "feasibility recovery stays within the oracle-call cap")
def test_c10_solver_budget(count_fixtures, opt_fixtures):
    worst = 0.0
    checked = 0
    for C in list(count_fixtures) + [C for C, _ in opt_fixtures]:
        rep = feasible(C)
        # Delta of A (rank-order minors); never larger than the search window's
        cap = oracle_call_cap(C.n, delta(C.A))
        assert rep.oracle_calls <= cap, (C, rep.oracle_calls, cap)
        if rep.status == FEASIBLE:
            assert C.contains(rep.witness)
        worst = max(worst, rep.oracle_calls / cap)
        checked += 1
    print(f"criterion 10: {checked} instances, worst calls/cap = {worst:.2f}")


def _incidence(G):
    nodes = sorted(G.nodes)
    return [[int(v in e) for e in G.edges] for v in nodes]


@pytest.mark.criterion(11, "incidence matrices of graphs on at most 6 vertices: Delta <= 2^(v/3)")
def test_c11_incidence_determinants():
    graphs = [G for G in nx.graph_atlas_g() if 1 <= G.number_of_nodes() <= 6]
    assert len(graphs) == 1 + 2 + 4 + 11 + 34 + 156
    tight = 0
    for G in graphs:
        nu, m = G.number_of_nodes(), G.number_of_edges()
        if m < nu:
            continue
        _, _, dets = minors(_incidence(G), nu, limit=10 ** 6)
        top = max(abs(int(x)) for x in dets)
        assert top <= 2 ** (nu // 3), (nu, sorted(G.edges), top)
        tight += top == 2 ** (nu // 3)
    print(f"criterion 11: {len(graphs)} graphs, bound attained by {tight}")
    assert tight > 0


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
