import itertools
import random

import pytest

from gen import oracle_boxable
from latcount.errors import BudgetExceeded
from latcount.oracle import oracle_count, oracle_optcount
from latcount.polyhedron import CanonicalSystem, StandardSystem, standard_to_canonical
from latcount.solver import (FEASIBLE, INFEASIBLE, UNBOUNDED, feasible, feasible_standard,
                             optimize, optimize_and_count, optimize_and_count_standard,
                             optimize_standard, oracle_call_cap, proximity_delta,
                             standard_dp_optimize)

SQUARE = CanonicalSystem([[1, 0], [-1, 0], [0, 1], [0, -1]], [2, 0, 2, 0])
TRIANGLE = CanonicalSystem([[-1, 0], [0, -1], [1, 1]], [0, 0, 3])
SEGMENT = CanonicalSystem([[1], [-1]], [5, 0])
PARITY = CanonicalSystem([[2], [-2]], [3, -3])


def test_feasible_examples():
    r = feasible(TRIANGLE)
    assert r.status == FEASIBLE and TRIANGLE.contains(r.witness)
    assert feasible(PARITY).status == INFEASIBLE and feasible(PARITY).witness is None
    r = feasible(CanonicalSystem([[-1, 0], [0, -1], [1, -1], [-1, 1]], [-3, 0, 0, 0]))
    assert r.status == FEASIBLE and r.witness[0] == r.witness[1] >= 3


def test_optimize_examples():
    r = optimize(TRIANGLE, (1, 1))
    assert (r.status, r.optimum) == (FEASIBLE, 3) and sum(r.witness) == 3
    r = optimize(SQUARE, (1, -1))
    assert (r.optimum, r.witness) == (2, (2, 0))
    assert optimize(PARITY, (1,)).status == INFEASIBLE


def test_optimize_and_count_examples():
    r = optimize_and_count(TRIANGLE, (1, 1))
    assert (r.optimum, r.optima_count) == (3, 4) and TRIANGLE.contains(r.witness)
    r = optimize_and_count(SQUARE, (0, 0))
    assert (r.optimum, r.optima_count) == (0, 9)
    r = optimize_and_count(SEGMENT, (1,))
    assert (r.optimum, r.optima_count, r.witness) == (5, 1, (5,))


def test_unbounded_objectives():
    quadrant = CanonicalSystem([[-1, 0], [0, -1]], [0, 0])
    assert optimize(quadrant, (1, 0)).status == UNBOUNDED
    r = optimize_and_count(quadrant, (-1, -2))
    assert (r.status, r.optimum, r.optima_count) == (FEASIBLE, 0, 1)
    # unbounded region, bounded objective reached through the exponential search
    strip = CanonicalSystem([[1, 0], [-1, 0], [0, -1]], [4, 0, 0])
    r = optimize_and_count(strip, (1, -1))
    assert (r.status, r.optimum, r.optima_count) == (FEASIBLE, 4, 1)
    r = optimize(CanonicalSystem([[1, -1], [-1, 1], [-1, 0], [0, 1]], [0, 0, 0, 7]), (1, 1))
    assert (r.status, r.optimum) == (FEASIBLE, 14)


def test_random_agreement_and_call_cap():
    rng = random.Random(17)
    for C in oracle_boxable(18, 60):
        c = tuple(rng.randint(-3, 3) for _ in range(C.n))
        want = oracle_optcount(C, c)
        got = optimize_and_count(C, c)
        assert got.status == want.status
        if want.status == FEASIBLE:
            assert (got.optimum, got.optima_count) == (want.optimum, want.count)
            assert C.contains(got.witness)
            assert sum(a * b for a, b in zip(c, got.witness)) == got.optimum
        f = feasible(C)
        assert (f.status == FEASIBLE) == (oracle_count(C) > 0)
        d = proximity_delta(C)
        assert d is not None and f.oracle_calls <= oracle_call_cap(C.n, d)


def test_call_cap_formula():
    assert oracle_call_cap(1, 1) == 1 * (2 * 2 + 2)
    assert oracle_call_cap(2, 3) == 2 * (2 * 4 + 2)


def test_standard_dp_examples():
    S = StandardSystem([[1, 1]], [3])
    assert standard_dp_optimize(S, (1, 0)).optimum == 3
    assert standard_dp_optimize(StandardSystem([[1, 1]], [3], u=[2, 2]), (1, 0)).optimum == 2
    r = standard_dp_optimize(StandardSystem([[2, 3]], [7]), (0, 1))
    assert (r.optimum, r.witness) == (1, (2, 1))
    assert standard_dp_optimize(StandardSystem([[2]], [3]), (1,)).status == INFEASIBLE
    # a zero column with positive weight and no cap
    assert standard_dp_optimize(StandardSystem([[1, 0]], [2]), (0, 1)).status == UNBOUNDED
    r = standard_dp_optimize(StandardSystem([[1, 0]], [2], u=[5, 4]), (1, 1))
    assert (r.optimum, r.witness) == (6, (2, 4))


def test_standard_dp_errors(monkeypatch):
    with pytest.raises(ValueError):
        standard_dp_optimize(StandardSystem([[1, -1]], [2]), (1, 1))
    with pytest.raises(ValueError):
        standard_dp_optimize(StandardSystem([[1, 1]], [-2]), (1, 1))
    monkeypatch.setenv("LATCOUNT_BUDGET", "10")
    with pytest.raises(BudgetExceeded):
        standard_dp_optimize(StandardSystem([[1, 1], [1, 2]], [20, 20]), (1, 1))


@pytest.mark.parametrize("use_numba", [False, True])
def test_cross_solver_agreement(use_numba):
    rng = random.Random(31)
    for _ in range(40):
        k, n = rng.randint(1, 2), rng.randint(1, 4)
        A = [[rng.randint(0, 3) for _ in range(n)] for _ in range(k)]
        b = [rng.randint(0, 7) for _ in range(k)]
        u = [rng.randint(0, 3) for _ in range(n)] if rng.random() < 0.5 else None
        S = StandardSystem(A, b, u)
        w = tuple(rng.randint(-3, 3) for _ in range(n))
        dp = standard_dp_optimize(S, w, use_numba=use_numba)
        if dp.status == UNBOUNDED:
            assert optimize_standard(S, w).status == UNBOUNDED
            continue
        via = optimize_standard(S, w)
        assert dp.status == via.status
        if dp.status == FEASIBLE:
            assert dp.optimum == via.optimum and S.contains(dp.witness)
            assert sum(a * x for a, x in zip(w, dp.witness)) == dp.optimum


def test_standard_wrappers():
    S = StandardSystem([[1, 1]], [3])
    assert feasible_standard(S).status == FEASIBLE
    r = optimize_and_count_standard(S, (1, 1))
    assert (r.optimum, r.optima_count) == (3, 4)
    bad = StandardSystem([[1, 1], [1, 1]], [3, 4])
    assert feasible_standard(bad).status == INFEASIBLE
    assert optimize_standard(bad, (1, 1)).status == INFEASIBLE
    assert optimize_and_count_standard(bad, (1, 1)).status == INFEASIBLE
    C = standard_to_canonical(S)
    assert optimize(C, (1, 0)).optimum == 3
