import itertools
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gen import random_square
from latcount.errors import DirectionError, SingularMatrixError
from latcount.genfun import (ShortRatExpFun, bernoulli_numbers, cone_constant_term, cone_genfun,
                             cone_parameters, constant_term, constant_term_todd, evaluate_numeric,
                             group_context, level_tables, todd_polynomials)
from latcount.linalg import det_exact


def test_short_rat_exp_fun_construction():
    f = ShortRatExpFun.from_terms([(1, Fraction(1, 2)), (2, Fraction(-1, 3))], [Fraction(-1, 6)])
    assert f.scale == 6 and f.exponents == (3, -2) and f.denominator == (-1,)
    assert f.alphas == (Fraction(1, 2), Fraction(-1, 3)) and f.n == 1
    with pytest.raises(ValueError):
        ShortRatExpFun((1,), (), ())
    with pytest.raises(ValueError):
        ShortRatExpFun((1,), (0,), (), 0)


def test_constant_term_examples():
    geo = ShortRatExpFun((1,), (0,), (-1,))
    assert constant_term(geo) == Fraction(1, 2)
    seg = ShortRatExpFun.from_terms([(1, 0)], [1])
    seg2 = ShortRatExpFun.from_terms([(1, 2)], [-1])
    assert constant_term(seg) + constant_term(seg2) == 3
    pure = ShortRatExpFun((2, -5, 4), (1, 7, -3), ())
    assert constant_term(pure) == 1
    with pytest.raises(ValueError):
        constant_term(ShortRatExpFun((1,), (0,), (0,)))


@pytest.mark.parametrize("N", range(0, 8))
def test_segment_brion_pair(N):
    f0 = ShortRatExpFun.from_terms([(1, 0)], [1])
    fN = ShortRatExpFun.from_terms([(1, N)], [-1])
    assert constant_term(f0) + constant_term(fN) == N + 1
    assert constant_term_todd(f0) + constant_term_todd(fN) == N + 1


def test_bernoulli_and_todd():
    assert bernoulli_numbers(4) == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    assert todd_polynomials([5, 7], 0) == [1]
    assert todd_polynomials([Fraction(3, 2)], 1) == [1, Fraction(3, 4)]
    b1, b2 = Fraction(2), Fraction(-3)
    td = todd_polynomials([b1, b2], 2)
    assert td[1] == (b1 + b2) / 2
    assert td[2] == (b1 ** 2 + b2 ** 2) / 12 + b1 * b2 / 4
    with pytest.raises(ValueError):
        todd_polynomials([1], -1)


def test_todd_matches_generating_product():
    betas = [Fraction(1, 2), Fraction(-2, 3), Fraction(5, 4)]
    td = todd_polynomials(betas, 3)
    with mpmath.workdps(40):
        t = mpmath.mpf("0.001")
        prod = mpmath.fprod(mpmath.mpf(b.numerator) / b.denominator * t
                            / (1 - mpmath.exp(-mpmath.mpf(b.numerator) / b.denominator * t))
                            for b in betas)
        poly = sum(mpmath.mpf(c.numerator) / c.denominator * t ** j for j, c in enumerate(td))
        assert abs(prod - poly) < 1e-11


rat = st.fractions(min_value=-4, max_value=4, max_denominator=5)


@settings(max_examples=150)
@given(st.lists(st.tuples(st.integers(-3, 3), rat), max_size=5),
       st.lists(rat.filter(lambda x: x != 0), max_size=4))
def test_constant_term_paths_agree(terms, betas):
    f = ShortRatExpFun.from_terms(terms, betas)
    assert constant_term(f) == constant_term_todd(f)


def test_evaluate_numeric_examples():
    geo = ShortRatExpFun((1,), (0,), (-1,))
    assert abs(evaluate_numeric(geo, math.log(2)) - 2) < 1e-12
    assert evaluate_numeric(ShortRatExpFun((1,), (3,), ()), 0) == 1
    with pytest.raises(ValueError):
        evaluate_numeric(geo, 0)
    with pytest.raises(ValueError):
        evaluate_numeric(geo, -1)


def test_cone_genfun_examples():
    f = cone_genfun([[1]], [0], [1])
    assert (f.coeffs, f.alphas, f.betas) == ((1,), (0,), (-1,))
    f = cone_genfun([[2]], [1], [1])
    assert abs(evaluate_numeric(f, 1) - 1 / (1 - math.exp(-1))) < 1e-12
    f = cone_genfun([[1, 0], [0, 1]], [2, 2], [1, 1])
    assert (f.coeffs, f.alphas, f.betas) == ((1,), (4,), (-1, -1))
    trunc = sum(math.exp(x + y) for x in range(-60, 3) for y in range(-60, 3))
    assert abs(evaluate_numeric(f, 1) - trunc) < 1e-9


def test_cone_genfun_errors():
    with pytest.raises(DirectionError):
        cone_genfun([[1, 0], [0, 1]], [0, 0], [1, -1])
    with pytest.raises(DirectionError):
        cone_genfun([[1, 0], [0, 1]], [0, 0], [1, 0], strict=False)
    with pytest.raises(SingularMatrixError):
        cone_genfun([[1, 2], [2, 4]], [0, 0], [1, 1])


def test_group_context():
    ctx = group_context([[2, 0], [0, 3]], [1, 1])
    assert ctx.order == 6 and ctx.delta == 6 and ctx.moduli == (6,)
    assert sorted(ctx.generator_order(k) for k in range(2)) == [2, 3]
    for k in range(2):
        cos = ctx.cosets(k)
        assert sorted(cos.ravel().tolist()) == list(range(6))
    unimod = group_context([[1, 1], [0, 1]], [3, 4])
    assert unimod.order == 1 and unimod.moduli == ()


def _random_cone(rng, n):
    A = random_square(rng, n, entry=3, max_delta=50)
    b = [rng.randint(-5, 5) for _ in range(n)]
    while True:
        c = [rng.randint(-4, 4) for _ in range(n)]
        try:
            cone_genfun(A, b, c, strict=False)
            return A, b, c
        except DirectionError:
            continue


def test_numerator_nonnegative_and_in_window():
    rng = random.Random(2)
    for _ in range(40):
        n = rng.randint(1, 3)
        A, b, c = _random_cone(rng, n)
        f = cone_genfun(A, b, c, strict=False)
        assert all(isinstance(e, int) and e > 0 for e in f.coeffs)
        p = cone_parameters(A, c)
        sgn = 1 if det_exact(A) > 0 else -1
        from latcount.linalg import adjugate
        adj = adjugate(A)
        K = sgn * sum(c[i] * adj[i][j] * b[j] for i in range(n) for j in range(n))
        bound = n * p["sigma"] * p["chi"]
        assert all(-bound <= K - e <= bound for e in f.exponents)


def test_level_recurrences_agree():
    rng = random.Random(3)
    for _ in range(30):
        n = rng.randint(1, 3)
        A, b, c = _random_cone(rng, n)
        from latcount.genfun import cone_weights
        _, w = cone_weights(A, c)
        ctx = group_context(A, b)
        slid, _, _ = level_tables(ctx, w, "sliding", use_numba=False, keep_all=True)
        naive, _, _ = level_tables(ctx, w, "naive", use_numba=False, keep_all=True)
        for s, t in zip(slid, naive):
            assert np.array_equal(s, t)


def _brute_cone_count(A, b, lo, hi):
    n = len(A)
    return sum(1 for z in itertools.product(range(lo, hi + 1), repeat=n)
               if all(sum(a * x for a, x in zip(row, z)) <= bi for row, bi in zip(A, b)))


def test_cone_constant_term_representations_agree():
    rng = random.Random(8)
    for _ in range(40):
        n = rng.randint(1, 3)
        A, b, c = _random_cone(rng, n)
        dense = cone_constant_term(A, b, c, representation="dense")
        series = cone_constant_term(A, b, c, representation="series")
        naive = cone_constant_term(A, b, c, method="naive", representation="series")
        assert dense == series == naive
    with pytest.raises(ValueError):
        cone_constant_term([[1]], [0], [1], representation="sparse")


def test_unit_box_brion_sum():
    # the four corner cones of [0,2]^2 with c = (1, 2)
    total = Fraction(0)
    corners = [([[-1, 0], [0, -1]], [0, 0]), ([[1, 0], [0, -1]], [2, 0]),
               ([[-1, 0], [0, 1]], [0, 2]), ([[1, 0], [0, 1]], [2, 2])]
    for A, b in corners:
        total += constant_term(cone_genfun(A, b, [1, 2], strict=False))
    assert total == 9
