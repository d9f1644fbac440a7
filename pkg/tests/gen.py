"""Random fixture generators shared by the tests."""

import itertools
import random

from latcount.oracle import OracleUnbounded, auto_box, budget
from latcount.polyhedron import CanonicalSystem, is_bounded


def random_system(rng: random.Random, n_max=4, m_max=8, entry=3, rhs=6, n=None):
    n = n or rng.randint(1, n_max)
    m = rng.randint(1, m_max)
    A = [[rng.randint(-entry, entry) for _ in range(n)] for _ in range(m)]
    b = [rng.randint(-rhs, rhs) for _ in range(m)]
    return CanonicalSystem(A, b, n)


def iter_bounded(seed: int, **kw):
    """Endless stream of random bounded systems whose box the oracle can enumerate."""
    rng = random.Random(seed)
    while True:
        C = random_system(rng, **kw)
        if C.m >= C.n + 1 and is_bounded(C) and auto_box(C).volume <= budget():
            yield C


def bounded_systems(seed: int, count: int, **kw):
    """The first ``count`` systems of :func:`iter_bounded`."""
    return list(itertools.islice(iter_bounded(seed, **kw), count))


def oracle_boxable(seed: int, count: int, **kw):
    """Random systems the oracle can box (possibly empty, never unbounded)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        C = random_system(rng, **kw)
        try:
            auto_box(C)
        except OracleUnbounded:
            continue
        out.append(C)
    return out


def random_square(rng: random.Random, n: int, entry: int = 4, max_delta: int = 50):
    from latcount.linalg import det_exact
    while True:
        A = [[rng.randint(-entry, entry) for _ in range(n)] for _ in range(n)]
        d = det_exact(A)
        if d != 0 and abs(d) <= max_delta:
            return A
