"""Exponential generating functions of lattice points in simplicial cones.

For a nonsingular integer ``A`` and integer ``b`` the points ``z`` of
``A z <= b`` correspond to slacks ``s = b - A z >= 0`` lying in a fixed coset
of ``A Z^n``.  After a Smith normal form ``S = P A Q`` that coset condition
reads ``sum s_i g_i = g_0`` in the finite group ``G = Z^n / S Z^n``, and the
sum of ``exp(<c, z> tau)`` splits into a finite polynomial (computed by a
level-by-level dynamic program over ``G``) divided by geometric factors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DirectionError, SingularMatrixError
from .linalg import Matrix, as_matrix, adjugate, det_exact, snf

_INT64_SAFE = 2**62


# --------------------------------------------------------------------------
# closed forms


@dataclass(frozen=True)
class ShortRatExpFun:
    """``sum_i eps_i e^{alpha_i tau} / prod_j (1 - e^{beta_j tau})``.

    Exponents are stored as integers over a shared positive ``scale``:
    ``alpha_i = exponents[i] / scale`` and ``beta_j = denominator[j] / scale``.
    """

    coeffs: tuple[int, ...]
    exponents: tuple[int, ...]
    denominator: tuple[int, ...]
    scale: int = 1

    def __post_init__(self):
        if len(self.coeffs) != len(self.exponents):
            raise ValueError("coefficient and exponent counts differ")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @classmethod
    def from_terms(cls, terms, betas=()) -> "ShortRatExpFun":
        """Build from ``(eps, alpha)`` pairs and ``beta`` values, all rational."""
        terms = [(int(e), Fraction(a)) for e, a in terms]
        betas = [Fraction(x) for x in betas]
        scale = math.lcm(1, *(a.denominator for _, a in terms), *(x.denominator for x in betas))
        return cls(tuple(e for e, _ in terms), tuple(int(a * scale) for _, a in terms),
                   tuple(int(x * scale) for x in betas), scale)

    @property
    def n(self) -> int:
        return len(self.denominator)

    @property
    def alphas(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.scale) for a in self.exponents)

    @property
    def betas(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.scale) for x in self.denominator)

    @property
    def numerator_terms(self) -> list[tuple[int, Fraction]]:
        return list(zip(self.coeffs, self.alphas))


def evaluate_numeric(f: ShortRatExpFun, tau, dps: int = 50):
    """High-precision value of ``f`` at ``tau`` (an ``mpmath.mpf``)."""
    import mpmath

    with mpmath.workdps(dps):
        t = mpmath.mpf(Fraction(tau).numerator) / Fraction(tau).denominator
        if t < 0 or (t == 0 and f.denominator):
            raise ValueError("tau must be positive")
        num = mpmath.fsum(e * mpmath.exp(mpmath.mpf(a) * t / f.scale)
                          for e, a in zip(f.coeffs, f.exponents) if e)
        den = mpmath.fprod(1 - mpmath.exp(mpmath.mpf(x) * t / f.scale) for x in f.denominator)
        return +(num / den)


def _exp_series_sums(f: ShortRatExpFun, order: int) -> list[Fraction]:
    """Coefficients ``N_j = sum eps a^j / j!`` of the numerator, ``j <= order``."""
    sums = [0] * (order + 1)
    for e, a in zip(f.coeffs, f.exponents):
        if e:
            p = e
            for j in range(order + 1):
                sums[j] += p
                p *= a
    return [Fraction(s, math.factorial(j)) for j, s in enumerate(sums)]


def constant_term(f: ShortRatExpFun) -> Fraction:
    """The ``tau^0`` coefficient of the Laurent expansion of ``f`` at 0.

    Works on the integer-scaled exponents (the constant term does not change
    under ``tau -> tau / scale``) by dividing truncated power series.
    """
    if any(x == 0 for x in f.denominator):
        raise ValueError("zero denominator exponent")
    return _series_constant(_exp_series_sums(f, f.n), f.denominator)


def _series_constant(N: Sequence[Fraction], denominator: Sequence[int]) -> Fraction:
    """``[tau^n] N(tau) / D(tau)`` with ``D = prod (1 - e^{beta tau}) / tau``."""
    n = len(denominator)
    # D = prod (1 - e^{beta tau}) / tau, each factor -sum beta^{j+1} tau^j / (j+1)!
    D = [Fraction(1)] + [Fraction(0)] * n
    for beta in denominator:
        fac = [Fraction(-beta ** (j + 1), math.factorial(j + 1)) for j in range(n + 1)]
        D = [sum(D[i] * fac[j - i] for i in range(j + 1)) for j in range(n + 1)]
    q: list[Fraction] = []
    for j in range(n + 1):
        acc = N[j] - sum(D[i] * q[j - i] for i in range(1, j + 1))
        q.append(acc / D[0])
    return q[n]


def bernoulli_numbers(k: int) -> list[Fraction]:
    """``B_0..B_k`` with ``B_1 = -1/2``."""
    B = [Fraction(1)]
    for m in range(1, k + 1):
        B.append(-sum(math.comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return B


def todd_polynomials(betas: Sequence, up_to_degree: int) -> list[Fraction]:
    """``td_0..td_d`` with ``prod beta tau / (1 - e^{-beta tau}) = sum td_j tau^j``."""
    if up_to_degree < 0:
        raise ValueError("degree must be nonnegative")
    d = up_to_degree
    B = bernoulli_numbers(d)
    out = [Fraction(1)] + [Fraction(0)] * d
    for beta in betas:
        beta = Fraction(beta)
        # x / (1 - e^{-x}) = sum B_j (-x)^j / j!
        fac = [B[j] * (-beta) ** j / math.factorial(j) for j in range(d + 1)]
        out = [sum(out[i] * fac[j - i] for i in range(j + 1)) for j in range(d + 1)]
    return out


def constant_term_todd(f: ShortRatExpFun) -> Fraction:
    """Constant term via ``(1 / prod beta) sum_j (-alpha)^j / j! td_{n-j}(beta)``."""
    n = f.n
    if any(x == 0 for x in f.denominator):
        raise ValueError("zero denominator exponent")
    betas = f.betas
    td = todd_polynomials(betas, n)
    total = Fraction(0)
    for e, alpha in zip(f.coeffs, f.alphas):
        if e:
            total += e * sum((-alpha) ** j / math.factorial(j) * td[n - j] for j in range(n + 1))
    return total / math.prod(betas)


# --------------------------------------------------------------------------
# the quotient group


@dataclass(frozen=True)
class GroupContext:
    """``G = Z^n / S Z^n`` restricted to the nontrivial SNF components.

    Group elements are residue vectors ``x`` with ``0 <= x_i < moduli[i]``;
    ``index`` maps them to ``0..|G|-1`` in mixed radix.
    """

    snf: object
    delta: int
    sigma: int
    moduli: tuple[int, ...]
    generators: tuple[tuple[int, ...], ...]
    target: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def index(self, x: Sequence[int]) -> int:
        idx = 0
        for xi, d in zip(x, self.moduli):
            idx = idx * d + xi % d
        return idx

    def elements(self) -> np.ndarray:
        if not self.moduli:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.moduli).reshape(len(self.moduli), -1).T
        return grids.astype(np.int64)

    def generator_order(self, k: int) -> int:
        g = self.generators[k]
        return math.lcm(1, *(d // math.gcd(d, gi) for d, gi in zip(self.moduli, g)))

    def cosets(self, k: int) -> np.ndarray:
        """``out[q, j]`` = index of ``rep_q + j g_k``; reps are the coset minima."""
        G = self.order
        elems = self.elements()
        mod = np.array(self.moduli, dtype=np.int64)
        g = np.array(self.generators[k], dtype=np.int64)
        nxt_el = (elems + g) % mod if len(mod) else elems
        radix = np.array([math.prod(self.moduli[i + 1:]) for i in range(len(mod))], dtype=np.int64)
        nxt = nxt_el @ radix if len(mod) else np.zeros(1, dtype=np.int64)
        r = self.generator_order(k)
        seen = np.zeros(G, dtype=bool)
        rows = []
        for rep in range(G):
            if seen[rep]:
                continue
            orbit = np.empty(r, dtype=np.int64)
            cur = rep
            for j in range(r):
                orbit[j] = cur
                cur = nxt[cur]
            seen[orbit] = True
            rows.append(orbit)
        return np.array(rows, dtype=np.int64).reshape(-1, r)


def group_context(A, b: Sequence[int]) -> GroupContext:
    A = as_matrix(A)
    n = len(A)
    dec = snf(A)
    diag = dec.diagonal
    delta = abs(math.prod(diag))
    if delta == 0:
        raise SingularMatrixError("cone matrix is singular")
    keep = [i for i, d in enumerate(diag) if d > 1]
    moduli = tuple(diag[i] for i in keep)
    P = dec.P
    gens = tuple(tuple(P[i][k] % diag[i] for i in keep) for k in range(n))
    Pb = [sum(P[i][j] * b[j] for j in range(n)) for i in range(n)]
    target = tuple(Pb[i] % diag[i] for i in keep)
    return GroupContext(dec, delta, max(diag), moduli, gens, target)


# --------------------------------------------------------------------------
# the dynamic program


def cone_weights(A, c: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """``(Delta, w)`` with ``w_i = <c, h_i>`` and ``h_i`` the columns of ``Delta A^{-1}``."""
    A = as_matrix(A)
    d = det_exact(A)
    if d == 0:
        raise SingularMatrixError("cone matrix is singular")
    adj = adjugate(A)
    sgn = 1 if d > 0 else -1
    n = len(A)
    w = tuple(sgn * sum(c[i] * adj[i][j] for i in range(n)) for j in range(n))
    return abs(d), w


@dataclass(frozen=True)
class LevelWindow:
    lo: int
    width: int
    dtype: object


def _window(w: Sequence[int], r: Sequence[int]) -> LevelWindow:
    L = sum(min(0, wi * (ri - 1)) for wi, ri in zip(w, r))
    U = sum(max(0, wi * (ri - 1)) for wi, ri in zip(w, r))
    chi = max((abs(x) for x in w), default=0)
    dtype = np.int64 if math.prod(r) < _INT64_SAFE else object
    return LevelWindow(L - chi, U - L + 2 * chi + 1, dtype)


def level_tables(ctx: GroupContext, w: Sequence[int], method: str = "sliding",
                 use_numba: bool | None = None, keep_all: bool = False):
    """Run the level DP; return the final table (or every level's table).

    ``table[g, col]`` is the number of boxes ``0 <= y_i < r_i`` (over the
    generators processed so far) with ``sum y_i g_i = g`` and
    ``sum w_i y_i = col + lo``.
    """
    n = len(w)
    r = [ctx.generator_order(k) for k in range(n)]
    win = _window(w, r)
    G = ctx.order
    table = np.zeros((G, win.width), dtype=win.dtype)
    # level 1 by a direct scan over multiples of g_1
    cos = ctx.cosets(0)
    for s in range(r[0]):
        table[cos[0, s], w[0] * s - win.lo] = 1
    levels = [table] if keep_all else None
    for k in range(1, n):
        table = _kernels.dp_level(table, ctx.cosets(k), w[k], method, use_numba)
        if keep_all:
            levels.append(table)
    return (levels if keep_all else table), win, r


def cone_genfun(A, b: Sequence[int], c: Sequence[int], strict: bool = True,
                method: str = "sliding", use_numba: bool | None = None) -> ShortRatExpFun:
    """Closed form of ``sum_{z in Z^n, A z <= b} e^{<c, z> tau}``.

    With ``strict`` every ``<c, h_i>`` must be positive, so the series
    converges for ``tau > 0`` and all denominator exponents are negative.
    Otherwise only nonzero values are required and the result is the
    rational function obtained by continuation (as used in Brion sums).
    """
    A = as_matrix(A)
    b = [int(x) for x in b]
    delta, w = cone_weights(A, c)
    if any(x == 0 for x in w) or (strict and any(x < 0 for x in w)):
        raise DirectionError(f"direction {tuple(c)} gives cone weights {w}")
    ctx = group_context(A, b)
    table, win, r = level_tables(ctx, w, method, use_numba)
    row = table[ctx.index(ctx.target)]
    sgn = 1 if det_exact(A) > 0 else -1
    adj = adjugate(A)
    n = len(A)
    K = sgn * sum(c[i] * sum(adj[i][j] * b[j] for j in range(n)) for i in range(n))
    nz = np.nonzero(row)[0]
    coeffs = tuple(int(row[i]) for i in nz)
    exps = tuple(K - (int(i) + win.lo) for i in nz)
    return ShortRatExpFun(coeffs, exps, tuple(-wi * ri for wi, ri in zip(w, r)), delta)


def cone_parameters(A, c: Sequence[int]) -> dict:
    """Diagnostics ``Delta``, ``sigma`` and ``chi`` of one cone."""
    delta, w = cone_weights(A, c)
    return {"delta": delta, "sigma": max(snf(as_matrix(A)).diagonal),
            "chi": max(abs(x) for x in w)}


# --------------------------------------------------------------------------
# constant terms without expanding the numerator
#
# The level recurrences only add tables and multiply them by powers of t, so
# they can be run in any ring receiving Z[t, 1/t].  Mapping t -> e^{-tau} and
# truncating after tau^n keeps exactly what the constant term needs.  An entry
# is stored as its power sums (sum eps e^j for j <= n), on which
# multiplication by t^s acts as the binomial shift e -> e + s.


def _shift_matrix(s: int, n: int) -> np.ndarray:
    T = np.zeros((n + 1, n + 1), dtype=object)
    for j in range(n + 1):
        for k in range(j + 1):
            T[j, k] = math.comb(j, k) * s ** (j - k)
    return T


def _moment_level(prev: np.ndarray, cosets: np.ndarray, w: int, method: str) -> np.ndarray:
    nc, r = cosets.shape
    d = prev.shape[1] - 1
    new = np.zeros_like(prev)
    shift = [_shift_matrix(w * i, d).T for i in range(r + 1)]
    if method == "naive":
        for j in range(r):
            acc = np.zeros((nc, d + 1), dtype=object)
            for i in range(r):
                acc = acc + prev[cosets[:, (j - i) % r]].dot(shift[i])
            new[cosets[:, j]] = acc
        return new
    acc = np.zeros((nc, d + 1), dtype=object)
    for i in range(r):
        acc = acc + prev[cosets[:, (r - i) % r]].dot(shift[i])
    new[cosets[:, 0]] = acc
    for j in range(1, r):
        cur = prev[cosets[:, j]]
        acc = acc.dot(shift[1]) + cur - cur.dot(shift[r])
        new[cosets[:, j]] = acc
    return new


def dense_cost(A, c: Sequence[int]) -> int:
    """Size of the dense level tables ``cone_genfun`` would allocate."""
    delta, w = cone_weights(A, c)
    ctx = group_context(A, [0] * len(w))
    r = [ctx.generator_order(k) for k in range(len(w))]
    return ctx.order * _window(w, r).width


def cone_constant_term(A, b: Sequence[int], c: Sequence[int], method: str = "sliding",
                       representation: str = "auto", dense_limit: int = 1 << 21,
                       use_numba: bool | None = None) -> Fraction:
    """``constant_term(cone_genfun(A, b, c, strict=False))``.

    ``representation`` is ``"dense"`` (expand the numerator), ``"series"``
    (run the level recurrence on truncated series) or ``"auto"``, which picks
    dense whenever its tables hold at most ``dense_limit`` coefficients.
    """
    A = as_matrix(A)
    b = [int(x) for x in b]
    if representation not in ("auto", "dense", "series"):
        raise ValueError(f"unknown representation {representation!r}")
    delta, w = cone_weights(A, c)
    if any(x == 0 for x in w):
        raise DirectionError(f"direction {tuple(c)} gives cone weights {w}")
    ctx = group_context(A, b)
    n = len(w)
    r = [ctx.generator_order(k) for k in range(n)]
    if representation == "auto":
        dense = ctx.order * _window(w, r).width <= dense_limit
        representation = "dense" if dense else "series"
    if representation == "dense":
        return constant_term(cone_genfun(A, b, c, strict=False, method=method,
                                         use_numba=use_numba))
    table = np.zeros((ctx.order, n + 1), dtype=object)
    cos = ctx.cosets(0)
    for s in range(r[0]):
        e = w[0] * s
        table[cos[0, s]] = [e ** j for j in range(n + 1)]
    for k in range(1, n):
        table = _moment_level(table, ctx.cosets(k), w[k], method)
    p = table[ctx.index(ctx.target)]
    sgn = 1 if det_exact(A) > 0 else -1
    adj = adjugate(A)
    K = sgn * sum(c[i] * sum(adj[i][j] * b[j] for j in range(n)) for i in range(n))
    # numerator exponents are K - e
    N = [Fraction(sum(math.comb(j, k) * K ** (j - k) * (-1) ** k * int(p[k])
                      for k in range(j + 1)), math.factorial(j)) for j in range(n + 1)]
    return _series_constant(N, [-wi * ri for wi, ri in zip(w, r)])
