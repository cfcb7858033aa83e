"""Crum-Darboux chains built on the Hulthen ground-state seeds.

Level ``j`` uses the seeds psi_{0,0} .. psi_{0,j-1}; its states are

    psi_{j,n} = W(psi_{0,0}, ..., psi_{0,j-1}, psi_{0,n}) / W(psi_{0,0}, ..., psi_{0,j-1})

for ``n >= j``, with the same eigenvalue E_n as the undeformed problem and
the potential ``-v e^{-r}/(1 - q e^{-r}) + j(j+1) q e^{-r}/(1 - q e^{-r})^2``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from . import hulthen
from .errors import InvalidSeedError, NoSuchStateError, UsageError
from .exppoly import MAX_WRONSKIAN, ExpPoly, divide_exact, poly_divmod, poly_mul, wronskian
from .hulthen import ReducedParams, hyp_poly, one_minus_t_poly
from .specfun import pochhammer

SEED_SAMPLES = 200
DEFAULT_MAX_CHAIN = 4


def max_chain_depth() -> int:
    """Chain depth cap, from HULTHEN_MAX_CHAIN (default 4); depth j needs j + 1 <= MAX_WRONSKIAN."""
    raw = os.environ.get("HULTHEN_MAX_CHAIN")
    depth = DEFAULT_MAX_CHAIN if raw is None else int(raw)
    return max(0, min(depth, MAX_WRONSKIAN - 1))


class Route(str, Enum):
    WRONSKIAN = "wronskian"
    CLOSED_FORM = "closed_form"


@dataclass(frozen=True)
class ChainState:
    j: int
    n: int
    psi: ExpPoly
    route: Route
    proportionality: object = 1


@dataclass(frozen=True)
class ChainPotential:
    v: object
    q: object
    j: int
    barrier_coefficient: object

    def __call__(self, r):
        return hulthen.potential(ReducedParams(self.v, self.q), self.barrier_coefficient)(r)


# -- seeds -------------------------------------------------------------------

def _interior_root_count(poly) -> int:
    """Real roots of ``poly`` strictly inside (0, 1), after removing t=0, t=1 factors."""
    p = [float(c) for c in poly]
    while len(p) > 1 and abs(p[0]) <= 1e-14 * max(map(abs, p)):
        p = p[1:]
    while len(p) > 1 and abs(sum(p)) <= 1e-12 * max(map(abs, p)):
        p, _ = poly_divmod(p, [1.0, -1.0])
    if len(p) <= 1:
        return 0
    roots = np.roots(p[::-1])
    real = roots[np.abs(roots.imag) <= 1e-9].real
    return int(np.sum((real > 1e-12) & (real < 1 - 1e-12)))


def check_nodeless(seed: ExpPoly) -> None:
    """Raise InvalidSeedError if ``seed`` changes sign on (ln q, inf)."""
    t = (np.arange(1, SEED_SAMPLES + 1) - 0.5) / SEED_SAMPLES
    r = np.log(float(seed.q)) - np.log(t)
    values = np.asarray(seed(r))
    nonzero = values[values != 0]
    if nonzero.size and not (np.all(nonzero > 0) or np.all(nonzero < 0)):
        raise InvalidSeedError("seed changes sign inside the domain")
    if len(seed.terms) == 1 and _interior_root_count(seed.terms[0][1]):
        raise InvalidSeedError("seed polynomial has a root inside 0 < t < 1")


def darboux_once(seed: ExpPoly, state: ExpPoly) -> ExpPoly:
    """(d/dr - seed'/seed) state = W(seed, state) / seed."""
    if seed.q != state.q:
        raise UsageError("seed and state must share q")
    check_nodeless(seed)
    return divide_exact(wronskian([seed, state]), seed)


# -- chains -------------------------------------------------------------------

def _require_chain(p: ReducedParams, j: int, n: int) -> None:
    if j < 0 or n < j:
        raise NoSuchStateError(f"need 0 <= j <= n, got j={j}, n={n}")
    if j > max_chain_depth():
        raise NoSuchStateError(f"chain depth {j} exceeds cap {max_chain_depth()}")
    count = hulthen.bound_state_count(p)
    if n >= count:
        raise NoSuchStateError(f"n={n} is not bound ({count} bound states)")


def seed_wronskian(p: ReducedParams, j: int) -> ExpPoly:
    """W(psi_{0,0}, ..., psi_{0,j-1}); the constant 1 for j = 0."""
    if j == 0:
        return ExpPoly.constant(p.q, 1)
    return wronskian([hulthen.eigenfunction(p, k) for k in range(j)])


def crum_chain(p: ReducedParams, j: int, n: int) -> ChainState:
    """Level-j state n as an exact Wronskian ratio."""
    _require_chain(p, j, n)
    if j == 0:
        return ChainState(0, n, hulthen.eigenfunction(p, n), Route.WRONSKIAN)
    check_nodeless(hulthen.eigenfunction(p, 0))
    # float inputs run on their exact rational values and are rounded once at the end
    pe = p.exact_twin()
    seeds = [hulthen.eigenfunction(pe, k) for k in range(j)]
    num = wronskian(seeds + [hulthen.eigenfunction(pe, n)])
    psi = divide_exact(num, wronskian(seeds))
    return ChainState(j, n, psi if p.exact else psi.to_float(), Route.WRONSKIAN)


def sequential_chain(p: ReducedParams, j: int, n: int) -> ExpPoly:
    """Same state reached by j single Darboux steps, each seeded by psi_{k,k}."""
    _require_chain(p, j, n)
    level = [hulthen.eigenfunction(p, m) for m in range(hulthen.bound_state_count(p))]
    for k in range(j):
        seed = level[k]
        level = [None] * (k + 1) + [darboux_once(seed, s) for s in level[k + 1:]]
    return level[n]


def closed_form_psi(p: ReducedParams, j: int, n: int) -> ExpPoly:
    """e^{-kappa_n r} (1-t)^{j+1} 2F1(j-n, j+1+a; a-n; t), a = v/(q(n+1))."""
    pe = p.exact_twin()
    a = pe.a(n)
    poly = poly_mul(one_minus_t_poly(j + 1), hyp_poly(n - j, j + 1 + a, a - n))
    psi = ExpPoly.single(pe.q, -hulthen.decay_rate(pe, n), poly)
    return psi if p.exact else psi.to_float()


def route_ratio(wronskian_psi: ExpPoly, closed_psi: ExpPoly):
    """Ratio of the lowest-order coefficients at the shared exponent."""
    if len(wronskian_psi.terms) != 1 or len(closed_psi.terms) != 1:
        raise UsageError("route comparison needs single-exponent states")
    (_, pw), (_, pc) = wronskian_psi.terms[0], closed_psi.terms[0]
    return pw[0] / pc[0]


def closed_form_chain_state(p: ReducedParams, j: int, n: int) -> ChainState:
    """Closed-form level-j state, tagged with its ratio to the Wronskian route."""
    _require_chain(p, j, n)
    psi = closed_form_psi(p, j, n)
    ratio = route_ratio(crum_chain(p, j, n).psi, psi)
    return ChainState(j, n, psi, Route.CLOSED_FORM, ratio)


def chain_potential(p: ReducedParams, j: int) -> ChainPotential:
    if j < 0:
        raise UsageError("chain depth must be >= 0")
    return ChainPotential(p.v, p.q, j, p.q * j * (j + 1))


# -- potential curvature ------------------------------------------------------

@dataclass(frozen=True)
class CurvatureEvaluator:
    """-2 (log W)'' = -2 (W'' W - W'^2) / W^2, from exact ExpPoly pieces."""

    numerator: ExpPoly
    denominator: ExpPoly

    def __call__(self, r):
        return -2.0 * self.numerator(r) / self.denominator(r)

    def identity_defect(self, j: int) -> ExpPoly:
        """-2 num (1-t)^2 - j(j+1) t W^2; vanishes iff the barrier is j(j+1) q e^r/(e^r-q)^2."""
        q = self.numerator.q
        one_minus_t_sq = ExpPoly.single(q, 0, (1, -2, 1))
        t = ExpPoly.single(q, 0, (0, 1))
        return self.numerator * one_minus_t_sq * (-2) - t * self.denominator * (j * (j + 1))


def _strip_common_one_minus_t(a: ExpPoly, b: ExpPoly) -> tuple[ExpPoly, ExpPoly]:
    """Cancel every (1 - t) factor shared by all term polynomials of exact a and b.

    Rounding first would leave both sides to cancel catastrophically near t = 1.
    """
    def divisible(e: ExpPoly) -> bool:
        return all(sum(poly) == 0 for _, poly in e.terms)

    def reduce(e: ExpPoly) -> ExpPoly:
        return ExpPoly(e.q, tuple((c, tuple(poly_divmod(list(poly), [1, -1])[0])) for c, poly in e.terms))

    while a.terms and b.terms and divisible(a) and divisible(b):
        a, b = reduce(a), reduce(b)
    return a, b


def log_wronskian_curvature(p: ReducedParams, j: int) -> CurvatureEvaluator:
    if not 1 <= j <= max_chain_depth():
        raise UsageError(f"curvature needs 1 <= j <= {max_chain_depth()}")
    w = seed_wronskian(p.exact_twin(), j)
    w1 = w.derivative()
    num = w1.derivative() * w - w1 * w1
    den = w * w
    # a shared e^{alpha r} cancels in the ratio; dropping it avoids underflow
    shift = den.terms[-1][0]
    num = ExpPoly(num.q, tuple((a - shift, c) for a, c in num.terms))
    den = ExpPoly(den.q, tuple((a - shift, c) for a, c in den.terms))
    if not p.exact:
        num, den = _strip_common_one_minus_t(num, den)
        num, den = num.to_float(), den.to_float()
    return CurvatureEvaluator(num, den)


# -- norms ----------------------------------------------------------------------

def chain_norm(p: ReducedParams, j: int, n: int):
    """Squared norm of the Wronskian-route state: I_nn * prod_{i<j} (E_n - E_i)."""
    _require_chain(p, j, n)
    e_n = hulthen.energy(p, n)
    out = hulthen.norm_integral(p, n, n)
    for i in range(j):
        out *= e_n - hulthen.energy(p, i)
    return out


def alternative_norm_factor(p: ReducedParams, j: int, n: int):
    """Prefactor of the alternative chain-norm formula, n counted from level j.

    ``(-j)_j (j+2n+2)_j / (2^j (n+1)_j)^2 * (n+1-b)_j (n+1+b)_j``,
    b = v/((j+n+1) q).
    """
    b = p.v / ((j + n + 1) * p.q)
    num = pochhammer(-j, j) * pochhammer(j + 2 * n + 2, j)
    den = (2**j * pochhammer(n + 1, j)) ** 2
    return num / den * pochhammer(n + 1 - b, j) * pochhammer(n + 1 + b, j)


def alternative_norm_readings(p: ReducedParams, j: int, n: int) -> dict:
    """Both readings of the alternative chain-norm formula, for report only.

    ``n`` is the energy index (n >= j); the formula's own index is n - j.
    Reading A multiplies by N_{n} = I^{-1/2}; reading B by I_nn.
    """
    _require_chain(p, j, n)
    factor = alternative_norm_factor(p, j, n - j)
    i_nn = hulthen.norm_integral(p, n, n)
    return {
        "factor": float(factor),
        "reading_a": float(factor) * float(i_nn) ** -0.5,
        "reading_b": float(factor * i_nn),
    }
