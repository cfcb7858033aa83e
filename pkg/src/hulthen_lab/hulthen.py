"""Closed-form bound states of the deformed Hulthen potential.

Reduced problem, on ``r in [ln q, inf)``::

    -psi'' - v e^{-r} / (1 - q e^{-r}) psi = E psi,   psi(ln q) = psi(inf) = 0

with ``v = 2 mu / delta^2`` and ``E_reduced = 2 E / delta^2``. The extended
problem adds the barrier ``barrier * e^{-r} / (1 - q e^{-r})^2``.

Wavefunctions are returned unnormalized (``N_n = 1``) as :class:`ExpPoly`.
Rational ``v`` and ``q`` keep everything exact except irrational powers of q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateParameterError,
    DomainError,
    InvalidParameters,
    NoSuchStateError,
    UnsupportedRepresentationError,
)
from .exppoly import ExpPoly, poly_mul, poly_pow
from .specfun import (
    gamma_ratio,
    hyp2f1_coeffs,
    hyp3f2_unit,
    is_exact,
    kampe_unit,
    nonpositive_int,
    pochhammer,
)


def _num(x):
    if isinstance(x, bool):
        raise InvalidParameters("boolean is not a parameter value")
    return Fraction(x) if is_exact(x) else float(x)


@dataclass(frozen=True)
class ReducedParams:
    v: object
    q: object

    def __post_init__(self):
        v, q = _num(self.v), _num(self.q)
        if not (v > 0 and q > 0) or not all(map(math.isfinite, (float(v), float(q)))):
            raise InvalidParameters(f"need v > 0 and q > 0, got v={self.v}, q={self.q}")
        if not is_exact(v, q):
            v, q = float(v), float(q)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "q", q)

    @property
    def exact(self) -> bool:
        return is_exact(self.v, self.q)

    @property
    def ratio(self):
        """v / q; bound states exist iff this exceeds 1."""
        return self.v / self.q

    def a(self, n: int):
        """Recurring combination v / (q (n+1))."""
        return self.v / (self.q * (n + 1))

    def exact_twin(self) -> "ReducedParams":
        """Same parameters as Fractions (lossless for floats)."""
        return self if self.exact else ReducedParams(Fraction(self.v), Fraction(self.q))


@dataclass(frozen=True)
class PhysicalParams:
    mu: object
    delta: object
    q: object

    def __post_init__(self):
        mu, delta, q = _num(self.mu), _num(self.delta), _num(self.q)
        if not (mu > 0 and delta > 0 and q > 0):
            raise InvalidParameters(
                f"need mu, delta, q > 0, got mu={self.mu}, delta={self.delta}, q={self.q}"
            )
        if not is_exact(mu, delta, q):
            mu, delta, q = float(mu), float(delta), float(q)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "q", q)

    def to_reduced(self) -> ReducedParams:
        return to_reduced(self)

    def physical_energy(self, n: int):
        """Energy straight from the physical-units formula."""
        mu, d, q = self.mu, self.delta, self.q
        return -(mu / (q * d * (1 + n)) - d * (1 + n) / 2) ** 2 / 2


@dataclass(frozen=True)
class BoundState:
    n: int
    energy: object
    psi: ExpPoly
    norm_integral: object
    norm_constant: float


@dataclass(frozen=True)
class ExtendedParams:
    barrier: object
    v: object
    q: object
    s_plus: object

    @classmethod
    def build(cls, p: ReducedParams, barrier) -> "ExtendedParams":
        return cls(barrier, p.v, p.q, extended_s_plus(barrier, p.q))


def to_reduced(p: PhysicalParams) -> ReducedParams:
    return ReducedParams(2 * p.mu / p.delta**2, p.q)


def energy_to_physical(energy_reduced, delta):
    return delta**2 * energy_reduced / 2


def r_to_x(r, delta):
    return r / delta


def bound_state_count(p: ReducedParams) -> int:
    """Number of n >= 0 with (n+1)^2 < v/q."""
    ratio = p.ratio
    if ratio <= 1:
        return 0
    if isinstance(ratio, Fraction):
        k = math.isqrt(ratio.numerator // ratio.denominator)
    else:
        k = math.isqrt(int(ratio))
    # smallest k with k^2 >= ratio, then count = k - 1
    while k * k < ratio:
        k += 1
    while k > 0 and (k - 1) ** 2 >= ratio:
        k -= 1
    return k - 1


def _require_state(p: ReducedParams, n: int) -> None:
    if int(n) != n or n < 0:
        raise NoSuchStateError(f"state index must be a nonnegative integer, got {n}")
    count = bound_state_count(p)
    if n >= count:
        raise NoSuchStateError(
            f"n={n} is not bound for v={p.v}, q={p.q} ({count} bound states)"
        )


def decay_rate(p: ReducedParams, n: int):
    """kappa_n = v/(2q(n+1)) - (n+1)/2, so that psi ~ e^{-kappa r} and E = -kappa^2."""
    return p.a(n) / 2 - Fraction(n + 1, 2)


def energy(p: ReducedParams, n: int):
    """Reduced eigenvalue -(v/(2q(n+1)) - (n+1)/2)^2."""
    _require_state(p, n)
    return -decay_rate(p, n) ** 2


def _check_lower(c, n):
    k = nonpositive_int(c)
    if k is not None and k < n:
        raise DegenerateParameterError(f"lower parameter {c} is a pole for degree {n}")


def hyp_poly(n: int, b, c) -> list:
    _check_lower(c, n)
    return hyp2f1_coeffs(n, b, c)


def one_minus_t_poly(power: int) -> list:
    return poly_pow([1, -1], power)


def eigenfunction(p: ReducedParams, n: int) -> ExpPoly:
    """psi_{0,n} = e^{-kappa_n r} (1 - t) 2F1(-n, a+1; a-n; t), a = v/(q(n+1))."""
    _require_state(p, n)
    pe = p.exact_twin()
    a = pe.a(n)
    poly = poly_mul(one_minus_t_poly(1), hyp_poly(n, a + 1, a - n))
    psi = ExpPoly.single(pe.q, -decay_rate(pe, n), poly)
    return psi if p.exact else psi.to_float()


def eigenfunction_compact(p: ReducedParams, n: int) -> ExpPoly:
    """Same state written without the explicit (1 - t): 2F1(-n-1, a; a-n; t)."""
    _require_state(p, n)
    a = p.a(n)
    return ExpPoly.single(p.q, -decay_rate(p, n), hyp_poly(n + 1, a, a - n))


def _q_power(q, e):
    if is_exact(q, e) and Fraction(e).denominator == 1:
        return Fraction(q) ** int(e)
    if q == 1:
        return Fraction(1) if is_exact(q) else 1.0
    return float(q) ** float(e)


def norm_prefactor(p: ReducedParams, n: int, m: int, anchored: bool = False):
    """2 q^{-s} Gamma(s)/Gamma(s+3) with s = kappa_n + kappa_m.

    ``anchored`` drops q^{-s}, the value of the two exponentials at r = ln q,
    which overflows floats for deep states when q < 1.
    """
    s = decay_rate(p, n) + decay_rate(p, m)
    if not s > 0:
        raise NoSuchStateError(f"Gamma pole: s = {s} <= 0 for n={n}, m={m}")
    if anchored:
        return 2 * gamma_ratio(s, 3)
    return 2 * _q_power(p.q, -s) * gamma_ratio(s, 3)


def norm_integral(p: ReducedParams, n: int, m: int | None = None, anchored: bool = False):
    """Overlap integral of the unnormalized states n and m on [ln q, inf).

    Off-diagonal entries are 0 by orthogonality. On the diagonal::

        I_nn = 2 q^{n+1-a} Gamma(a-n-1)/Gamma(a-n+2) * [B_n + 3F2(-n, a+1, a-n-1; a-n, a-n+2; 1)]

    with ``a = v/(q(n+1))`` and

        B_n = q(n+1)(v - q(n+1)^2) (a+1)_n / ((v - q(n+1)) (2q(n+1) + v) (-a-1)_n)
              * 3F2(1-n, a+1, a; a+3, a-n; 1)

    for ``n >= 1``. ``B_0`` is absent: it comes from the i = n term of a sum
    that starts at i = 1. ``anchored`` divides out q^{-2 kappa_n} (see
    ``norm_prefactor``).
    """
    if m is None:
        m = n
    _require_state(p, n)
    _require_state(p, m)
    if n != m:
        return Fraction(0) if p.exact else 0.0
    # the bracket cancels heavily for deep states: sum it exactly, round once
    pe = p.exact_twin()
    a = pe.a(n)
    v, q = pe.v, pe.q
    pref = norm_prefactor(p, n, n, anchored)
    bracket = hyp3f2_unit(-n, a + 1, a - n - 1, a - n, a - n + 2)
    if n >= 1:
        k = q * (n + 1)
        coef = (k * (v - q * (n + 1) ** 2) * pochhammer(a + 1, n)
                / ((v - k) * (2 * k + v) * pochhammer(-a - 1, n)))
        bracket += coef * hyp3f2_unit(1 - n, a + 1, a, a + 3, a - n)
    return pref * bracket if p.exact else float(pref) * float(bracket)


def norm_integral_kampe(p: ReducedParams, n: int, m: int, anchored: bool = False):
    """I_nm from the terminating Kampe de Feriet double sum (any n, m)."""
    _require_state(p, n)
    _require_state(p, m)
    pe = p.exact_twin()
    an, am = pe.a(n), pe.a(m)
    s = decay_rate(pe, n) + decay_rate(pe, m)
    kdf = kampe_unit(s, (-n, an + 1), (-m, am + 1), s + 3, an - n, am - m, n, m)
    pref = norm_prefactor(p, n, m, anchored)
    return pref * kdf if p.exact else float(pref) * float(kdf)


def normalization_constant(p: ReducedParams, n: int) -> float:
    """N_n = I_nn^{-1/2}."""
    return float(norm_integral(p, n, n)) ** -0.5


def bound_state(p: ReducedParams, n: int) -> BoundState:
    i_nn = norm_integral(p, n, n)
    return BoundState(n, energy(p, n), eigenfunction(p, n), i_nn, float(i_nn) ** -0.5)


def spectrum(p: ReducedParams) -> list:
    return [energy(p, n) for n in range(bound_state_count(p))]


# -- extended potential ------------------------------------------------------

def _exact_sqrt(x):
    if is_exact(x):
        x = Fraction(x)
        if x >= 0:
            rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
            if rn * rn == x.numerator and rd * rd == x.denominator:
                return Fraction(rn, rd)
    return math.sqrt(float(x))


def extended_s_plus(barrier, q):
    """Larger indicial root s+ = 1/2 + sqrt(barrier/q + 1/4) at 1 - q e^{-r} = 0."""
    barrier, q = _num(barrier), _num(q)
    if barrier < 0:
        raise DomainError(f"barrier must be >= 0, got {barrier}")
    if not q > 0:
        raise InvalidParameters(f"q must be > 0, got {q}")
    return Fraction(1, 2) + _exact_sqrt(barrier / q + Fraction(1, 4))


def _extended_kappa(p: ReducedParams, s_plus, n: int):
    k = n + s_plus
    return p.v / (2 * p.q * k) - k * Fraction(1, 2)


def _require_extended(p: ReducedParams, s_plus, n: int) -> None:
    if int(n) != n or n < 0:
        raise NoSuchStateError(f"state index must be a nonnegative integer, got {n}")
    if not (n + s_plus) ** 2 < p.ratio:
        raise NoSuchStateError(
            f"n={n} is not bound for s+={s_plus}, v={p.v}, q={p.q}"
        )


def extended_energy(p: ReducedParams, s_plus, n: int):
    """-(v/(2q(n+s+)) - (n+s+)/2)^2 for states with (n + s+)^2 < v/q."""
    _require_extended(p, s_plus, n)
    return -_extended_kappa(p, s_plus, n) ** 2


def extended_eigenfunction(p: ReducedParams, s_plus, n: int) -> ExpPoly:
    """e^{-kappa r} (1-t)^{s+} 2F1(-n, s+ + b; 1 - n - s+ + b; t), b = v/(q(n+s+)).

    Only integer ``s+`` gives an ExpPoly.
    """
    _require_extended(p, s_plus, n)
    b = p.v / (p.q * (n + s_plus))
    if not float(s_plus).is_integer():
        formula = (
            f"exp(-({float(_extended_kappa(p, s_plus, n))})*r) * (1 - q e^-r)^{float(s_plus)}"
            f" * 2F1(-{n}, {float(s_plus + b)}; {float(1 - n - s_plus + b)}; q e^-r)"
        )
        raise UnsupportedRepresentationError(
            f"s+ = {s_plus} is not an integer; no ExpPoly form", formula
        )
    s = int(s_plus)
    poly = poly_mul(one_minus_t_poly(s), hyp_poly(n, s + b, 1 - n - s + b))
    return ExpPoly.single(p.q, -_extended_kappa(p, s_plus, n), poly)


def potential(p: ReducedParams, barrier=0):
    """Callable V(r) = barrier e^{-r}/(1-q e^{-r})^2 - v e^{-r}/(1-q e^{-r})."""
    v, q, mu = float(p.v), float(p.q), float(barrier)

    def V(r):
        e = np.exp(-np.asarray(r, dtype=float))
        d = 1.0 - q * e
        return mu * e / d**2 - v * e / d

    return V
