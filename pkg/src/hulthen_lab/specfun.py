"""Scalar special functions used by the closed forms.

Every routine works in two arithmetics. When all inputs are ``int`` or
``Fraction`` the result is an exact ``Fraction``; otherwise floats are used
and terminating series are accumulated with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from .errors import DomainError, UnsupportedError

INT_TOL = 1e-9
SERIES_REL_TOL = 1e-16
SERIES_MAX_TERMS = 10**6


def is_exact(*xs) -> bool:
    """True when every argument is an exact rational (bools excluded)."""
    return all(isinstance(x, Rational) and not isinstance(x, bool) for x in xs)


def nonpositive_int(a) -> int | None:
    """Return ``k`` if ``a == -k`` for an integer ``k >= 0``, else ``None``.

    Float inputs are matched within ``INT_TOL``.
    """
    if is_exact(a):
        a = Fraction(a)
        if a.denominator == 1 and a <= 0:
            return int(-a)
        return None
    r = round(a)
    if r <= 0 and abs(a - r) <= INT_TOL:
        return int(-r)
    return None


def _sum(terms, exact: bool):
    if exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def log_gamma(x) -> float:
    """Natural log of Gamma for ``x > 0``."""
    if isinstance(x, bool):
        raise DomainError("log_gamma: boolean argument")
    x = float(x)
    if not x > 0 or math.isinf(x):
        raise DomainError(f"log_gamma: argument must be finite and > 0, got {x}")
    return math.lgamma(x)


def gamma_ratio(x, k: int):
    """Gamma(x) / Gamma(x + k) for a nonnegative integer shift ``k``.

    Computed as ``1 / (x)_k`` so it stays exact for rational ``x``.
    """
    p = pochhammer(x, k)
    if p == 0:
        raise DomainError(f"gamma_ratio: Gamma pole at x={x}")
    if is_exact(p):
        return Fraction(1) / p
    return 1.0 / p


def pochhammer(a, k: int):
    """Rising factorial ``a (a+1) ... (a+k-1)``; ``(a)_0 = 1``."""
    if k < 0 or int(k) != k:
        raise DomainError(f"pochhammer: k must be a nonnegative integer, got {k}")
    k = int(k)
    exact = is_exact(a)
    out = Fraction(1) if exact else 1.0
    if exact:
        a = Fraction(a)
    for i in range(k):
        out *= a + i
    return out


def _check_lower(lower: Sequence, degree: int) -> None:
    for b in lower:
        kb = nonpositive_int(b)
        if kb is not None and kb < degree:
            raise DomainError(
                f"lower parameter {b} hits a pole before the series terminates "
                f"at degree {degree}"
            )


def termination_degree(upper: Sequence) -> int | None:
    """Smallest ``k`` with some upper parameter equal to ``-k``."""
    ks = [k for k in (nonpositive_int(a) for a in upper) if k is not None]
    return min(ks) if ks else None


def terminating_terms(upper: Sequence, lower: Sequence, z=1, degree: int | None = None) -> list:
    """Terms ``prod (a)_k / (prod (b)_k k!) z^k`` for ``k = 0 .. degree``.

    ``degree`` defaults to the termination degree read from ``upper``.
    """
    if degree is None:
        degree = termination_degree(upper)
        if degree is None:
            raise UnsupportedError("series does not terminate")
    _check_lower(lower, degree)
    exact = is_exact(*upper, *lower, z)
    if exact:
        upper = [Fraction(a) for a in upper]
        lower = [Fraction(b) for b in lower]
        z = Fraction(z)
        term = Fraction(1)
    else:
        upper = [float(a) for a in upper]
        lower = [float(b) for b in lower]
        z = float(z)
        term = 1.0
    terms = [term]
    for k in range(degree):
        num = z
        for a in upper:
            num *= a + k
        den = k + 1
        for b in lower:
            den *= b + k
        term = term * num / den
        terms.append(term)
    return terms


def hyp_terminating(upper: Sequence, lower: Sequence, z=1):
    """Terminating generalized hypergeometric sum."""
    terms = terminating_terms(upper, lower, z)
    return _sum(terms, is_exact(*terms))


@dataclass(frozen=True)
class HypParams:
    """Parameter set ``pFq(upper; lower; argument)``."""

    upper: tuple = field(default_factory=tuple)
    lower: tuple = field(default_factory=tuple)
    argument: object = 1

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(self.upper))
        object.__setattr__(self, "lower", tuple(self.lower))

    @property
    def degree(self) -> int | None:
        return termination_degree(self.upper)

    def evaluate(self):
        return hyp_terminating(self.upper, self.lower, self.argument)


def hyp2f1_coeffs(n: int, b, c) -> list:
    """Polynomial coefficients (constant first) of 2F1(-n, b; c; t) in t."""
    if n < 0:
        raise DomainError("hyp2f1 degree must be nonnegative")
    return terminating_terms([-n, b], [c], 1, degree=n)


def hyp2f1_terminating(n: int, b, c, z):
    """2F1(-n, b; c; z) as the finite sum over k = 0..n."""
    if n < 0 or int(n) != n:
        raise DomainError(f"hyp2f1_terminating: n must be a nonnegative integer, got {n}")
    terms = terminating_terms([-int(n), b], [c], z, degree=int(n))
    return _sum(terms, is_exact(*terms))


def hyp2f1_series(a, b, c, z) -> float:
    """Gauss series for |z| < 1, summed until the term is negligible.

    Terminating parameters are handled exactly like the finite sum.
    """
    if termination_degree([a, b]) is not None:
        return float(hyp_terminating([a, b], [c], z))
    z = float(z)
    if not abs(z) < 1:
        raise UnsupportedError("non-terminating 2F1 needs |z| < 1")
    if nonpositive_int(c) is not None:
        raise DomainError(f"lower parameter {c} is a pole")
    a, b, c = float(a), float(b), float(c)
    term = partial = 1.0
    terms = [term]
    for k in range(SERIES_MAX_TERMS):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        terms.append(term)
        partial += term
        if abs(term) < SERIES_REL_TOL * abs(partial):
            return math.fsum(terms)
    raise UnsupportedError("2F1 series failed to converge within the term cap")


def hyp3f2_unit(a1, a2, a3, b1, b2):
    """3F2(a1, a2, a3; b1, b2; 1) for a terminating upper parameter set."""
    upper = [a1, a2, a3]
    if termination_degree(upper) is None:
        raise UnsupportedError(
            "3F2 at unit argument is only supported for terminating series"
        )
    return hyp_terminating(upper, [b1, b2], 1)


def kampe_unit(c0, upper_n, upper_m, d0, lower_n, lower_m, n: int, m: int):
    """Terminating Kampe de Feriet double sum at unit arguments.

    Sum over ``i <= n``, ``j <= m`` of::

        (c0)_{i+j} / (d0)_{i+j}
          * prod(upper_n)_i / ((lower_n)_i i!)
          * prod(upper_m)_j / ((lower_m)_j j!)
    """
    exact = is_exact(c0, d0, lower_n, lower_m, *upper_n, *upper_m)
    kd = nonpositive_int(d0)
    if kd is not None and kd < n + m:
        raise DomainError(f"coupled lower parameter {d0} hits a pole")
    left = terminating_terms(list(upper_n), [lower_n], 1, degree=n)
    right = terminating_terms(list(upper_m), [lower_m], 1, degree=m)
    if exact:
        c0, d0 = Fraction(c0), Fraction(d0)
    else:
        c0, d0 = float(c0), float(d0)
    # ratio (c0)_k / (d0)_k for k = 0 .. n+m
    ratio = [Fraction(1) if exact else 1.0]
    for k in range(n + m):
        ratio.append(ratio[-1] * (c0 + k) / (d0 + k))
    terms = [ratio[i + j] * li * rj for i, li in enumerate(left) for j, rj in enumerate(right)]
    return _sum(terms, exact)
