"""Exact algebra for sums of exponentials times polynomials in ``t = q e^{-r}``.

An :class:`ExpPoly` represents ``sum_k exp(alpha_k r) P_k(t)``. Every bound
state of the deformed Hulthen problem and every Crum-Darboux transform of one
is a single-exponent ``ExpPoly``, so the whole pipeline (products, derivatives,
Wronskians, exact quotients, ODE residuals) stays inside this class.

With ``q``, every ``alpha`` and every coefficient rational the object is in
*rational mode* and all arithmetic is exact. Any float anywhere switches the
whole object to float mode.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InexactDivisionError, UsageError
from .specfun import is_exact

ALPHA_TOL = 1e-12
TRIM_TOL = 1e-14
DIVISION_TOL = 1e-9
MAX_WRONSKIAN = 6


# -- plain coefficient-list polynomials (constant term first) ---------------

def _trim(p: list, exact: bool) -> list:
    if not p:
        return p
    if exact:
        while p and p[-1] == 0:
            p.pop()
        return p
    scale = max(abs(c) for c in p)
    cut = TRIM_TOL * scale
    while p and (abs(p[-1]) <= cut):
        p.pop()
    return p


def poly_add(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return out


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_divmod(num: Sequence, den: Sequence) -> tuple[list, list]:
    """Long division ``num = quot * den + rem`` with ``deg rem < deg den``."""
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(num)
    dd = len(den) - 1
    lead = den[-1]
    if len(rem) - 1 < dd:
        return [], rem
    quot = [0] * (len(rem) - dd)
    for k in range(len(rem) - 1 - dd, -1, -1):
        c = rem[k + dd] / lead
        quot[k] = c
        rem[k + dd] = 0 * c
        for i in range(dd):
            rem[k + i] -= c * den[i]
    return quot, rem[:dd]


def poly_eval(p: Sequence, t):
    acc = 0.0 * t
    for c in reversed(p):
        acc = acc * t + c
    return acc


def poly_pow(p: Sequence, k: int) -> list:
    out = [1]
    for _ in range(k):
        out = poly_mul(out, p)
    return out


# -- ExpPoly ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExpPoly:
    """``sum_k exp(alpha_k r) P_k(q e^{-r})`` in canonical form.

    ``terms`` is a tuple of ``(alpha, coeffs)`` pairs sorted by ``alpha``;
    ``coeffs`` lists polynomial coefficients constant term first.
    ``factored`` optionally carries, per term, the root-factored form of the
    exact polynomial it was rounded from (see ``Factored``); evaluation then
    keeps full relative accuracy even where the expanded coefficients cancel.
    """

    q: object
    terms: tuple = ()
    factored: tuple = field(default=(), repr=False)

    def __post_init__(self):
        q, terms = _canonical(self.q, self.terms)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "terms", terms)

    # constructors
    @classmethod
    def constant(cls, q, c=1) -> "ExpPoly":
        return cls(q, ((0, (c,)),))

    @classmethod
    def single(cls, q, alpha, coeffs: Iterable) -> "ExpPoly":
        return cls(q, ((alpha, tuple(coeffs)),))

    @classmethod
    def zero(cls, q) -> "ExpPoly":
        return cls(q, ())

    # properties
    @property
    def exact(self) -> bool:
        return isinstance(self.q, Fraction)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def alphas(self) -> tuple:
        return tuple(a for a, _ in self.terms)

    def max_abs_coeff(self) -> object:
        if not self.terms:
            return Fraction(0) if self.exact else 0.0
        return max(abs(c) for _, p in self.terms for c in p)

    def term(self, alpha) -> tuple:
        """Polynomial attached to ``alpha`` (empty tuple if absent)."""
        for a, p in self.terms:
            if a == alpha or (not self.exact and abs(a - alpha) <= ALPHA_TOL):
                return p
        return ()

    def __eq__(self, other):
        if not isinstance(other, ExpPoly):
            return NotImplemented
        return self.q == other.q and self.terms == other.terms

    def __hash__(self):
        return hash((self.q, self.terms))

    # arithmetic
    def __add__(self, other):
        return add(self, _lift(other, self.q))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return add(self, -_lift(other, self.q))

    def __rsub__(self, other):
        return add(_lift(other, self.q), -self)

    def __mul__(self, other):
        if isinstance(other, ExpPoly):
            return mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "ExpPoly":
        return ExpPoly(self.q, tuple((a, tuple(c * x for x in p)) for a, p in self.terms))

    def derivative(self, order: int = 1) -> "ExpPoly":
        f = self
        for _ in range(order):
            f = differentiate(f)
        return f

    def __call__(self, r):
        return evaluate(self, r)

    def __repr__(self):
        body = " + ".join(f"e^({a}r)*{list(p)}" for a, p in self.terms) or "0"
        return f"ExpPoly(q={self.q}, {body})"

    # conversions
    def to_exact(self) -> "ExpPoly":
        """Lossless conversion of every float to a Fraction."""
        if self.exact:
            return self
        return ExpPoly(Fraction(self.q), tuple((Fraction(a), tuple(Fraction(c) for c in p))
                                               for a, p in self.terms))

    def to_float(self) -> "ExpPoly":
        out = ExpPoly(float(self.q), tuple((float(a), tuple(float(c) for c in p))
                                           for a, p in self.terms))
        if self.exact and len(out.terms) == len(self.terms):
            object.__setattr__(out, "factored", tuple(factor_exact(tuple(p)) for _, p in self.terms))
        return out

    def to_dict(self) -> dict:
        enc = _encode_exact if self.exact else float
        return {
            "q": enc(self.q),
            "terms": [{"alpha": enc(a), "coeffs": [enc(c) for c in p]} for a, p in self.terms],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "ExpPoly":
        dec = _decode
        return cls(dec(d["q"]), tuple((dec(t["alpha"]), tuple(dec(c) for c in t["coeffs"]))
                                      for t in d["terms"]))

    @classmethod
    def from_json(cls, s: str) -> "ExpPoly":
        return cls.from_dict(json.loads(s))


def _encode_exact(x: Fraction) -> str:
    return str(x)


def _decode(x):
    if isinstance(x, str):
        return Fraction(x)
    return x


def _canonical(q, terms):
    if isinstance(q, bool) or not q > 0:
        raise DomainError(f"ExpPoly requires q > 0, got {q}")
    flat = [(a, list(p)) for a, p in terms]
    exact = is_exact(q, *(a for a, _ in flat), *(c for _, p in flat for c in p))
    if exact:
        q = Fraction(q)
        merged: dict = {}
        for a, p in flat:
            a = Fraction(a)
            merged[a] = poly_add(merged.get(a, []), [Fraction(c) for c in p])
        out = []
        for a in sorted(merged):
            p = _trim(merged[a], True)
            if p:
                out.append((a, tuple(p)))
        return q, tuple(out)

    q = float(q)
    flat = sorted(((float(a), [float(c) for c in p]) for a, p in flat), key=lambda x: x[0])
    groups: list = []
    for a, p in flat:
        if groups and abs(a - groups[-1][0]) <= ALPHA_TOL:
            groups[-1][1] = poly_add(groups[-1][1], p)
        else:
            groups.append([a, p])
    out = []
    for a, p in groups:
        p = _trim(p, False)
        if p:
            out.append((a, tuple(p)))
    return q, tuple(out)


def _lift(x, q) -> ExpPoly:
    if isinstance(x, ExpPoly):
        return x
    return ExpPoly.constant(q, x)


def _check_q(f: ExpPoly, g: ExpPoly):
    if f.q != g.q:
        raise UsageError(f"ExpPoly q mismatch: {f.q} vs {g.q}")


def add(f: ExpPoly, g: ExpPoly) -> ExpPoly:
    """Pointwise sum."""
    _check_q(f, g)
    return ExpPoly(f.q, f.terms + g.terms)


def mul(f: ExpPoly, g: ExpPoly) -> ExpPoly:
    """Pointwise product: exponents add, polynomials convolve."""
    _check_q(f, g)
    terms = [(a + b, tuple(poly_mul(p, r))) for a, p in f.terms for b, r in g.terms]
    return ExpPoly(f.q, tuple(terms))


def differentiate(f: ExpPoly) -> ExpPoly:
    """d/dr, using dt/dr = -t: e^{ar} P(t) -> e^{ar} (a P(t) - t P'(t))."""
    terms = tuple((a, tuple((a - k) * c for k, c in enumerate(p))) for a, p in f.terms)
    return ExpPoly(f.q, terms)


@dataclass(frozen=True)
class Factored:
    """p(t) = lead * t^zero_order * (1 - t)^unit_order * prod(t - roots)."""

    lead: float
    zero_order: int
    unit_order: int
    roots: tuple

    def __call__(self, t: np.ndarray, u: np.ndarray) -> np.ndarray:
        out = np.full(np.shape(t), self.lead)
        if self.zero_order:
            out = out * t**self.zero_order
        if self.unit_order:
            out = out * u**self.unit_order
        if self.roots:
            roots = np.asarray(self.roots)
            diffs = np.asarray(t)[..., None] - roots
            prod = np.prod(diffs, axis=-1)
            out = out * (prod.real if np.iscomplexobj(prod) else prod)
        return out


def _mp_roots(poly: list) -> tuple | None:
    import mpmath

    # alternating coefficients cancel: carry their dynamic range on top of 30 digits
    digits = [math.log10(abs(c.numerator)) - math.log10(c.denominator) for c in poly if c]
    spread = max(digits) - min(digits)
    base = 30 + 2 * math.ceil(spread) + len(poly) // 2
    for dps in (base, 2 * base):
        extra = max(100, 4 * len(poly))
        with mpmath.workdps(dps):
            coeffs = [mpmath.mpf(c.numerator) / c.denominator for c in reversed(poly)]
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=extra)
            except mpmath.libmp.libhyper.NoConvergence:
                continue
            # Newton polish: polyroots may stop well short of working precision
            polished = []
            for z in roots:
                for _ in range(4):
                    value, slope = mpmath.polyval(coeffs, z, derivative=True)
                    if slope == 0:
                        break
                    z -= value / slope
                polished.append(complex(z))
        return tuple(z if z.imag != 0 else z.real for z in polished)
    return None


@lru_cache(maxsize=4096)
def factor_exact(poly: tuple) -> Factored | None:
    """Root-factored form of an exact polynomial (roots via mpmath); None on failure."""
    p = [Fraction(c) for c in poly]
    zero_order = unit_order = 0
    while len(p) > 1 and p[0] == 0:
        p, zero_order = p[1:], zero_order + 1
    while len(p) > 1 and sum(p) == 0:
        p, _ = poly_divmod(p, [Fraction(1), Fraction(-1)])
        unit_order += 1
    if not p or p[-1] == 0:
        return None
    roots = _mp_roots(p) if len(p) > 1 else ()
    if roots is None:
        return None
    return Factored(float(p[-1]), zero_order, unit_order, roots)


@lru_cache(maxsize=4096)
def _shift_to_one(poly: tuple) -> tuple:
    """Float coefficients of p(1 - u), expanded exactly and rounded once."""
    exact = [Fraction(c) for c in poly]
    out = [Fraction(0)] * len(exact)
    for i, c in enumerate(exact):
        if c:
            for k in range(i + 1):
                out[k] += c * math.comb(i, k) * (-1) ** k
    return tuple(float(c) for c in out)


def evaluate(f: ExpPoly, r):
    """Value at ``r >= ln q``; accepts a scalar or a numpy array.

    Uses the factored form when present (always, for exact input). Otherwise polynomials are evaluated
    in u = 1 - t once t > 1/2, which keeps relative accuracy near t = 1.
    """
    log_q = math.log(float(f.q))
    arr = np.asarray(r, dtype=float)
    if arr.size and np.min(arr) < log_q:
        raise DomainError(f"evaluate: r must be >= ln q = {log_q}")
    t = np.exp(log_q - arr)
    u = -np.expm1(log_q - arr)
    total = 0.0 * arr
    for i, (a, p) in enumerate(f.terms):
        if f.factored:
            fac = f.factored[i]
        else:
            fac = factor_exact(tuple(p)) if f.exact else None
        if fac is not None:
            values = fac(t, u)
        else:
            values = np.where(t > 0.5, poly_eval(_shift_to_one(tuple(p)), u),
                              poly_eval([float(c) for c in p], t))
        total = total + np.exp(float(a) * arr) * values
    if np.ndim(r) == 0:
        return float(total)
    return total


def wronskian(fs: Sequence[ExpPoly]) -> ExpPoly:
    """Wronskian determinant by cofactor expansion; ``W(f) = f``.

    Float inputs are expanded exactly (after lossless conversion) and the
    result is rounded once; the cofactor sums cancel too heavily for floats.
    """
    fs = list(fs)
    k = len(fs)
    if not 1 <= k <= MAX_WRONSKIAN:
        raise UsageError(f"wronskian supports 1..{MAX_WRONSKIAN} functions, got {k}")
    for f in fs[1:]:
        _check_q(fs[0], f)
    if not all(f.exact for f in fs):
        return wronskian([f.to_exact() for f in fs]).to_float()
    q = fs[0].q
    # rows[i][c] = i-th derivative of fs[c]
    rows = [fs]
    for _ in range(1, k):
        rows.append([differentiate(f) for f in rows[-1]])

    @lru_cache(maxsize=None)
    def minor(row: int, cols: tuple) -> ExpPoly:
        if len(cols) == 1:
            return rows[row][cols[0]]
        acc = ExpPoly.zero(q)
        for pos, c in enumerate(cols):
            rest = cols[:pos] + cols[pos + 1:]
            term = mul(rows[row][c], minor(row + 1, rest))
            acc = add(acc, term if pos % 2 == 0 else -term)
        return acc

    return minor(0, tuple(range(k)))


def divide_exact(num: ExpPoly, den: ExpPoly, strict: bool | None = None) -> ExpPoly:
    """Quotient ``h`` with ``h * den == num`` for a single-term ``den``.

    Raises :class:`InexactDivisionError` if any remainder survives: exactly
    zero when ``strict`` (default: both inputs rational), otherwise
    ``<= 1e-9`` relative to the numerator. Float inputs are divided exactly
    and the quotient rounded once.
    """
    _check_q(num, den)
    if len(den.terms) != 1:
        raise UsageError("divide_exact needs a single-exponent, nonzero denominator")
    if strict is None:
        strict = num.exact and den.exact
    if not (num.exact and den.exact):
        return divide_exact(num.to_exact(), den.to_exact(), strict=False).to_float()
    beta, qpoly = den.terms[0]
    exact = strict
    out = []
    for a, p in num.terms:
        quot, rem = poly_divmod(p, qpoly)
        if exact:
            bad = any(c != 0 for c in rem)
        else:
            scale = max(abs(c) for c in p)
            bad = any(abs(c) > DIVISION_TOL * scale for c in rem)
        if bad:
            worst = max(abs(c) for c in rem)
            raise InexactDivisionError(
                f"nonzero remainder (max |c| = {float(worst):.3e}) at exponent {a}"
            )
        out.append((a - beta, tuple(quot)))
    return ExpPoly(num.q, tuple(out))
