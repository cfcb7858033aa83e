"""Numerical oracles that check the closed forms from outside.

* ``adaptive_quad``: adaptive Simpson with Richardson correction, vectorized
  breadth-first over intervals.
* ``fd_spectrum``: three-point finite differences on a uniform interior grid,
  eigenvalues by Sturm-sequence bisection, Richardson-extrapolated over h, h/2.
* ``ode_residual``: exact residual of the Schrodinger equation in ExpPoly form.
* ``gram_matrix``: pairwise quadrature overlaps.
* ``analytic_overlap``: term-wise Beta-function integral of ExpPoly products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numba
import numpy as np

from .errors import ConvergenceError, UsageError
from .exppoly import ExpPoly, mul, poly_mul

THRESHOLD_EPS = 1e-8
ROUNDOFF_FACTOR = 16
INITIAL_PANELS = 256
HALF_LINE_GRADING = 3.0
MAX_ACTIVE_INTERVALS = 2**17


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature settings; ``tol`` is relative to the integral scale if ``relative``."""

    tol: float = 1e-12
    max_depth: int = 50
    r_max: float = 60.0
    relative: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("QuadSpec.tol must be > 0")


@dataclass(frozen=True)
class FDSpec:
    grid_points: int = 2**15
    r_max: float = 60.0
    eig_tol: float = 1e-12
    r_min: float = 0.0

    def __post_init__(self):
        if self.grid_points < 64:
            raise UsageError("FDSpec.grid_points must be >= 64")
        if not self.r_max > self.r_min:
            raise UsageError("FDSpec.r_max must exceed r_min")


def default_r_max(q, shallowest_decay: float) -> float:
    """ln q + max(60, 40/kappa): tail of the shallowest state below ~e^-80."""
    return math.log(float(q)) + max(60.0, 40.0 / shallowest_decay)


def default_fd_r_max(q, shallowest_decay: float) -> float:
    """ln q + max(30, 15/kappa): the hard wall shifts energies by ~e^{-30}."""
    return math.log(float(q)) + max(30.0, 15.0 / shallowest_decay)


# -- quadrature ------------------------------------------------------------------

def _vectorize(f: Callable) -> Callable:
    def g(x):
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == np.shape(x):
                return y
        except (TypeError, ValueError):
            pass
        return np.array([float(f(xi)) for xi in np.ravel(x)]).reshape(np.shape(x))

    return g


def _graded(a: float, b: float, count: int, grading: float) -> np.ndarray:
    """``count`` nodes on [a, b], clustered at ``a`` as s**grading."""
    return a + (b - a) * np.linspace(0.0, 1.0, count) ** grading


def _adaptive(f, a: float, b: float, tol: float, max_depth: int,
              panels: int = INITIAL_PANELS, grading: float = 1.0) -> tuple[float, float]:
    # many initial panels so a narrow peak cannot hide between the first nodes
    edges = _graded(a, b, panels + 1, grading)
    x = np.empty(2 * panels + 1)
    x[::2] = edges
    x[1::2] = (edges[:-1] + edges[1:]) / 2
    fx = f(x)
    lo, hi = x[:-1:2], x[2::2]
    fa, fm, fb = fx[:-1:2], fx[1::2], fx[2::2]
    whole = (hi - lo) / 6 * (fa + 4 * fm + fb)
    tols = tol * (hi - lo) / (b - a)
    peak = float(np.max(np.abs(fx)))
    total = []
    err_total = []
    for _ in range(max_depth):
        mid = (lo + hi) / 2
        lm = (lo + mid) / 2
        rm = (mid + hi) / 2
        vals = f(np.concatenate([lm, rm]))
        flm, frm = vals[: lo.size], vals[lo.size:]
        peak = max(peak, float(np.max(np.abs(vals))))
        noise = 1024 * np.finfo(float).eps * peak
        left = (mid - lo) / 6 * (fa + 4 * flm + fm)
        right = (hi - mid) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        # roundoff floor: evaluation noise is ~eps * max|f| per unit length
        done = (np.abs(delta) <= 15 * tols) | (np.abs(delta) <= noise * (hi - lo))
        total.append(left[done] + right[done] + delta[done] / 15)
        err_total.append(np.abs(delta[done]) / 15)
        keep = ~done
        if keep.sum() > MAX_ACTIVE_INTERVALS:
            whole = (left + right)[keep]
            break
        if not keep.any():
            return math.fsum(np.concatenate(total)), float(np.sum(np.concatenate(err_total)))
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        fa, flm, fm, frm, fb = fa[keep], flm[keep], fm[keep], frm[keep], fb[keep]
        left, right, tols = left[keep], right[keep], tols[keep]
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
        tols = np.concatenate([tols, tols]) / 2
    estimate = math.fsum(np.concatenate(total + [whole]))
    error = float(np.sum(np.concatenate(err_total))) if err_total else float("inf")
    raise ConvergenceError(f"adaptive_quad did not converge (depth {max_depth}, "
                           f"{MAX_ACTIVE_INTERVALS} active intervals)", estimate, error)


def adaptive_quad(f: Callable, a: float, b: float, spec: QuadSpec = QuadSpec(),
                  grading: float = 1.0) -> float:
    """Integral of ``f`` over [a, b] to ``spec.tol``.

    With ``spec.relative`` the absolute target is ``tol`` times a loose
    (1e-3) adaptive estimate of the integral of ``|f|``. ``grading > 1``
    clusters the initial panels at ``a``.
    """
    f = _vectorize(f)
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    tol = spec.tol
    if spec.relative:
        rough = _graded(a, b, 4097, grading)
        guess = float(np.trapezoid(np.abs(f(rough)), rough))
        if guess > 0:
            try:
                scale = _adaptive(lambda x: np.abs(f(x)), a, b, 1e-3 * guess, spec.max_depth,
                                  grading=grading)[0]
            except ConvergenceError as exc:
                scale = exc.estimate
            tol = spec.tol * max(scale, guess)
    return _adaptive(f, a, b, tol, spec.max_depth, grading=grading)[0]


def integrate_half_line(f: Callable, q, spec: QuadSpec = QuadSpec()) -> float:
    """Integral over [ln q, spec.r_max] (the truncation point of [ln q, inf)).

    Bound-state mass sits within ~1/kappa of the boundary, so the initial
    panels are graded toward ln q.
    """
    return adaptive_quad(f, math.log(float(q)), spec.r_max, spec, grading=HALF_LINE_GRADING)


def overlap(f: ExpPoly, g: ExpPoly, spec: QuadSpec = QuadSpec()) -> float:
    """Quadrature of f*g; the factors are evaluated separately, which is far
    more accurate near t = 1 than the expanded product."""
    if float(f.q) != float(g.q):
        raise UsageError("states must share q")
    return integrate_half_line(lambda r: f(r) * g(r), f.q, spec)


def anchored(f: ExpPoly) -> ExpPoly:
    """Single-exponent f rebased to q = 1: f(r) = q^alpha * anchored(f)(r - ln q).

    Keeps quadrature in range when q^alpha alone would overflow.
    """
    if len(f.terms) != 1:
        raise UsageError("anchoring needs a single-exponent ExpPoly")
    one = Fraction(1) if f.exact else 1.0
    out = ExpPoly(one, f.terms)
    if f.factored:
        object.__setattr__(out, "factored", f.factored)
    return out


def gram_matrix(states: Sequence[ExpPoly], spec: QuadSpec = QuadSpec()) -> np.ndarray:
    """Symmetric matrix of quadrature overlaps on [ln q, r_max] (states may be anchored)."""
    states = list(states)
    if not states:
        return np.zeros((0, 0))
    q = states[0].q
    if any(s.q != q for s in states):
        raise UsageError("all states must share q")
    k = len(states)
    G = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            G[i, j] = G[j, i] = overlap(states[i], states[j], spec)
    return G


def analytic_overlap(f: ExpPoly, g: ExpPoly):
    """Exact integral of f*g over [ln q, inf) via integral_0^1 t^{s-1} dt = 1/s.

    With t = q e^{-r}: e^{c r} t^k dr -> q^c t^{k-c-1} dt. Each term needs
    k - c > 0. Exact when q**c is rational.
    """
    fg = mul(f, g)
    out = []
    for c, p in fg.terms:
        if any(not (k - c) > 0 for k, ck in enumerate(p) if ck != 0):
            raise UsageError("integrand is not integrable at r -> inf")
        inner = sum((ck / (k - c) for k, ck in enumerate(p) if ck != 0), Fraction(0) if fg.exact else 0.0)
        if fg.exact and (fg.q == 1 or Fraction(c).denominator == 1):
            out.append(fg.q ** int(c) * inner if fg.q != 1 else inner)
        else:
            out.append(float(fg.q) ** float(c) * float(inner))
    if fg.exact and all(isinstance(x, Fraction) for x in out):
        return sum(out, Fraction(0))
    return math.fsum(float(x) for x in out)


# -- finite differences ------------------------------------------------------------

@numba.njit(cache=True)
def _sturm_count(diag, off2, x):
    """Number of eigenvalues < x of the symmetric tridiagonal (diag, sqrt(off2))."""
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    for i in range(1, diag.size):
        if d == 0.0:
            d = 1e-300
        d = diag[i] - x - off2[i - 1] / d
        if d < 0:
            count += 1
    return count


@numba.njit(cache=True)
def _bisect_all(diag, off2, lo, hi, k, tol):
    out = np.empty(k)
    for i in range(k):
        a, b = lo, hi
        while b - a > tol * max(1.0, abs(a) + abs(b)):
            m = 0.5 * (a + b)
            if _sturm_count(diag, off2, m) > i:
                b = m
            else:
                a = m
        out[i] = 0.5 * (a + b)
    return out


@numba.njit(cache=True)
def _bisect_index(diag, off2, lo, hi, i, tol):
    a, b = lo, hi
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        m = 0.5 * (a + b)
        if _sturm_count(diag, off2, m) > i:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def sturm_count(diag: np.ndarray, offdiag: np.ndarray, x: float) -> int:
    return int(_sturm_count(np.asarray(diag, float), np.asarray(offdiag, float) ** 2, float(x)))


def tridiagonal_negative_eigenvalues(diag: np.ndarray, offdiag: np.ndarray, tol: float) -> np.ndarray:
    """Eigenvalues below 0, ascending, by Sturm bisection."""
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(offdiag, dtype=float) ** 2
    k = int(_sturm_count(diag, off2, 0.0))
    if k == 0:
        return np.zeros(0)
    radius = np.zeros_like(diag)
    b = np.sqrt(off2)
    radius[:-1] += b
    radius[1:] += b
    lo = float(np.min(diag - radius)) - 1.0
    return _bisect_all(diag, off2, lo, 0.0, k, tol)


def _fd_matrix(potential: Callable, spec: FDSpec, refine: int) -> tuple[np.ndarray, np.ndarray]:
    cells = refine * (spec.grid_points + 1)
    h = (spec.r_max - spec.r_min) / cells
    r = spec.r_min + h * np.arange(1, cells)
    diag = 2.0 / h**2 + np.asarray(potential(r), dtype=float)
    return diag, np.full(cells - 2, -1.0 / h**2)


def fd_eigenvalues(potential: Callable, spec: FDSpec, refine: int = 1) -> np.ndarray:
    """Negative eigenvalues on the grid h = (r_max - r_min) / (refine * (N + 1))."""
    return tridiagonal_negative_eigenvalues(*_fd_matrix(potential, spec, refine), spec.eig_tol)


def fd_eigenvalue(potential: Callable, spec: FDSpec, index: int, refine: int = 1) -> float:
    """The ``index``-th eigenvalue (ascending), which must be negative."""
    diag, off = _fd_matrix(potential, spec, refine)
    off2 = off**2
    if _sturm_count(diag, off2, 0.0) <= index:
        raise UsageError(f"grid has no negative eigenvalue with index {index}")
    lo = float(np.min(diag)) - 2.0 * float(np.max(np.abs(off))) - 1.0
    return float(_bisect_index(diag, off2, lo, 0.0, index, spec.eig_tol))


@dataclass(frozen=True)
class FDResult:
    eigenvalues: list
    coarse: list
    fine: list
    near_threshold: list


def fd_spectrum_detail(potential: Callable, spec: FDSpec) -> FDResult:
    coarse = fd_eigenvalues(potential, spec, 1)
    fine = fd_eigenvalues(potential, spec, 2)
    k = min(coarse.size, fine.size)
    extrap = (4 * fine[:k] - coarse[:k]) / 3
    return FDResult(
        [float(x) for x in extrap],
        [float(x) for x in coarse],
        [float(x) for x in fine],
        [bool(abs(x) < THRESHOLD_EPS) for x in extrap],
    )


def fd_spectrum(potential: Callable, spec: FDSpec) -> list:
    """Richardson-extrapolated negative eigenvalues of -d^2/dr^2 + V, ascending."""
    return fd_spectrum_detail(potential, spec).eigenvalues


def fd_spectrum_refined(potential: Callable, spec: FDSpec, decay_lengths: float = 15.0,
                        target: float = 1e-8, max_points: int = 2**20) -> FDResult:
    """Like ``fd_spectrum_detail``, then each state is redone on its own box.

    One grid cannot serve deep and shallow states together: deep states need a
    small h, but ||A|| ~ 2/h^2 then buries shallow eigenvalues in roundoff.
    State n is recomputed on [r_min, r_turn + decay_lengths / kappa_n], with
    r_turn the outermost point where V < E_n and kappa_n from the first pass
    (capped at spec.r_max). Starting from ``spec.grid_points``, the grid is
    doubled until two successive Richardson values agree to ``target``
    (relative), the change sinks below the roundoff floor eps * ||A|| / |E|,
    or ``max_points`` is reached.
    """
    first = fd_spectrum_detail(potential, spec)
    r = np.linspace(spec.r_min, spec.r_max, 8 * spec.grid_points + 1)[1:]
    v = np.asarray(potential(r), dtype=float)
    extrap, coarse, fine = [], [], []
    for n, e in enumerate(first.eigenvalues):
        inside = np.nonzero(v < e)[0]
        r_turn = r[inside[-1]] if inside.size else spec.r_min
        edge = r_turn + decay_lengths / math.sqrt(-e) if e < 0 else math.inf
        r_max = min(spec.r_max, edge)
        points = spec.grid_points
        box = FDSpec(points, r_max, spec.eig_tol, spec.r_min)
        lo, hi = fd_eigenvalue(potential, box, n, 1), fd_eigenvalue(potential, box, n, 2)
        best = (4 * hi - lo) / 3
        while 2 * points <= max_points:
            points *= 2
            lo = hi
            hi = fd_eigenvalue(potential, FDSpec(points, r_max, spec.eig_tol, spec.r_min), n, 2)
            previous, best = best, (4 * hi - lo) / 3
            h = (r_max - spec.r_min) / (2 * points + 2)
            floor = ROUNDOFF_FACTOR * np.finfo(float).eps * 4 / h**2
            if abs(best - previous) <= max(target * abs(best), floor):
                break
        extrap.append(best)
        coarse.append(lo)
        fine.append(hi)
    return FDResult(extrap, coarse, fine, [bool(abs(x) < THRESHOLD_EPS) for x in extrap])


# -- ODE residual --------------------------------------------------------------------

def residual_poly(psi: ExpPoly, v, q, barrier, energy) -> ExpPoly:
    """(-psi'' + V psi - E psi) (1 - t)^2 with V = barrier e^{-r}/(1-t)^2 - v e^{-r}/(1-t).

    Uses e^{-r} = t / q, so V (1-t)^2 = (barrier/q) t - (v/q) t (1 - t).
    """
    qq = psi.q
    if float(q) != float(qq):
        raise UsageError(f"psi has q={qq} but the potential has q={q}")
    if psi.exact:
        v, q, barrier, energy = (Fraction(x) for x in (v, q, barrier, energy))
    else:
        v, q, barrier, energy = float(v), float(q), float(barrier), float(energy)
    one_minus_t_sq = (1, -2, 1)
    vpoly = [0, barrier / q - v / q, v / q]
    d2 = psi.derivative(2)
    lhs = ExpPoly(qq, tuple((a, tuple(poly_mul(p, one_minus_t_sq))) for a, p in d2.terms))
    pot = ExpPoly(qq, tuple((a, tuple(poly_mul(p, vpoly))) for a, p in psi.terms))
    en = ExpPoly(qq, tuple((a, tuple(poly_mul(p, [energy * c for c in one_minus_t_sq])))
                           for a, p in psi.terms))
    return pot - lhs - en


def ode_residual(psi: ExpPoly, v, q, barrier, energy):
    """Largest |coefficient| of the polynomial residual; exactly 0 for eigenfunctions in rational mode."""
    return residual_poly(psi, v, q, barrier, energy).max_abs_coeff()
