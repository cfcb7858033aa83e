"""Oracle suite for one (v, q): every closed form against an independent check.

Each check is reduced to a scalar compared as
``|computed - expected| <= tolerance * max(1, |expected|)``. Quantities whose
natural size varies wildly (norm integrals, energies) are compared as ratios
so a relative corruption of 1e-3 is always visible. ODE residuals are divided
by ``max|coeff(psi)| * (1 + |E| + (v + barrier)/q)``, the size of the terms
that cancel, so deep wells with large coefficients are judged fairly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import darboux, hulthen, oracle
from .hulthen import ReducedParams
from .exppoly import ExpPoly

FD_TOL = 1e-6
RESIDUAL_TOL = 1e-10
ROUTE_TOL = 1e-9
CURVATURE_TOL = 1e-8
CHAIN_NORM_TOL = 1e-6
KAMPE_TOL = 1e-9
PFAFF_TOL = 1e-10
MAX_VERIFY_CHAIN = 3
SAMPLE_POINTS = 50


@dataclass(frozen=True)
class Check:
    name: str
    target_ref: str
    computed: float
    expected: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = abs(self.computed - self.expected) <= self.tolerance * max(1.0, abs(self.expected))
        object.__setattr__(self, "passed", bool(ok))


@dataclass
class VerificationReport:
    params: dict
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


@dataclass(frozen=True)
class Perturbation:
    """Relative corruption injected into closed forms (harness self-test)."""

    energy: float = 0.0
    norm: float = 0.0


def _sample_r(q, count: int = SAMPLE_POINTS) -> np.ndarray:
    t = np.linspace(0.02, 0.98, count)
    return math.log(float(q)) - np.log(t)


def _spread(ratios: np.ndarray) -> float:
    return float((np.max(ratios) - np.min(ratios)) / abs(np.mean(ratios)))


class _Suite:
    def __init__(self, p: ReducedParams, tol: float, perturb: Perturbation):
        self.p = p
        self.tol = tol
        self.perturb = perturb
        self.count = hulthen.bound_state_count(p)
        self.q = float(p.q)
        energies = [float(hulthen.energy(p, n)) for n in range(self.count)]
        kappa_min = math.sqrt(-energies[-1]) if energies else 1.0
        self.r_max = oracle.default_r_max(p.q, kappa_min)
        # quadrature runs on states anchored at the boundary (domain starts at 0)
        self.quad = oracle.QuadSpec(tol=min(1e-12, tol * 1e-3), r_max=self.r_max - math.log(self.q))
        self.max_j = min(MAX_VERIFY_CHAIN, darboux.max_chain_depth(), max(self.count - 1, 0))

    def energy(self, n):
        e = hulthen.energy(self.p, n)
        if self.perturb.energy:
            return float(e) * (1 + self.perturb.energy)
        return e

    def norm(self, n):
        """Closed-form I_nn without its q^{-2 kappa_n} factor."""
        i = hulthen.norm_integral(self.p, n, n, anchored=True)
        if self.perturb.norm:
            return float(i) * (1 + self.perturb.norm)
        return i

    # individual groups; each returns a list of Check
    def spectrum(self):
        kappa_min = float(hulthen.decay_rate(self.p, self.count - 1))
        r_max = oracle.default_fd_r_max(self.q, kappa_min)
        spec = oracle.FDSpec(2**15, r_max, 1e-14, math.log(self.q))
        fd = oracle.fd_spectrum_refined(hulthen.potential(self.p), spec).eigenvalues
        out = [Check("fd.count", "bound-state-count", len(fd), self.count, 0.0)]
        for n in range(min(len(fd), self.count)):
            out.append(Check(f"fd.energy.n{n}", "energy", fd[n] / float(self.energy(n)), 1.0, FD_TOL))
        return out

    def norms(self):
        out = []
        states = [oracle.anchored(hulthen.eigenfunction(self.p, n)) for n in range(self.count)]
        gram = oracle.gram_matrix(states, self.quad)
        for n in range(self.count):
            out.append(Check(f"norm.quad.n{n}", "norm-integral",
                             float(self.norm(n)) / gram[n, n], 1.0, self.tol))
            for m in range(n + 1, self.count):
                off = abs(gram[n, m]) / math.sqrt(gram[n, n] * gram[m, m])
                out.append(Check(f"orthogonality.n{n}.m{m}", "orthogonality", off, 0.0, self.tol))
        return out

    def kampe(self):
        out = []
        for n in range(self.count):
            for m in range(n, self.count):
                kdf = float(hulthen.norm_integral_kampe(self.p, n, m, anchored=True))
                if n == m:
                    out.append(Check(f"kampe.n{n}.m{m}", "kampe-de-feriet-form",
                                     kdf / float(self.norm(n)), 1.0, KAMPE_TOL))
                else:
                    scale = math.sqrt(float(self.norm(n)) * float(self.norm(m)))
                    out.append(Check(f"kampe.n{n}.m{m}", "kampe-de-feriet-form",
                                     abs(kdf) / scale, 0.0, KAMPE_TOL))
        return out

    def residuals(self):
        p, out = self.p, []
        tol = 0.0 if p.exact and not self.perturb.energy else RESIDUAL_TOL
        for j in range(self.max_j + 1):
            barrier = p.q * j * (j + 1)
            for n in range(j, self.count):
                e = self.energy(n)
                states = {"wronskian": darboux.crum_chain(p, j, n).psi,
                          "closed": darboux.closed_form_psi(p, j, n)}
                if j == 0:
                    states = {"base": hulthen.eigenfunction(p, n)}
                for label, psi in states.items():
                    res = _scaled_residual(psi, p, barrier, e)
                    out.append(Check(f"residual.j{j}.n{n}.{label}", "schrodinger-residual",
                                     res, 0.0, tol))
        # extended potential at the same barriers, indexed from its own ground state
        for j in range(1, self.max_j + 1):
            s_plus = hulthen.extended_s_plus(p.q * j * (j + 1), p.q)
            for k in range(self.count - j):
                psi = hulthen.extended_eigenfunction(p, s_plus, k)
                e = hulthen.extended_energy(p, s_plus, k)
                if self.perturb.energy:
                    e = float(e) * (1 + self.perturb.energy)
                res = _scaled_residual(psi, p, p.q * j * (j + 1), e)
                out.append(Check(f"residual.extended.s{s_plus}.n{k}", "extended-residual",
                                 res, 0.0, tol))
                shift = float(e) / float(self.energy(k + j))
                out.append(Check(f"extended.isospectral.s{s_plus}.n{k}", "extended-energy",
                                 shift, 1.0, 1e-13))
        return out

    def routes(self):
        out = []
        r = _sample_r(self.p.q) - math.log(self.q)
        for j in range(1, self.max_j + 1):
            for n in range(j, self.count):
                w = oracle.anchored(darboux.crum_chain(self.p, j, n).psi)
                c = oracle.anchored(darboux.closed_form_psi(self.p, j, n))
                out.append(Check(f"route.j{j}.n{n}", "crum-closed-form",
                                 _spread(np.asarray(w(r)) / np.asarray(c(r))), 0.0, ROUTE_TOL))
        return out

    def curvature(self):
        out = []
        r = _sample_r(self.p.q)
        er = np.exp(r)
        for j in range(1, self.max_j + 1):
            ev = darboux.log_wronskian_curvature(self.p, j)
            target = j * (j + 1) * self.q * er / (er - self.q) ** 2
            dev = float(np.max(np.abs(ev(r) / target - 1)))
            out.append(Check(f"curvature.j{j}", "log-wronskian-curvature", dev, 0.0, CURVATURE_TOL))
        return out

    def chain_norms(self):
        out = []
        for j in range(1, self.max_j + 1):
            e_levels = [self.energy(i) for i in range(self.count)]
            for n in range(j, self.count):
                psi = oracle.anchored(darboux.crum_chain(self.p, j, n).psi)
                quad = oracle.overlap(psi, psi, self.quad)
                closed = float(self.norm(n)) * math.prod(
                    float(e_levels[n]) - float(e_levels[i]) for i in range(j))
                out.append(Check(f"chain_norm.j{j}.n{n}", "chain-norm-product",
                                 closed / quad, 1.0, CHAIN_NORM_TOL))
        return out

    def pfaff(self):
        """(1-t) 2F1(-n, a+1; a-n; t) against 2F1(-n-1, a; a-n; t), coefficient by coefficient."""
        out = []
        pe = self.p.exact_twin()
        for n in range(self.count):
            direct = hulthen.eigenfunction(pe, n)
            compact = hulthen.eigenfunction_compact(pe, n)
            dev = (direct - compact).max_abs_coeff() / compact.max_abs_coeff()
            out.append(Check(f"pfaff.n{n}", "pfaff-form", float(dev), 0.0, PFAFF_TOL))
        return out


def _scaled_residual(psi: ExpPoly, p: ReducedParams, barrier, energy) -> float:
    res = oracle.ode_residual(psi, p.v, p.q, barrier, energy)
    if res == 0:
        return 0.0
    scale = float(psi.max_abs_coeff()) * (1 + abs(float(energy)) + float((p.v + barrier) / p.q))
    return float(res) / scale


GROUPS = ("spectrum", "norms", "kampe", "residuals", "routes", "curvature", "chain_norms", "pfaff")


def run_verification(p: ReducedParams, tol: float = 1e-8, perturb: Perturbation = Perturbation(),
                     workers: int = 1) -> VerificationReport:
    """Run every oracle check for ``p``; checks are sorted by name."""
    suite = _Suite(p, tol, perturb)
    params = {"v": float(p.v), "q": float(p.q), "arithmetic": "rational" if p.exact else "float",
              "bound_states": suite.count}
    report = VerificationReport(params)
    if suite.count == 0:
        return report
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda g: getattr(suite, g)(), GROUPS))
    else:
        results = [getattr(suite, g)() for g in GROUPS]
    report.checks = sorted((c for group in results for c in group), key=lambda c: c.name)
    return report
