import math

import pytest
from hypothesis import settings

from hulthen_lab import hulthen, oracle
from hulthen_lab.hulthen import ReducedParams

# root finding and quadrature have uneven first-call costs; no per-example deadline
settings.register_profile("lab", deadline=None, max_examples=50)
settings.load_profile("lab")

# (v, q) pairs every cross-check runs on
GRID = [(12, 1), (12.0, 0.5), (50.0, 2.0), (30.0, 1.7)]

ACCEPTANCE_LINES: list[str] = []


def grid_params():
    return [ReducedParams(v, q) for v, q in GRID]


def quad_spec(p: ReducedParams, tol: float = 1e-12) -> oracle.QuadSpec:
    count = hulthen.bound_state_count(p)
    kappa = float(hulthen.decay_rate(p, count - 1))
    return oracle.QuadSpec(tol=tol, r_max=oracle.default_r_max(p.q, kappa))


def fd_box(p: ReducedParams, points: int = 2**15) -> oracle.FDSpec:
    count = hulthen.bound_state_count(p)
    kappa = float(hulthen.decay_rate(p, count - 1))
    return oracle.FDSpec(points, oracle.default_fd_r_max(p.q, kappa), 1e-14, math.log(float(p.q)))


@pytest.fixture(params=GRID, ids=lambda vq: f"v{vq[0]}-q{vq[1]}")
def grid_point(request):
    v, q = request.param
    return ReducedParams(v, q)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
