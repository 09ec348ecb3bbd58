import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rtafv import PiecewiseConstant, SolveConfig, TransportModel, build_mesh, cfl_timestep

ACCEPTANCE_RESULTS = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def square_wave():
    """Scalar transport setup: L = 10, N = 250, a(mu) = 5 mu + 2, CFL 0.8 at mu = 1."""
    model = TransportModel(alpha=5.0, beta=2.0)
    mesh = build_mesh(-10.0, 10.0, 250)
    dt = cfl_timestep(model, mesh, 0.8, 1.0)
    ic = PiecewiseConstant([-10.0 / 3.0, 10.0 / 3.0], [1.0, -1.0, 1.0])
    return model, mesh, dt, ic


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda s: (int(s.split(".")[0]), s)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {detail}")


@pytest.fixture(scope="session")
def impact_bar():
    """Steel-like bar: E(mu) = 19e10 mu + 1e11, rho = 7800, N = 250, CFL 0.8 at mu = 1.

    The bar starts stress free, with unit velocity on the left half.
    """
    from rtafv import ElastoModel
    from rtafv.systems import project_system

    model = ElastoModel(c0=19e10, c1=1e11, rho=7800.0)
    mesh = build_mesh(-10.0, 10.0, 250)
    dt = cfl_timestep(model, mesh, 0.8, 1.0)
    ic = project_system(PiecewiseConstant([], [0.0]), PiecewiseConstant([0.0], [1.0, 0.0]), mesh)
    return model, mesh, dt, ic
