from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)


@functools.lru_cache(maxsize=None)
def pointwise_problem(n_modes: int = 16, epsilon: float = 1e-8):
    """Pointwise(0.3) on omega = [0.2, 0.8], alpha = 0.7, T = 1."""
    from frachum import (
        ActuatorSpec, Region, assemble_gramian, assemble_lambda, build_basis, mode_gains,
        region_mass,
    )

    basis = build_basis(n_modes)
    act = ActuatorSpec.pointwise(0.3)
    region = Region(0.2, 0.8)
    gram = _gramian(0.7, 1.0, n_modes)
    gains = mode_gains(act, basis)
    mass = region_mass(region, basis)
    op = assemble_lambda(gram, gains, mass, epsilon)
    return basis, act, region, gram, gains, mass, op


@functools.lru_cache(maxsize=None)
def _gramian(alpha: float, T: float, n_modes: int):
    from frachum import assemble_gramian, build_basis

    return assemble_gramian(alpha, T, build_basis(n_modes))


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)
