from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frachum import ActuatorSpec, Region, SpectralField, analyze, build_basis, reachable_component
from frachum.controllability import CONTROLLABLE, NOT_CONTROLLABLE
from frachum.errors import DomainError, InputError

OMEGA = Region(0.2, 0.8)


def test_symmetric_zone_is_obstructed():
    rep = analyze(ActuatorSpec.zone(0.25, 0.75), Region(0.3, 0.7), build_basis(8))
    assert set(rep.dead_modes) >= {2, 4, 6, 8}
    assert rep.verdict == NOT_CONTROLLABLE and not rep.controllable
    assert set(rep.dead_modes) | set(rep.live_modes) == set(range(1, 9))
    assert not set(rep.dead_modes) & set(rep.live_modes)


def test_midpoint_actuator_kills_even_modes():
    rep = analyze(ActuatorSpec.pointwise(0.5), OMEGA, build_basis(8))
    assert rep.dead_modes == (2, 4, 6, 8)
    assert rep.visible_dead_modes == (2, 4, 6, 8)
    assert rep.obstruction_visible


def test_irrational_point_has_no_dead_modes():
    rep = analyze(ActuatorSpec.pointwise(1 / np.pi), OMEGA, build_basis(16))
    assert rep.dead_modes == ()
    assert rep.verdict == CONTROLLABLE


@pytest.mark.parametrize("a1", [0.1, 0.2, 0.3, 0.4])
def test_symmetric_zone_with_rational_width_is_not_controllable(a1):
    rep = analyze(ActuatorSpec.zone(a1, 1 - a1), OMEGA, build_basis(16))
    assert rep.verdict == NOT_CONTROLLABLE


@given(st.floats(0.01, 0.99), st.floats(1e-13, 1e-3), st.floats(0.1, 1.0))
def test_shrinking_gain_tol_never_kills_modes(b, tol, shrink):
    basis = build_basis(24)
    loose = analyze(ActuatorSpec.pointwise(b), OMEGA, basis, tol)
    tight = analyze(ActuatorSpec.pointwise(b), OMEGA, basis, tol * shrink)
    assert set(tight.dead_modes) <= set(loose.dead_modes)


def test_report_text_states_truncation():
    text = analyze(ActuatorSpec.zone(0.25, 0.75), OMEGA, build_basis(4)).to_text()
    assert "at truncation N = 4" in text
    assert "dead_modes: {2, 4}" in text
    assert "verdict: not_controllable" in text


def test_gain_tol_must_be_positive():
    with pytest.raises(DomainError):
        analyze(ActuatorSpec.pointwise(0.3), OMEGA, build_basis(4), gain_tol=0.0)


def test_reachable_split():
    rep = analyze(ActuatorSpec.pointwise(0.5), OMEGA, build_basis(4))
    live, dead = reachable_component(SpectralField.mode(1, 4), rep)
    assert np.array_equal(live.coeffs, [1, 0, 0, 0]) and not dead.coeffs.any()
    live, dead = reachable_component(SpectralField.mode(2, 4), rep)
    assert not live.coeffs.any() and np.array_equal(dead.coeffs, [0, 1, 0, 0])
    live, dead = reachable_component(SpectralField([1.0, 1.0, 0.0, 0.0]), rep)
    assert np.array_equal(live.coeffs, [1, 0, 0, 0])
    assert np.array_equal(dead.coeffs, [0, 1, 0, 0])
    with pytest.raises(InputError):
        reachable_component(SpectralField.mode(1, 3), rep)
