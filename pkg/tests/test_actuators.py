from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frachum.actuators import ActuatorSpec, ModeGains, apply_B_star, mode_gains
from frachum.errors import DomainError, InputError
from frachum.quadrature import gauss_legendre_panels
from frachum.spectral import SpectralField, build_basis


@given(st.floats(0.0, 0.9), st.floats(0.01, 1.0))
def test_zone_gain_matches_quadrature_and_cosine_form(a1, length):
    a2 = min(1.0, a1 + length)
    b = build_basis(12)
    gains = mode_gains(ActuatorSpec.zone(a1, a2), b).b
    x, w = gauss_legendre_panels(np.linspace(a1, a2, 21), 12)
    assert np.allclose(gains, b.eigenfunctions(x) @ w, atol=1e-13)
    i = b.indices
    cosine = math.sqrt(2) / (i * math.pi) * (np.cos(i * math.pi * a1) - np.cos(i * math.pi * a2))
    assert np.allclose(gains, cosine, atol=1e-14)


def test_symmetric_zone_kills_even_modes():
    gains = mode_gains(ActuatorSpec.zone(0.25, 0.75), build_basis(16)).b
    assert np.all(np.abs(gains[1::2]) < 1e-12)
    assert np.all(np.abs(gains[0::2]) > 1e-3)


def test_pointwise_gains():
    b = build_basis(20)
    gains = mode_gains(ActuatorSpec.pointwise(0.3), b).b
    assert np.allclose(gains, math.sqrt(2) * np.sin(b.indices * math.pi * 0.3), atol=0)
    # sin(i pi 0.3) vanishes for i = 10, 20
    assert np.abs(gains[[9, 19]]).max() < 1e-14


@pytest.mark.parametrize("kw", [
    dict(kind="zone", a1=0.6, a2=0.4),
    dict(kind="zone", a1=-0.1, a2=0.4),
    dict(kind="point", b=0.0),
    dict(kind="point", b=1.0),
    dict(kind="disk"),
])
def test_actuator_validation(kw):
    with pytest.raises(DomainError):
        ActuatorSpec(**kw)


def test_describe():
    assert ActuatorSpec.zone(0.25, 0.75).describe() == "zone:0.25,0.75"
    assert ActuatorSpec.pointwise(0.3).describe() == "point:0.3"


def test_apply_B_star():
    gains = ModeGains(np.array([1.0, -2.0, 0.5]))
    assert apply_B_star(gains, SpectralField([1.0, 1.0, 2.0])) == pytest.approx(0.0)
    with pytest.raises(InputError):
        apply_B_star(gains, SpectralField([1.0]))
