"""Scalar-input actuators and their per-mode gains ``b_i = (B*, xi_i)``.

Zone actuation ``B u = 1_[a1,a2] u`` gives ``b_i = int_{a1}^{a2} xi_i dx``;
pointwise actuation ``B u = u delta(x - b)`` gives ``b_i = xi_i(b)``. The
Dirac input is not in L2, so at truncation the pointwise gains simply
define ``B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from frachum.errors import DomainError, InputError
from frachum.spectral import SQRT2, EigenBasis, SpectralField


@dataclass(frozen=True)
class ActuatorSpec:
    kind: str
    a1: float = 0.0
    a2: float = 0.0
    b: float = 0.5

    def __post_init__(self):
        if self.kind == "zone":
            if not 0.0 <= self.a1 <= self.a2 <= 1.0:
                raise DomainError(
                    f"zone actuator needs 0 <= a1 <= a2 <= 1, got [{self.a1}, {self.a2}]"
                )
        elif self.kind == "point":
            if not 0.0 < self.b < 1.0:
                raise DomainError(f"pointwise actuator needs 0 < b < 1, got {self.b}")
        else:
            raise DomainError(f"unknown actuator kind {self.kind!r}")

    @classmethod
    def zone(cls, a1: float, a2: float) -> ActuatorSpec:
        return cls("zone", a1=float(a1), a2=float(a2))

    @classmethod
    def pointwise(cls, b: float) -> ActuatorSpec:
        return cls("point", b=float(b))

    def describe(self) -> str:
        if self.kind == "zone":
            return f"zone:{self.a1!r},{self.a2!r}"
        return f"point:{self.b!r}"


@dataclass(frozen=True)
class ModeGains:
    b: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.b.size


def mode_gains(actuator: ActuatorSpec, basis: EigenBasis) -> ModeGains:
    """Gains of every basis mode under ``B*``.

    The zone gain is written in product form,
    ``(2 sqrt 2 / (i pi)) sin(i pi (a1+a2)/2) sin(i pi (a2-a1)/2)``, which
    equals ``(sqrt 2 / (i pi)) (cos(i pi a1) - cos(i pi a2))`` but keeps
    structurally vanishing gains at rounding level.
    """
    i = basis.indices.astype(float)
    if actuator.kind == "zone":
        a1, a2 = actuator.a1, actuator.a2
        b = (2.0 * SQRT2 / (i * math.pi)) * np.sin(0.5 * i * math.pi * (a1 + a2)) * np.sin(
            0.5 * i * math.pi * (a2 - a1)
        )
    else:
        b = SQRT2 * np.sin(i * math.pi * actuator.b)
    b.flags.writeable = False
    return ModeGains(b)


def apply_B_star(gains: ModeGains, field_coeffs: SpectralField) -> float:
    """``B* z = sum_i b_i c_i``."""
    if gains.n_modes != field_coeffs.n_modes:
        raise InputError(
            f"dimension mismatch: {gains.n_modes} gains vs {field_coeffs.n_modes} coefficients"
        )
    return float(gains.b @ field_coeffs.coeffs)
