"""Regional approximate controllability at a finite truncation.

The adjoint of the input-to-final-state map, applied to an extension by
zero of ``f`` from ``omega``, is

    s -> (T-s)**(a-1) sum_i E_{a,a}(lambda_i (T-s)**a) b_i (f, xi_i).

The modal kernels are linearly independent in ``s`` for distinct
eigenvalues, so the map has a nontrivial kernel exactly when some gain
``b_i`` vanishes. Those modes are "dead": no control can move them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from frachum.actuators import ActuatorSpec, mode_gains
from frachum.errors import DomainError, InputError
from frachum.spectral import EigenBasis, Region, SpectralField, region_mass

DEFAULT_GAIN_TOL = 1e-10

CONTROLLABLE = "controllable_at_truncation"
NOT_CONTROLLABLE = "not_controllable"


@dataclass(frozen=True)
class ControllabilityReport:
    dead_modes: tuple[int, ...]
    live_modes: tuple[int, ...]
    verdict: str
    gain_tol: float
    n_modes: int
    gains: tuple[float, ...] = ()
    # dead modes whose eigenfunction does not vanish on omega
    visible_dead_modes: tuple[int, ...] = ()
    region: Region | None = None
    actuator: ActuatorSpec | None = None

    @property
    def controllable(self) -> bool:
        return self.verdict == CONTROLLABLE

    @property
    def obstruction_visible(self) -> bool:
        return bool(self.visible_dead_modes)

    def live_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_modes, dtype=bool)
        mask[np.asarray(self.live_modes, dtype=int) - 1] = True
        return mask

    def to_text(self) -> str:
        def fmt(modes):
            return "{" + ", ".join(str(m) for m in modes) + "}" if modes else "{} (none)"

        lines = [
            f"controllability (at truncation N = {self.n_modes}; "
            "the infinite-dimensional property is not decided numerically)",
        ]
        if self.actuator is not None:
            lines.append(f"  actuator: {self.actuator.describe()}")
        if self.region is not None:
            lines.append(f"  region: [{self.region.sigma1!r}, {self.region.sigma2!r}]")
        lines += [
            f"  gain_tol: {self.gain_tol:.17g}",
            f"  verdict: {self.verdict}",
            f"  dead_modes: {fmt(self.dead_modes)}",
            f"  live_modes: {fmt(self.live_modes)}",
            f"  dead modes visible on region: {fmt(self.visible_dead_modes)}",
        ]
        if self.gains:
            lines.append("  mode gains b_i:")
            lines += [f"    {i:4d}  {g: .17e}" for i, g in enumerate(self.gains, start=1)]
        return "\n".join(lines)


def analyze(actuator: ActuatorSpec, region: Region, basis: EigenBasis,
            gain_tol: float = DEFAULT_GAIN_TOL) -> ControllabilityReport:
    """Split modes into dead (``|b_i| < gain_tol``) and live ones."""
    if not gain_tol > 0:
        raise DomainError(f"gain_tol must be positive, got {gain_tol}")
    b = mode_gains(actuator, basis).b
    dead_mask = np.abs(b) < gain_tol
    modes = basis.indices
    dead = tuple(int(i) for i in modes[dead_mask])
    live = tuple(int(i) for i in modes[~dead_mask])

    mass = region_mass(region, basis).matrix
    on_region = np.sqrt(np.clip(np.diag(mass), 0.0, None))
    visible = tuple(i for i in dead if on_region[i - 1] > gain_tol)

    return ControllabilityReport(
        dead_modes=dead,
        live_modes=live,
        verdict=CONTROLLABLE if not dead else NOT_CONTROLLABLE,
        gain_tol=float(gain_tol),
        n_modes=basis.n_modes,
        gains=tuple(float(x) for x in b),
        visible_dead_modes=visible,
        region=region,
        actuator=actuator,
    )


def reachable_component(z_T: SpectralField, report: ControllabilityReport
                        ) -> tuple[SpectralField, SpectralField]:
    """Split ``z_T`` into its live-mode and dead-mode coefficients."""
    if z_T.n_modes != report.n_modes:
        raise InputError(
            f"dimension mismatch: target has {z_T.n_modes} modes, report has {report.n_modes}"
        )
    live = report.live_mask()
    c = z_T.coeffs
    return SpectralField(np.where(live, c, 0.0)), SpectralField(np.where(live, 0.0, c))
