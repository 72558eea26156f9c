"""Mild solution of the controlled fractional diffusion equation, mode by mode.

For each eigenmode the state evolves as

    c_i(t) = E_{a,1}(lambda_i t**a) c_i(0)
             + b_i int_0^t (t-s)**(a-1) E_{a,a}(lambda_i (t-s)**a) u(s) ds.

The memory integral is computed after substituting ``tau = (t-s)**a``,
which absorbs the weakly singular factor exactly:

    (1/a) int_0^{t**a} E_{a,a}(lambda_i tau) u(t - tau**(1/a)) dtau.

When ``t`` is the end of the horizon and ``u ~ (t-s)**p`` there (``p < 0``,
as for HUM controls), the substitution becomes ``tau = (t-s)**(a+p)`` so
that the product of both singular factors is absorbed.

Panels are graded geometrically toward ``tau = 0`` so that the boundary
layer of width ``1/|lambda_i|`` is resolved; a uniform set of panels is
merged in so that no panel is wider than ``t**(a+p) / panels``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from frachum.actuators import ActuatorSpec, mode_gains
from frachum.errors import DomainError, InputError, QuadratureError
from frachum.mlf import mittag_leffler, mittag_leffler_array
from frachum.quadrature import gauss_legendre_panels, mixed_edges
from frachum.spectral import EigenBasis, SpectralField

SIGNAL_SAMPLES = 512
ENDPOINT_GAP = 1e-6


@dataclass(frozen=True)
class QuadratureConfig:
    panels: int = 32
    nodes_per_panel: int = 8
    transform: str = "alpha-power"

    def __post_init__(self):
        if self.panels < 1:
            raise DomainError(f"panels must be >= 1, got {self.panels}")
        if self.nodes_per_panel < 2:
            raise DomainError(f"nodes_per_panel must be >= 2, got {self.nodes_per_panel}")
        if self.transform != "alpha-power":
            raise DomainError(f"unsupported transform {self.transform!r}")

    def doubled(self) -> QuadratureConfig:
        return QuadratureConfig(2 * self.panels, self.nodes_per_panel, self.transform)


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class ControlSignal:
    """Scalar control on ``[0, horizon]``.

    Without a closed form the signal is the piecewise-linear interpolant of
    ``values`` on ``grid``. With one, the grid samples are only a record and
    every evaluation goes through ``closed_form(t)``; ``lag_form(sigma)``,
    when given, evaluates ``u(horizon - sigma)`` without forming
    ``horizon - sigma`` in floating point. ``endpoint_exponent`` is the
    power ``p`` in ``u ~ (horizon - t)**p`` near the end of the horizon.
    """

    grid: np.ndarray
    values: np.ndarray
    horizon: float
    closed_form: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    lag_form: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    endpoint_exponent: float = 0.0

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float).ravel()
        values = np.array(self.values, dtype=float).ravel()
        if grid.size < 2 or grid.shape != values.shape:
            raise InputError("grid and values must be 1-D arrays of equal length >= 2")
        if grid[0] != 0.0 or np.any(np.diff(grid) <= 0.0):
            raise InputError("grid must start at 0 and be strictly increasing")
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(grid)):
            raise InputError("control samples must be finite")
        if not self.horizon > 0.0 or grid[-1] > self.horizon:
            raise InputError("grid must lie inside [0, horizon]")
        if self.closed_form is None:
            if grid[-1] != self.horizon:
                raise InputError("sampled signals must cover the whole horizon")
        else:
            ref = np.asarray(self.closed_form(grid), dtype=float)
            if not np.allclose(ref, values, rtol=1e-12, atol=1e-300):
                raise InputError("grid values disagree with the closed form")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "horizon", float(self.horizon))

    # {{{ constructors

    @classmethod
    def from_samples(cls, grid, values) -> ControlSignal:
        grid = np.asarray(grid, dtype=float)
        return cls(grid, values, float(grid[-1]))

    @classmethod
    def from_function(cls, fn, horizon: float, samples: int = SIGNAL_SAMPLES,
                      endpoint_exponent: float = 0.0, lag_form=None) -> ControlSignal:
        """Closed-form signal recorded on a uniform grid.

        Singular profiles (``endpoint_exponent < 0``) are sampled on
        ``[0, horizon * (1 - 1e-6)]`` so the grid never touches the pole.
        """
        end = horizon * (1.0 - ENDPOINT_GAP) if endpoint_exponent < 0 else horizon
        grid = np.linspace(0.0, end, samples)

        def closed(t):
            return np.asarray(fn(np.asarray(t, dtype=float)), dtype=float) * np.ones_like(t, dtype=float)

        return cls(grid, closed(grid), horizon, closed_form=closed, lag_form=lag_form,
                   endpoint_exponent=float(endpoint_exponent))

    @classmethod
    def constant(cls, value: float, horizon: float, samples: int = SIGNAL_SAMPLES) -> ControlSignal:
        return cls.from_function(lambda t: np.full_like(t, float(value)), horizon, samples)

    @classmethod
    def zero(cls, horizon: float, samples: int = SIGNAL_SAMPLES) -> ControlSignal:
        return cls.constant(0.0, horizon, samples)

    # }}}

    @property
    def is_closed_form(self) -> bool:
        return self.closed_form is not None

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.closed_form is not None:
            return np.asarray(self.closed_form(t), dtype=float)
        return np.interp(t, self.grid, self.values)

    def at_lag(self, sigma) -> np.ndarray:
        """``u(horizon - sigma)``."""
        sigma = np.asarray(sigma, dtype=float)
        if self.lag_form is not None:
            return np.asarray(self.lag_form(sigma), dtype=float)
        return self(self.horizon - sigma)

    def __add__(self, other: ControlSignal) -> ControlSignal:
        if self.horizon != other.horizon:
            raise InputError("signals must share the same horizon")
        if not (self.is_closed_form and other.is_closed_form):
            grid = np.union1d(self.grid, other.grid)
            return ControlSignal(grid, self(grid) + other(grid), self.horizon)
        a, b = self, other
        return ControlSignal(
            a.grid,
            a.values + b(a.grid),
            a.horizon,
            closed_form=lambda t: a(t) + b(t),
            lag_form=lambda s: a.at_lag(s) + b.at_lag(s),
            endpoint_exponent=min(a.endpoint_exponent, b.endpoint_exponent),
        )

    def scaled(self, factor: float) -> ControlSignal:
        if not self.is_closed_form:
            return ControlSignal(self.grid, factor * self.values, self.horizon)
        a = self
        return ControlSignal(
            a.grid, factor * a.values, a.horizon,
            closed_form=lambda t: factor * a(t),
            lag_form=lambda s: factor * a.at_lag(s),
            endpoint_exponent=a.endpoint_exponent,
        )


def free_evolution(z0: SpectralField, alpha: float, t: float, basis: EigenBasis) -> SpectralField:
    """Uncontrolled state ``c_i(t) = E_{alpha,1}(lambda_i t**alpha) c_i(0)``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if z0.n_modes != basis.n_modes:
        raise InputError("initial state and basis have different truncations")
    if t == 0:
        return z0
    factors = mittag_leffler_array(alpha, 1.0, basis.lam * t**alpha)
    return SpectralField(factors * z0.coeffs)


def kernel_coeff(alpha: float, lambda_i: float, tau: float) -> float:
    """``E_{alpha,alpha}(lambda_i tau**alpha)``, the modal factor of ``K_alpha(tau)``."""
    if not tau > 0:
        raise DomainError(f"tau must be positive, got {tau}")
    return mittag_leffler(alpha, alpha, lambda_i * tau**alpha)


def _duhamel_rule(alpha: float, t: float, quad: QuadratureConfig, p: float = 0.0):
    """Lags ``t - s`` and weights for ``int (t-s)**(a-1+p) g(t-s) ds``."""
    q = alpha + p
    if not q > 0.0:
        raise DomainError(f"memory integral diverges: (t-s)**{alpha - 1 + p:g} is not integrable")
    tau, w = gauss_legendre_panels(mixed_edges(t**q, quad.panels), quad.nodes_per_panel)
    return tau ** (1.0 / q), w / q


def _signal_at(u: ControlSignal, t: float, lag: np.ndarray) -> np.ndarray:
    if t == u.horizon:
        vals = u.at_lag(lag)
    else:
        vals = u(t - lag)
    if not np.all(np.isfinite(vals)):
        raise InputError("control produced non-finite samples")
    return vals


def duhamel_moments(alpha: float, lam, u: ControlSignal, t: float,
                    quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Memory integrals for every eigenvalue in ``lam`` at once."""
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha out of (0,1]: {alpha}")
    if not 0.0 < t <= u.horizon * (1.0 + 1e-12):
        raise DomainError(f"t must lie in (0, T], got {t}")
    t = min(t, u.horizon)
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    p = min(u.endpoint_exponent, 0.0) if t == u.horizon else 0.0
    lag, w = _duhamel_rule(alpha, t, quad, p)
    uvals = _signal_at(u, t, lag)
    if p:
        uvals = uvals * lag ** (-p)
    kern = mittag_leffler_array(alpha, alpha, np.multiply.outer(lam, lag**alpha))
    return kern @ (w * uvals)


def duhamel_integral(alpha: float, lambda_i: float, u: ControlSignal, t: float,
                     quad: QuadratureConfig = DEFAULT_QUAD, return_error: bool = False,
                     rtol: float | None = None):
    """``int_0^t (t-s)**(alpha-1) E_{alpha,alpha}(lambda_i (t-s)**alpha) u(s) ds``.

    With ``return_error=True`` also returns the change under panel doubling
    (the doubled estimate is the value reported). If ``rtol`` is given and
    that change exceeds ``rtol`` times the magnitude of the result, a
    :class:`QuadratureError` carrying the estimate is raised.
    """
    coarse = float(duhamel_moments(alpha, [lambda_i], u, t, quad)[0])
    if not return_error and rtol is None:
        return coarse
    fine = float(duhamel_moments(alpha, [lambda_i], u, t, quad.doubled())[0])
    err = abs(fine - coarse)
    if rtol is not None and err > rtol * max(abs(fine), np.finfo(float).tiny):
        raise QuadratureError(
            f"Duhamel quadrature did not reach rtol={rtol:g} (change {err:.3e})", estimate=fine
        )
    return (fine, err) if return_error else fine


def mild_solution(z0: SpectralField, actuator: ActuatorSpec, u: ControlSignal, alpha: float,
                  t: float, basis: EigenBasis, quad: QuadratureConfig = DEFAULT_QUAD,
                  gains=None) -> SpectralField:
    """State at time ``t`` driven from ``z0`` by ``u`` through ``actuator``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return z0
    free = free_evolution(z0, alpha, t, basis)
    if gains is None:
        gains = mode_gains(actuator, basis)
    forced = gains.b * duhamel_moments(alpha, basis.lam, u, t, quad)
    return SpectralField(free.coeffs + forced)


def trajectory(z0: SpectralField, actuator: ActuatorSpec, u: ControlSignal, alpha: float,
               times, basis: EigenBasis, quad: QuadratureConfig = DEFAULT_QUAD) -> np.ndarray:
    """Coefficients at each of ``times``, one row per time."""
    gains = mode_gains(actuator, basis)
    return np.array([
        mild_solution(z0, actuator, u, alpha, float(t), basis, quad, gains).coeffs
        for t in times
    ])

