"""Minimum-energy regional control by the Hilbert Uniqueness Method.

Coordinates
-----------
``f`` lives on ``omega``; it is represented by the coefficients ``fh`` of
its extension by zero, restricted to the span of the live modes. With the
region mass ``M``, the gain matrix ``D = diag(b)`` and the time Gramian

    G_ij = int_0^T s**(2a-2) E_{a,a}(lambda_i s**a) E_{a,a}(lambda_j s**a) ds,

the HUM operator maps ``fh`` to final-state coefficients ``D G D M fh``.
Testing against the live modes on ``omega`` gives the symmetric system

    (M D G D M + eps M) fh = M (z_T - phi_0(T)),

and the control is

    u*(t) = (T-t)**(a-1) sum_i E_{a,a}(lambda_i (T-t)**a) b_i (M fh)_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from frachum.actuators import ActuatorSpec, ModeGains, mode_gains
from frachum.controllability import (
    DEFAULT_GAIN_TOL,
    ControllabilityReport,
    analyze,
    reachable_component,
)
from frachum.dynamics import (
    DEFAULT_QUAD,
    ControlSignal,
    QuadratureConfig,
    _duhamel_rule,
    free_evolution,
    mild_solution,
)
from frachum.errors import DomainError, InputError, QuadratureError, UnreachableTargetError
from frachum.mlf import mittag_leffler_array
from frachum.quadrature import gauss_legendre_panels, mixed_edges
from frachum.spectral import EigenBasis, RegionMass, SpectralField, restrict_norm

DEFAULT_EPSILON = 1e-8
GRAMIAN_RTOL = 1e-8
RESIDUAL_TOL = 1e-2
ENERGY_PANELS = 64
ENERGY_NODES = 16


def _lambdas(basis_or_lam) -> np.ndarray:
    lam = getattr(basis_or_lam, "lam", basis_or_lam)
    return np.atleast_1d(np.asarray(lam, dtype=float))


# {{{ Gramian


@dataclass(frozen=True)
class TimeGramian:
    matrix: np.ndarray = field(repr=False)
    alpha: float
    T: float
    lam: np.ndarray = field(repr=False)
    error: float = 0.0


def _gramian_matrix(alpha: float, T: float, lam: np.ndarray, panels: int, nodes: int) -> np.ndarray:
    # tau = s**(2a-1) turns s**(2a-2) ds into dtau / (2a-1)
    q = 2.0 * alpha - 1.0
    tau, w = gauss_legendre_panels(mixed_edges(T**q, panels), nodes)
    kern = mittag_leffler_array(alpha, alpha, np.multiply.outer(lam, tau ** (alpha / q)))
    g = (kern * (w / q)) @ kern.T
    return 0.5 * (g + g.T)


def assemble_gramian(alpha: float, T: float, basis, quad: QuadratureConfig = DEFAULT_QUAD,
                     rtol: float = GRAMIAN_RTOL) -> TimeGramian:
    """Time Gramian of the modal adjoint kernels on ``[0, T]``.

    ``basis`` may be an :class:`EigenBasis` or a plain array of eigenvalues.
    The result is computed at ``quad`` and at doubled panels; the doubled
    one is kept and the entrywise change, relative to the largest entry,
    must stay below ``rtol``.
    """
    if not 0.5 < alpha <= 1.0:
        raise DomainError(
            f"Z*-norm integrand non-integrable at truncation: alpha={alpha} must be in (1/2, 1]"
        )
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    lam = _lambdas(basis)
    coarse = _gramian_matrix(alpha, T, lam, quad.panels, quad.nodes_per_panel)
    fine = _gramian_matrix(alpha, T, lam, 2 * quad.panels, quad.nodes_per_panel)
    scale = float(np.max(np.abs(fine)))
    err = float(np.max(np.abs(fine - coarse)))
    if err > rtol * max(scale, np.finfo(float).tiny):
        raise QuadratureError(
            f"Gramian quadrature change {err:.3e} exceeds {rtol:g} x {scale:.3e}", estimate=fine
        )
    fine.flags.writeable = False
    return TimeGramian(fine, float(alpha), float(T), lam, err)


# }}}

# {{{ Lambda operator


def effective_gains(gains: ModeGains, gain_tol: float = DEFAULT_GAIN_TOL) -> np.ndarray:
    """Gains with dead modes set to exactly zero."""
    b = np.array(gains.b, dtype=float)
    b[np.abs(b) < gain_tol] = 0.0
    return b


@dataclass(frozen=True)
class LambdaOperator:
    gramian: TimeGramian
    gains: ModeGains
    mass: RegionMass
    epsilon: float
    gain_tol: float
    # D G D M: Lambda acting on zero-extension coefficients
    matrix: np.ndarray = field(repr=False)
    # M D G D M + eps M
    system: np.ndarray = field(repr=False)

    @property
    def live_mask(self) -> np.ndarray:
        return np.abs(self.gains.b) >= self.gain_tol

    def apply(self, f_coeffs) -> np.ndarray:
        return self.matrix @ np.asarray(getattr(f_coeffs, "coeffs", f_coeffs), dtype=float)

    def quadratic_form(self, f_coeffs) -> float:
        """``<f, Lambda f>`` on ``omega``."""
        fh = np.asarray(getattr(f_coeffs, "coeffs", f_coeffs), dtype=float)
        return float(fh @ self.mass.matrix @ self.matrix @ fh)


def assemble_lambda(gramian: TimeGramian, gains: ModeGains, mass: RegionMass,
                    epsilon: float = DEFAULT_EPSILON,
                    gain_tol: float = DEFAULT_GAIN_TOL) -> LambdaOperator:
    n = gramian.matrix.shape[0]
    if gains.n_modes != n or mass.n_modes != n:
        raise InputError("Gramian, gains and mass must share the same truncation")
    if epsilon < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    b = effective_gains(gains, gain_tol)
    m = mass.matrix
    dgd = b[:, None] * gramian.matrix * b[None, :]
    lam_mat = dgd @ m
    system = m @ lam_mat + epsilon * m
    system = 0.5 * (system + system.T)
    lam_mat.flags.writeable = False
    system.flags.writeable = False
    return LambdaOperator(gramian, gains, mass, float(epsilon), float(gain_tol), lam_mat, system)


def zstar_norm(f_coeffs, gramian: TimeGramian, gains: ModeGains, mass: RegionMass,
               gain_tol: float = DEFAULT_GAIN_TOL) -> float:
    """``sqrt(fh^T M D G D M fh)``: the L2(0,T) norm of the adjoint image of f."""
    if not 0.5 < gramian.alpha <= 1.0:
        raise DomainError("Z* norm needs alpha in (1/2, 1]")
    fh = np.asarray(getattr(f_coeffs, "coeffs", f_coeffs), dtype=float)
    g = effective_gains(gains, gain_tol) * (mass.matrix @ fh)
    q = float(g @ gramian.matrix @ g)
    if q < -1e-10 * max(1.0, float(np.abs(g) @ np.abs(gramian.matrix) @ np.abs(g))):
        raise ArithmeticError(f"negative Z* quadratic form {q:.3e}: inconsistent assembly")
    return math.sqrt(max(q, 0.0))


# }}}

# {{{ signals and energies


@dataclass(frozen=True)
class HUMProfile:
    """``u(T - s) = s**(a-1) sum_i E_{a,a}(lambda_i s**a) w_i`` with ``w = b * (M fh)``."""

    alpha: float
    T: float
    lam: np.ndarray
    weights: np.ndarray

    def smooth_factor(self, lag) -> np.ndarray:
        lag = np.asarray(lag, dtype=float)
        active = self.weights != 0.0
        if not np.any(active):
            return np.zeros_like(lag)
        kern = mittag_leffler_array(
            self.alpha, self.alpha, np.multiply.outer(self.lam[active], lag**self.alpha)
        )
        return np.tensordot(self.weights[active], kern, axes=1)

    def at_lag(self, lag) -> np.ndarray:
        lag = np.asarray(lag, dtype=float)
        return lag ** (self.alpha - 1.0) * self.smooth_factor(lag)

    def __call__(self, t) -> np.ndarray:
        return self.at_lag(self.T - np.asarray(t, dtype=float))

    def signal(self) -> ControlSignal:
        return ControlSignal.from_function(
            self, self.T, endpoint_exponent=self.alpha - 1.0, lag_form=self.at_lag
        )


def signal_inner(u: ControlSignal, v: ControlSignal, panels: int = ENERGY_PANELS,
                 nodes: int = ENERGY_NODES) -> float:
    """``int_0^T u v dt``.

    Sampled signals are integrated exactly as piecewise-linear functions.
    Closed forms use ``tau = (T-t)**q`` with ``q = 1 + p_u + p_v`` (capped at
    1), which cancels the endpoint singularity, on panels graded toward
    ``t = T`` and capped in width.
    """
    if u.horizon != v.horizon:
        raise InputError("signals must share the same horizon")
    T = u.horizon
    if not (u.is_closed_form or v.is_closed_form):
        grid = np.union1d(u.grid, v.grid)
        a, b = u(grid), v(grid)
        h = np.diff(grid)
        # exact for the product of two linear pieces
        return float(np.sum(h * (2 * a[:-1] * b[:-1] + a[:-1] * b[1:] + a[1:] * b[:-1]
                                 + 2 * a[1:] * b[1:]) / 6.0))
    p = min(u.endpoint_exponent, 0.0) + min(v.endpoint_exponent, 0.0)
    if p <= -1.0:
        raise DomainError("infinite-energy profile: endpoint singularity is not square integrable")
    q = min(1.0, 1.0 + p)
    tau, w = gauss_legendre_panels(mixed_edges(T**q, panels), nodes)
    lag = tau ** (1.0 / q)
    integrand = u.at_lag(lag) * v.at_lag(lag) * lag ** (1.0 - q) / q
    return float(np.dot(w, integrand))


def control_energy(u: ControlSignal, panels: int = ENERGY_PANELS) -> float:
    """``J(u) = int_0^T u(t)**2 dt``."""
    if u.is_closed_form and u.endpoint_exponent <= -0.5:
        raise DomainError(
            f"infinite-energy profile: (T-t)**{u.endpoint_exponent:g} is not square integrable"
        )
    return signal_inner(u, u, panels)


# }}}

# {{{ solve


@dataclass(frozen=True)
class HUMSolution:
    f_coeffs: SpectralField
    u_star: ControlSignal
    profile: HUMProfile
    energy: float
    residual: float
    relative_residual: float
    zstar_norm: float
    final_state: SpectralField
    target: SpectralField
    z0: SpectralField
    reachable: SpectralField
    obstructed: SpectralField
    obstructed_norm: float
    report: ControllabilityReport
    epsilon: float
    residual_tol: float
    actuator: ActuatorSpec
    basis: EigenBasis = field(repr=False)
    quad: QuadratureConfig = DEFAULT_QUAD

    @property
    def steered(self) -> bool:
        return self.relative_residual <= self.residual_tol

    @property
    def status(self) -> str:
        if self.steered:
            return "steered"
        return "partial: obstructed target component" if self.obstructed_norm > 0 else "partial"


def _solve_spd(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        c, low = scipy.linalg.cho_factor(a, check_finite=True)
        return scipy.linalg.cho_solve((c, low), rhs)
    except np.linalg.LinAlgError:
        sol, *_ = scipy.linalg.lstsq(a, rhs)
        return sol


def solve_hum(lambda_op: LambdaOperator, z_T: SpectralField, z0: SpectralField, alpha: float,
              T: float, basis: EigenBasis, actuator: ActuatorSpec,
              quad: QuadratureConfig = DEFAULT_QUAD,
              residual_tol: float = RESIDUAL_TOL) -> HUMSolution:
    """Solve for ``f``, synthesize ``u*`` and audit it by forward simulation.

    Raises :class:`UnreachableTargetError` when every mode is dead. A target
    with an obstructed part is still solved for its best reachable
    approximation on ``omega``; the result then reports ``steered=False``.
    """
    gram = lambda_op.gramian
    if not math.isclose(gram.alpha, alpha) or not math.isclose(gram.T, T):
        raise InputError("Lambda operator was assembled for a different alpha or T")
    if not 0.5 < alpha <= 1.0:
        raise DomainError(f"HUM synthesis needs alpha in (1/2, 1), got {alpha}")
    n = basis.n_modes
    if z_T.n_modes != n or z0.n_modes != n or lambda_op.matrix.shape[0] != n:
        raise InputError("target, initial state and operator must share the truncation")

    mass = lambda_op.mass
    report = analyze(actuator, mass.region, basis, lambda_op.gain_tol)
    if not report.live_modes:
        raise UnreachableTargetError("target unreachable: actuator has no live modes")

    phi0 = free_evolution(z0, alpha, T, basis)
    r = z_T.coeffs - phi0.coeffs
    reachable, obstructed = reachable_component(SpectralField(r), report)

    live = np.asarray(report.live_modes) - 1
    m = mass.matrix
    rhs = (m @ r)[live]
    fh = np.zeros(n)
    if np.any(rhs != 0.0):
        fh[live] = _solve_spd(lambda_op.system[np.ix_(live, live)], rhs)

    b = effective_gains(lambda_op.gains, lambda_op.gain_tol)
    profile = HUMProfile(float(alpha), float(T), basis.lam.copy(), b * (m @ fh))
    u_star = profile.signal()

    final = mild_solution(z0, actuator, u_star, alpha, T, basis, quad)
    residual = restrict_norm(final - z_T, mass)
    target_norm = restrict_norm(z_T, mass)
    rel = residual / target_norm if target_norm > 0 else residual

    return HUMSolution(
        f_coeffs=SpectralField(fh),
        u_star=u_star,
        profile=profile,
        energy=control_energy(u_star),
        residual=residual,
        relative_residual=rel,
        zstar_norm=zstar_norm(fh, gram, lambda_op.gains, mass, lambda_op.gain_tol),
        final_state=final,
        target=z_T,
        z0=z0,
        reachable=reachable,
        obstructed=obstructed,
        obstructed_norm=restrict_norm(obstructed, mass),
        report=report,
        epsilon=lambda_op.epsilon,
        residual_tol=residual_tol,
        actuator=actuator,
        basis=basis,
        quad=quad,
    )


def simulate_lambda(f_coeffs, lambda_op: LambdaOperator, actuator: ActuatorSpec,
                    basis: EigenBasis, quad: QuadratureConfig = DEFAULT_QUAD) -> SpectralField:
    """``phi_1(T)`` by forward simulation: drive the system from rest with
    the adjoint image of ``f``. Independent of the Gramian; used to
    cross-check the assembled operator."""
    fh = np.asarray(getattr(f_coeffs, "coeffs", f_coeffs), dtype=float)
    gram = lambda_op.gramian
    b = effective_gains(lambda_op.gains, lambda_op.gain_tol)
    profile = HUMProfile(gram.alpha, gram.T, basis.lam.copy(), b * (lambda_op.mass.matrix @ fh))
    return mild_solution(SpectralField.zeros(basis.n_modes), actuator, profile.signal(),
                         gram.alpha, gram.T, basis, quad)


# }}}

# {{{ minimality audit


@dataclass(frozen=True)
class PerturbationTrial:
    orthogonality: float  # |<u*, v>| / (||u*|| ||v||)
    energy_star: float
    energy_perturbed: float
    energy_v: float
    steering_change: float  # ||p_omega (z(T, u*+v) - z(T, u*))||

    def passed(self, orth_tol: float, energy_slack: float, steer_tol: float) -> bool:
        return (
            self.orthogonality <= orth_tol
            and self.energy_perturbed >= self.energy_star - energy_slack
            and self.steering_change <= steer_tol
        )


@dataclass(frozen=True)
class MinimalityReport:
    kernel_dim: int
    trials: tuple[PerturbationTrial, ...]
    orth_tol: float
    energy_slack: float
    steer_tol: float
    note: str = ""

    @property
    def all_passed(self) -> bool:
        return all(t.passed(self.orth_tol, self.energy_slack, self.steer_tol) for t in self.trials)


def _legendre_signal(coeffs: np.ndarray, T: float) -> ControlSignal:
    def at_lag(lag):
        return np.polynomial.legendre.legval(1.0 - 2.0 * np.asarray(lag) / T, coeffs)

    return ControlSignal.from_function(lambda t: at_lag(T - t), T, lag_form=at_lag)


def _legendre_moments(alpha: float, T: float, lam: np.ndarray, dim: int,
                      rule: QuadratureConfig) -> np.ndarray:
    lag, w = _duhamel_rule(alpha, T, rule)
    vander = np.polynomial.legendre.legvander(1.0 - 2.0 * lag / T, dim - 1)
    kern = mittag_leffler_array(alpha, alpha, np.multiply.outer(lam, lag**alpha))
    return kern @ (w[:, None] * vander)


def verify_minimality(solution: HUMSolution, lambda_op: LambdaOperator, gains: ModeGains,
                      mass: RegionMass, trials: int = 16, seed: int = 1,
                      extra_dims: int = 24, orth_tol: float = 1e-6,
                      energy_slack: float = 1e-8, steer_tol: float = 1e-6) -> MinimalityReport:
    """Perturb ``u*`` by random controls that leave the final state on the
    live modes unchanged and check that none of them lowers the energy.

    Perturbations are Legendre polynomials in ``t`` projected onto the null
    space of the live-mode moment map
    ``v -> int_0^T (T-s)**(a-1) E_{a,a}(lambda_i (T-s)**a) v(s) ds``.
    ``steer_tol`` is relative to ``max(1, ||p_omega z_T||)``.
    """
    gram = lambda_op.gramian
    alpha, T = gram.alpha, gram.T
    basis, quad = solution.basis, solution.quad
    live = np.abs(gains.b) >= lambda_op.gain_tol
    n_live = int(np.sum(live))
    dim = n_live + extra_dims

    # the perturbations are polynomials of degree dim - 1, so the moment map
    # is built on a rule with wide margin for that degree and checked
    # against its panel doubling
    rule = QuadratureConfig(max(quad.panels, dim), 16)
    moments = _legendre_moments(alpha, T, basis.lam[live], dim, rule)
    drift = np.max(np.abs(_legendre_moments(alpha, T, basis.lam[live], dim, rule.doubled())
                          - moments))
    if drift > 1e-13 * np.max(np.abs(moments)):
        raise QuadratureError(f"moment map not converged (change {drift:.3e})")

    _, s, vt = np.linalg.svd(moments)
    rank = int(np.sum(s > 1e-13 * s[0])) if s.size else 0
    null = vt[rank:].T
    if null.shape[1] == 0:
        return MinimalityReport(0, (), orth_tol, energy_slack, steer_tol,
                                note="kernel dimension 0 at this grid")

    rng = np.random.default_rng(seed)
    u_star = solution.u_star
    e_star = control_energy(u_star)
    u_norm = math.sqrt(max(e_star, 0.0))
    target_scale = max(1.0, restrict_norm(solution.target, mass))
    zero = SpectralField.zeros(basis.n_modes)
    results = []
    for _ in range(trials):
        c = null @ rng.standard_normal(null.shape[1])
        v = _legendre_signal(c, T)
        v_norm = math.sqrt(control_energy(v))
        if v_norm > 0 and u_norm > 0:
            v = _legendre_signal(c * (0.5 * u_norm / v_norm), T)
            v_norm = 0.5 * u_norm
        inner = signal_inner(u_star, v)
        denom = u_norm * v_norm
        response = mild_solution(zero, solution.actuator, v, alpha, T, basis, rule)
        results.append(PerturbationTrial(
            orthogonality=abs(inner) / denom if denom > 0 else abs(inner),
            energy_star=e_star,
            energy_perturbed=control_energy(u_star + v),
            energy_v=control_energy(v),
            steering_change=restrict_norm(response, mass) / target_scale,
        ))
    return MinimalityReport(null.shape[1], tuple(results), orth_tol, energy_slack, steer_tol)


# }}}
