"""Mittag-Leffler function on the non-positive real axis and the Wright-type
density used to build the fractional solution operators.

Only real arguments ``z <= 0`` are supported, which is all the spectral
solver ever produces (``z = lambda_i * t**alpha`` with ``lambda_i < 0``).

Evaluation strategy
-------------------
* ``alpha == 1`` and ``beta == 1``: ``exp(z)``.
* ``|z| > asymptotic_crossover``: the algebraic expansion
  ``-sum_k z**-k / Gamma(beta - alpha*k)`` is tried first. It is accepted
  only when its optimal-truncation remainder plus an estimate of the
  exponentially small branch-cut remainder are below the tolerance.
* For ``alpha <= 0.95``, ``alpha <= beta <= 1`` and ``|z| >= 0.5``, the
  real-axis integral representation

      E_{a,b}(z) = (1/pi) int_0^inf e**-s s**(a-b)
                   (s**a sin(pi(1-b)) - z sin(pi(1-b+a)))
                   / (s**(2a) - 2 s**a z cos(pi a) + z**2) ds

  is used. After ``s = e**y`` the integrand is analytic in a strip of
  half-width ``min(pi(1-a)/a, pi/2)`` and decays on both sides, so the
  trapezoidal rule converges geometrically; the step is set from the strip
  width. The integrand is positive, so there is no cancellation, and the
  rule vectorizes over ``z``.
* Otherwise the Taylor series is summed; if it would need more than
  ``series_max_terms`` terms the asymptotic branch is retried below the
  crossover before giving up. When the alternating terms
  cancel badly the sum is redone in extended precision (mpmath), with the
  working precision derived from the size of the largest term.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.special import gammaln, gammasgn, rgamma

from frachum.errors import DomainError, EvaluationError

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MLFConfig:
    """Accuracy knobs for :func:`mittag_leffler`.

    ``asymptotic_terms`` caps the number of terms of the algebraic
    expansion; the expansion is truncated earlier at its smallest term.
    """

    series_tol: float = 1e-12
    series_max_terms: int = 400
    asymptotic_crossover: float = 10.0
    asymptotic_terms: int = 200

    def __post_init__(self):
        if not self.series_tol > 0:
            raise DomainError(f"series_tol must be positive, got {self.series_tol}")
        if self.series_max_terms < 50:
            raise DomainError(
                f"series_max_terms must be >= 50, got {self.series_max_terms}"
            )
        if not self.asymptotic_crossover > 0:
            raise DomainError(
                "asymptotic_crossover must be positive, "
                f"got {self.asymptotic_crossover}"
            )
        if self.asymptotic_terms < 1:
            raise DomainError(
                f"asymptotic_terms must be >= 1, got {self.asymptotic_terms}"
            )


DEFAULT_MLF = MLFConfig()

INTEGRAL_MAX_ALPHA = 0.95
INTEGRAL_MIN_ARG = 0.5
# trapezoidal error ~ exp(-2 pi d / h); h = 2 pi d / _STRIP_DIGITS
_STRIP_DIGITS = 36.0
_INTEGRAL_CHUNK = 4096


def _check_args(alpha: float, beta: float, z: float) -> None:
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha out of (0,1]: {alpha}")
    if not beta > 0.0:
        raise DomainError(f"beta must be positive: {beta}")
    if not z <= 0.0:
        raise DomainError(f"z must be real and non-positive: {z}")


# {{{ Taylor series


@functools.lru_cache(maxsize=64)
def _series_coefficients(alpha: float, beta: float, nterms: int, dps: int):
    """1/Gamma(alpha*k + beta) for k < nterms at ``dps`` digits."""
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        b = mpmath.mpf(beta)
        return tuple(mpmath.rgamma(a * k + b) for k in range(nterms))


def _series_term_logs(alpha: float, beta: float, r: float, nterms: int) -> np.ndarray:
    k = np.arange(nterms, dtype=float)
    with np.errstate(divide="ignore"):
        logr = math.log(r) if r > 0 else -np.inf
    logs = k * logr - gammaln(alpha * k + beta)
    logs[0] = -gammaln(beta)
    return logs


def _truncation_index(logs: np.ndarray, log_threshold: float) -> int | None:
    """First index past the peak whose term drops below the threshold."""
    peak = int(np.argmax(logs))
    below = np.nonzero(logs[peak:] < log_threshold)[0]
    if below.size == 0:
        return None
    return peak + int(below[0])


def _series(alpha: float, beta: float, z: float, cfg: MLFConfig) -> float:
    r = -z
    nmax = cfg.series_max_terms
    logs = _series_term_logs(alpha, beta, r, nmax + 1)
    peak = float(logs.max())

    # a first pass in double precision gives a magnitude estimate
    kcut = _truncation_index(logs, peak + math.log(_EPS) - 10.0)
    if kcut is None:
        kcut = nmax
    k = np.arange(kcut)
    terms = np.where(k % 2 == 0, 1.0, -1.0) * np.exp(logs[:kcut])
    value = math.fsum(terms)

    rounding = 4.0 * _EPS * math.exp(peak) * math.sqrt(kcut + 1)
    if value != 0.0 and rounding <= 0.1 * cfg.series_tol * abs(value):
        kstop = _truncation_index(logs, math.log(cfg.series_tol * abs(value)) - 5.0)
        if kstop is None:
            raise EvaluationError(
                "Mittag-Leffler series did not converge within series_max_terms",
                alpha=alpha, beta=beta, z=z,
            )
        return value

    # heavy cancellation: redo in extended precision
    log10_peak = peak / math.log(10.0)
    guess = abs(value) if value != 0.0 and math.isfinite(value) else 1e-30
    dps = max(30, int(log10_peak - math.log10(guess)) + 25)
    for _ in range(4):
        dps = 32 * (dps // 32 + 1)
        kstop = _truncation_index(
            logs, math.log(cfg.series_tol) + math.log(guess) - 12.0
        )
        if kstop is None:
            raise EvaluationError(
                "Mittag-Leffler series did not converge within series_max_terms",
                alpha=alpha, beta=beta, z=z,
            )
        coeffs = _series_coefficients(alpha, beta, nmax + 1, dps)
        with mpmath.workdps(dps):
            zz = mpmath.mpf(z)
            acc = mpmath.mpf(0)
            for c in reversed(coeffs[: kstop + 1]):
                acc = acc * zz + c
            result = float(acc)
        if result == 0.0:
            guess = guess * 1e-30
            dps += 30
            continue
        needed = int(log10_peak - math.log10(abs(result))) + 20
        if needed <= dps and abs(result) >= 0.5 * guess:
            return result
        guess = min(guess, abs(result))
        dps = max(dps, needed)
    raise EvaluationError(
        "Mittag-Leffler series lost all precision", alpha=alpha, beta=beta, z=z
    )


# }}}

# {{{ asymptotic expansion


def _asymptotic(alpha: float, beta: float, z: float, cfg: MLFConfig) -> tuple[float, float]:
    """Algebraic expansion and an estimate of its absolute error."""
    r = -z
    k = np.arange(1, cfg.asymptotic_terms + 2, dtype=float)
    # -z**(-k) / Gamma(beta - alpha*k), assembled in logs: r**(-k) underflows
    # long before 1/Gamma(beta - alpha*k) stops growing
    x = beta - alpha * k
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        pole = (x <= 0) & (x == np.round(x))
        sign = np.where(pole, 0.0, np.where(k % 2 == 0, -1.0, 1.0) * gammasgn(x))
        terms = sign * np.exp(np.where(pole, -np.inf, -k * math.log(r) - gammaln(x)))

    # |1/Gamma(x)| <= Gamma(1-x)/pi by reflection; the envelope is smooth
    # while the terms themselves oscillate through the zeros of 1/Gamma
    log_env = -k * math.log(r) + gammaln(1.0 - beta + alpha * k) - math.log(math.pi)
    stop = int(np.argmin(log_env))
    value = math.fsum(terms[:stop])
    remainder = math.exp(log_env[stop])

    # branch-cut remainder: weight exp(-rho) near rho = r**(1/alpha), amplified
    # by the near-pole 1/|1 + exp(i*pi*alpha)| as alpha -> 1
    gap = 2.0 * math.cos(0.5 * math.pi * alpha)
    if gap <= 1e-300:
        return value, math.inf
    with np.errstate(over="ignore", under="ignore"):
        pole = (
            (1.0 / alpha) * r ** ((1.0 - beta) / alpha)
            * math.exp(-min(700.0, r ** (1.0 / alpha))) / gap
        )
    return value, remainder + pole


# }}}


# {{{ integral representation


def _sinpi(x: float) -> float:
    """``sin(pi x)``, exactly zero at integers."""
    r = math.fmod(x, 2.0)
    if r < 0.0:
        r += 2.0
    if r == 0.0 or r == 1.0:
        return 0.0
    if r > 1.0:
        return -_sinpi(r - 1.0)
    return math.sin(math.pi * min(r, 1.0 - r))


def _integral_applies(alpha: float, beta: float) -> bool:
    return 0.0 < alpha <= INTEGRAL_MAX_ALPHA and alpha <= beta <= 1.0


@functools.lru_cache(maxsize=64)
def _integral_rule(alpha: float, beta: float):
    strip = min(math.pi * (1.0 - alpha) / alpha, 0.5 * math.pi)
    h = 2.0 * math.pi * strip / _STRIP_DIGITS
    growth = alpha - beta + 1.0
    y = np.arange(math.log(1e-18) / growth, math.log(60.0) + h, h)
    u = np.exp(alpha * y)
    weight = np.exp(-np.exp(y) + growth * y) * (h / math.pi)
    coef = (_sinpi(1.0 - beta), _sinpi(1.0 - beta + alpha), math.cos(math.pi * alpha))
    for arr in (u, weight):
        arr.flags.writeable = False
    return u, weight, coef


def _integral(alpha: float, beta: float, z: np.ndarray) -> np.ndarray:
    u, weight, (a_sin, b_sin, cos_a) = _integral_rule(alpha, beta)
    out = np.empty(z.shape, dtype=float)
    for start in range(0, z.size, _INTEGRAL_CHUNK):
        zc = z[start:start + _INTEGRAL_CHUNK, None]
        integrand = (u * a_sin - zc * b_sin) / (u * (u - 2.0 * cos_a * zc) + zc * zc)
        out[start:start + _INTEGRAL_CHUNK] = integrand @ weight
    return out


# }}}


@functools.lru_cache(maxsize=1 << 17)
def _mittag_leffler_cached(alpha: float, beta: float, z: float, cfg: MLFConfig) -> float:
    if z == 0.0:
        return float(rgamma(beta))
    if alpha == 1.0 and beta == 1.0:
        return math.exp(z)
    if -z > cfg.asymptotic_crossover:
        value, err = _asymptotic(alpha, beta, z, cfg)
        if value != 0.0 and err <= 0.5 * cfg.series_tol * abs(value):
            return value
    if -z >= INTEGRAL_MIN_ARG and _integral_applies(alpha, beta):
        return float(_integral(alpha, beta, np.array([z]))[0])
    try:
        return _series(alpha, beta, z, cfg)
    except EvaluationError:
        # small alpha exhausts the term budget below the crossover
        value, err = _asymptotic(alpha, beta, z, cfg)
        if value != 0.0 and err <= 0.5 * cfg.series_tol * abs(value):
            return value
        raise


def mittag_leffler(alpha: float, beta: float, z: float, cfg: MLFConfig = DEFAULT_MLF) -> float:
    """Generalized Mittag-Leffler function ``E_{alpha,beta}(z)`` for ``z <= 0``.

    Parameters
    ----------
    alpha : float
        Order in ``(0, 1]``.
    beta : float
        Second parameter, ``beta > 0``.
    z : float
        Non-positive real argument.
    cfg : MLFConfig
        Tolerances and branch switches.

    Raises
    ------
    DomainError
        For parameters outside the supported ranges.
    EvaluationError
        When neither branch reaches ``cfg.series_tol``.
    """
    alpha, beta, z = float(alpha), float(beta), float(z)
    _check_args(alpha, beta, z)
    return _mittag_leffler_cached(alpha, beta, z, cfg)


def mittag_leffler_array(alpha: float, beta: float, z, cfg: MLFConfig = DEFAULT_MLF) -> np.ndarray:
    """Elementwise :func:`mittag_leffler` over an array of arguments."""
    alpha, beta = float(alpha), float(beta)
    z = np.asarray(z, dtype=float)
    if z.size and not np.all(z <= 0.0):
        raise DomainError("z must be real and non-positive")
    _check_args(alpha, beta, 0.0)
    if alpha == 1.0 and beta == 1.0:
        return np.exp(z)
    flat = z.ravel()
    out = np.empty(flat.size, dtype=float)
    bulk = -flat >= INTEGRAL_MIN_ARG if _integral_applies(alpha, beta) else np.zeros(flat.size, bool)
    if np.any(bulk):
        out[bulk] = _integral(alpha, beta, flat[bulk])
    rest = np.nonzero(~bulk)[0]
    out[rest] = [_mittag_leffler_cached(alpha, beta, float(flat[k]), cfg) for k in rest]
    return out.reshape(z.shape)


# {{{ Wright-type density


class SeriesValue(NamedTuple):
    value: float
    tail_bound: float


def _wright_term_logs(alpha: float, theta: float, n: np.ndarray) -> np.ndarray:
    """log of theta**(-alpha*n-1) * Gamma(n*alpha+1) / n!, the sine left out."""
    return (-alpha * n - 1.0) * math.log(theta) + gammaln(n * alpha + 1.0) - gammaln(n + 1.0)


def _wright_series(alpha: float, theta: float, terms: int, max_dps: int = 200) -> SeriesValue:
    n = np.arange(1, terms + 3, dtype=float)
    logs = _wright_term_logs(alpha, theta, n)

    # tail: the sine-free magnitudes decay with a monotonically shrinking ratio
    ratio = math.exp(logs[terms + 1] - logs[terms])
    if ratio < 1.0 and logs[terms + 1] <= logs[terms]:
        tail = math.exp(logs[terms]) / (1.0 - ratio)
    else:
        tail = math.inf

    nn = n[:terms]
    sines = np.sin(nn * math.pi * alpha)
    signs = np.where(nn % 2 == 1, 1.0, -1.0)
    peak = float(logs[:terms].max())
    if peak > 700.0:
        value = math.nan
    else:
        value = math.fsum(signs * sines * np.exp(logs[:terms])) / math.pi
    rounding = 8.0 * _EPS * math.exp(min(peak, 700.0)) * math.sqrt(terms)

    if math.isfinite(value) and rounding <= 1e-3 * max(abs(value), tail, 1e-300):
        return SeriesValue(value, tail)

    dps = int(peak / math.log(10.0)) + 30
    if dps > max_dps:
        raise EvaluationError(
            "Wright density series unstable at this theta", alpha=alpha, theta=theta
        )
    with mpmath.workdps(dps):
        a = mpmath.mpf(alpha)
        th = mpmath.mpf(theta)
        acc = mpmath.mpf(0)
        for k in range(1, terms + 1):
            term = th ** (-a * k - 1) * mpmath.gamma(k * a + 1) / mpmath.factorial(k)
            term *= mpmath.sin(k * mpmath.pi * a)
            acc += term if k % 2 == 1 else -term
        value = float(acc / mpmath.pi)
    return SeriesValue(value, tail)


def wright_density(alpha: float, theta: float, terms: int = 50) -> SeriesValue:
    """Partial sum of the one-sided stable density ``psi_alpha(theta)``.

    ``psi_alpha(theta) = (1/pi) sum_{n>=1} (-1)**(n-1) theta**(-alpha*n-1)
    Gamma(n*alpha+1)/n! sin(n*pi*alpha)``.

    Returns the value together with a bound on the omitted tail. Raises
    :class:`EvaluationError` when ``theta`` is so small that the
    alternating terms overflow before they start to decay.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha out of (0,1): {alpha}")
    if not theta > 0.0:
        raise DomainError(f"theta must be positive: {theta}")
    if terms < 1:
        raise DomainError(f"terms must be >= 1: {terms}")
    return _wright_series(float(alpha), float(theta), int(terms))


def _wright_density_converged(alpha: float, theta: float, rtol: float = 1e-14) -> float:
    terms = 64
    while True:
        val, tail = _wright_series(alpha, theta, terms)
        if tail <= rtol * max(abs(val), 1e-300) or tail < 1e-300:
            return val
        if terms >= 4096:
            raise EvaluationError(
                "Wright density series did not converge", alpha=alpha, theta=theta
            )
        terms *= 2


# }}}

# {{{ moment self-test


def phi_moment_check(alpha: float, nu: float, quad_nodes: int = 256) -> tuple[float, float]:
    """Compare the ``nu``-th moment of ``phi_alpha`` against
    ``Gamma(1+nu) / Gamma(1+alpha*nu)``.

    ``phi_alpha(theta) = theta**(-1-1/alpha) psi_alpha(theta**(-1/alpha)) / alpha``,
    so with ``t = theta**(-1/alpha)`` the moment becomes
    ``int_0^inf t**(-alpha*nu) psi_alpha(t) dt``, which is integrated in
    ``log t`` on composite Gauss-Legendre panels between cutoffs where
    ``psi_alpha`` is negligible.

    Returns ``(numeric, analytic)``.
    """
    from frachum.quadrature import gauss_legendre_panels

    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha out of (0,1): {alpha}")
    if not 0.0 <= nu <= 2.0:
        raise DomainError(f"nu out of [0,2]: {nu}")
    if quad_nodes < 64:
        raise DomainError(f"quad_nodes must be >= 64: {quad_nodes}")

    analytic = math.gamma(1.0 + nu) / math.gamma(1.0 + alpha * nu)

    # upper cutoff: leading large-t term of psi gives the tail in closed form
    lead = math.gamma(1.0 + alpha) * math.sin(math.pi * alpha) / math.pi
    p = alpha * (1.0 + nu)
    upper = (lead / (p * 1e-6)) ** (1.0 / p)
    # lower cutoff: psi ~ exp(-c t**(-alpha/(1-alpha))) as t -> 0
    c = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    lower = (c / math.log(1e16)) ** ((1.0 - alpha) / alpha)

    nodes_per_panel = 16
    panels = max(4, quad_nodes // nodes_per_panel)
    edges = np.linspace(math.log(lower), math.log(upper), panels + 1)
    y, w = gauss_legendre_panels(edges, nodes_per_panel)
    t = np.exp(y)
    psi = np.array([_wright_density_converged(alpha, float(tt)) for tt in t])
    integrand = t ** (1.0 - alpha * nu) * psi
    numeric = float(np.dot(w, integrand))
    if not math.isfinite(numeric):
        raise EvaluationError("moment quadrature produced a non-finite value",
                              alpha=alpha, nu=nu, partial=numeric)
    return numeric, analytic


# }}}
