"""Truncated Dirichlet-Laplacian eigenbasis on [0, 1] and subregion geometry.

States are coefficient vectors ``c_i = (z, xi_i)`` in the orthonormal basis
``xi_i(x) = sqrt(2) sin(i pi x)`` with eigenvalues ``lambda_i = -(i pi)**2``.
A field restricted to a subregion ``omega`` keeps its full coefficient
vector; inner products on ``omega`` go through the mass matrix
``M_ij = int_omega xi_i xi_j dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from frachum.errors import DomainError, InputError
from frachum.quadrature import gauss_legendre_panels

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class EigenBasis:
    n_modes: int
    lam: np.ndarray = field(repr=False)

    @property
    def indices(self) -> np.ndarray:
        """Mode numbers 1..N."""
        return np.arange(1, self.n_modes + 1)

    def eigenfunctions(self, x) -> np.ndarray:
        """Matrix ``xi_i(x_k)`` with modes along the first axis."""
        x = np.asarray(x, dtype=float)
        return SQRT2 * np.sin(np.pi * np.multiply.outer(self.indices, x))


def build_basis(n_modes: int) -> EigenBasis:
    if n_modes < 1:
        raise DomainError(f"n_modes must be >= 1, got {n_modes}")
    i = np.arange(1, n_modes + 1, dtype=float)
    lam = -((i * np.pi) ** 2)
    lam.flags.writeable = False
    return EigenBasis(int(n_modes), lam)


@dataclass(frozen=True)
class SpectralField:
    """A state as its eigencoefficients ``(z, xi_i)``, i = 1..N."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if not np.all(np.isfinite(c)):
            raise InputError("field coefficients must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size

    @classmethod
    def zeros(cls, n_modes: int) -> SpectralField:
        return cls(np.zeros(n_modes))

    @classmethod
    def mode(cls, i: int, n_modes: int) -> SpectralField:
        """Unit coefficient vector on mode ``i`` (1-based)."""
        if not 1 <= i <= n_modes:
            raise DomainError(f"mode {i} outside 1..{n_modes}")
        c = np.zeros(n_modes)
        c[i - 1] = 1.0
        return cls(c)

    def norm(self) -> float:
        """L2(0,1) norm, by Parseval."""
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: SpectralField) -> SpectralField:
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: SpectralField) -> SpectralField:
        return SpectralField(self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> SpectralField:
        return SpectralField(scalar * self.coeffs)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Region:
    """Subinterval ``[sigma1, sigma2]`` of [0, 1] with positive length."""

    sigma1: float
    sigma2: float

    def __post_init__(self):
        if not 0.0 <= self.sigma1 < self.sigma2 <= 1.0:
            raise DomainError(
                f"region must satisfy 0 <= sigma1 < sigma2 <= 1, "
                f"got [{self.sigma1}, {self.sigma2}]"
            )

    @property
    def length(self) -> float:
        return self.sigma2 - self.sigma1

    def contains(self, other: Region) -> bool:
        return self.sigma1 <= other.sigma1 and other.sigma2 <= self.sigma2


FULL_DOMAIN = Region(0.0, 1.0)


@dataclass(frozen=True)
class RegionMass:
    region: Region
    matrix: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0]


def evaluate_field(field: SpectralField, x) -> float | np.ndarray:
    """Point values ``sum_i c_i sqrt(2) sin(i pi x)`` for ``x`` in [0, 1]."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or not np.all(np.isfinite(xa)):
        raise DomainError("x must lie in [0, 1]")
    i = np.arange(1, field.n_modes + 1)
    vals = SQRT2 * np.tensordot(field.coeffs, np.sin(np.pi * np.multiply.outer(i, xa)), axes=1)
    return float(vals) if xa.ndim == 0 else vals


def expand_function(f, basis: EigenBasis, quad_nodes: int | None = None,
                    return_error: bool = False):
    """Project a pointwise function onto the basis by Gauss-Legendre quadrature.

    The rule uses ``quad_nodes`` points split into 8-node panels (default
    ``8 * N``, at least ``4 * N``). With ``return_error=True`` the change in
    coefficients under node doubling is returned as well.
    """
    n = basis.n_modes
    if quad_nodes is None:
        quad_nodes = 8 * n
    if quad_nodes < 4 * n:
        raise DomainError(f"quad_nodes must be >= 4*N = {4 * n}, got {quad_nodes}")

    def project(nodes_total: int) -> np.ndarray:
        panels = max(1, -(-nodes_total // 8))
        x, w = gauss_legendre_panels(np.linspace(0.0, 1.0, panels + 1), 8)
        fx = np.asarray(f(x), dtype=float)
        if fx.shape != x.shape:
            fx = np.broadcast_to(fx, x.shape)
        if not np.all(np.isfinite(fx)):
            raise InputError("function samples must be finite")
        return basis.eigenfunctions(x) @ (w * fx)

    coeffs = project(quad_nodes)
    result = SpectralField(coeffs)
    if return_error:
        err = float(np.max(np.abs(project(2 * quad_nodes) - coeffs)))
        return result, err
    return result


def _sin_antiderivative_diff(k: np.ndarray, a: float, b: float) -> np.ndarray:
    """``int_a^b cos(k pi x) dx`` elementwise, with the k = 0 case."""
    out = np.empty(k.shape, dtype=float)
    zero = k == 0
    out[zero] = b - a
    kk = k[~zero] * np.pi
    out[~zero] = (np.sin(kk * b) - np.sin(kk * a)) / kk
    return out


def region_mass(region: Region, basis: EigenBasis) -> RegionMass:
    """Closed-form ``M_ij = 2 int_omega sin(i pi x) sin(j pi x) dx``.

    Uses ``2 sin(u) sin(v) = cos(u - v) - cos(u + v)``.
    """
    i = basis.indices
    d = np.subtract.outer(i, i)
    s = np.add.outer(i, i)
    a, b = region.sigma1, region.sigma2
    m = _sin_antiderivative_diff(d, a, b) - _sin_antiderivative_diff(s, a, b)
    m = 0.5 * (m + m.T)
    if a == 0.0 and b == 1.0:
        m = np.eye(basis.n_modes)
    m.flags.writeable = False
    return RegionMass(region, m)


def restrict_norm(field: SpectralField, mass: RegionMass) -> float:
    """``||p_omega z||_{L2(omega)} = sqrt(c^T M c)``."""
    if field.n_modes != mass.n_modes:
        raise InputError(
            f"dimension mismatch: field has {field.n_modes} modes, mass has {mass.n_modes}"
        )
    c = field.coeffs
    q = float(c @ mass.matrix @ c)
    return math.sqrt(max(q, 0.0))
