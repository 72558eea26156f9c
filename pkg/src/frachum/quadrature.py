"""Composite Gauss-Legendre rules on explicit panel edges."""

from __future__ import annotations

import functools

import numpy as np

# smallest panel edge relative to the interval length on graded meshes
GRADING_FLOOR = 1e-12


@functools.lru_cache(maxsize=32)
def _reference_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre_panels(edges, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an ``n``-point Gauss-Legendre rule on every
    panel ``[edges[k], edges[k+1]]``, concatenated."""
    edges = np.asarray(edges, dtype=float)
    x, w = _reference_rule(n)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_edges(length: float, panels: int, floor: float = GRADING_FLOOR) -> np.ndarray:
    """Panel edges on ``[0, length]`` refined geometrically toward 0.

    The ``panels - 1`` interior edges are ``length * q**k`` with ``q`` chosen
    so that the smallest one equals ``floor * length``; the last panel is
    ``[0, floor * length]``. Geometric grading resolves both algebraic
    endpoint singularities and boundary layers of width ``1/|lambda|``.
    """
    if panels < 1:
        raise ValueError("panels must be >= 1")
    if panels == 1:
        return np.array([0.0, length])
    q = floor ** (1.0 / (panels - 1))
    interior = length * q ** np.arange(panels)
    return np.concatenate([[0.0], interior[::-1]])


def mixed_edges(length: float, panels: int, floor: float = GRADING_FLOOR) -> np.ndarray:
    """Union of :func:`graded_edges` and ``panels`` uniform panels.

    The graded part handles the endpoint at 0; the uniform part caps the
    panel width at ``length / panels`` so oscillatory integrands are
    resolved away from it.
    """
    return np.union1d(graded_edges(length, panels, floor), np.linspace(0.0, length, panels + 1))
