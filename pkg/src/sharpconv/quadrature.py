"""Small quadrature helpers shared across modules."""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import roots_hermite, roots_laguerre, roots_legendre


@functools.lru_cache(maxsize=32)
def quarter_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on ``[0, pi/2]`` clustered at both ends.

    Uses ``theta = (pi/2) nu(u)`` with ``nu(u) = u - sin(2 pi u)/(2 pi)``
    and the midpoint rule in ``u``. The Jacobian vanishes to second order at
    the ends, which tames weak endpoint singularities of the integrand.
    """
    u = (np.arange(n) + 0.5) / n
    theta = (math.pi / 2) * (u - np.sin(2 * math.pi * u) / (2 * math.pi))
    w = (math.pi / 2) * (1 - np.cos(2 * math.pi * u)) / n
    theta.setflags(write=False)
    w.setflags(write=False)
    return theta, w


@functools.lru_cache(maxsize=16)
def legendre(n: int):
    return roots_legendre(n)


@functools.lru_cache(maxsize=16)
def hermite(n: int):
    return roots_hermite(n)


@functools.lru_cache(maxsize=16)
def laguerre(n: int):
    return roots_laguerre(n)


def gl_panels(edges, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights over consecutive ``edges``."""
    x, w = legendre(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (a + b) + 0.5 * (b - a) * x
    weights = 0.5 * (b - a) * w
    return nodes.ravel(), weights.ravel()


def hermite_2d(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Hermite rule for ``int_{R^2} e^{-|x|^2} f(x) dx``."""
    x, w = hermite(n)
    X = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
    W = np.outer(w, w).ravel()
    return X, W
