"""Convex-surface primitives.

A surface is ``psi = |y|^2 + phi(y)`` (paraboloid base) or ``Psi = |y|^p``
(pure-power base). All evaluators are vectorised over leading axes: points
are arrays of shape ``(..., 2)``.

The implicit rescaling ``lam(w)`` solves

    psi(xi/2 + lam*w) + psi(xi/2 - lam*w) - 2*psi(xi/2) = 2*|w|^2,

i.e. it maps the level sets of the paraboloid comparison function onto those
of ``psi``. ``T(y) = lam(y) * y`` is the comparison transformation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .config import NumericConfig
from .errors import ConvexityError, DomainError, EvaluationError, SolverError

Evaluator = Callable[[np.ndarray], np.ndarray]

_BISECT_WIDTH = 1e-3
_TINY_W = 1e-8


def unit_weight(y):
    y = np.asarray(y, dtype=float)
    return np.ones(y.shape[:-1])


@dataclass(frozen=True)
class SurfaceSpec:
    """An immutable surface description.

    For ``base == "paraboloid"`` the evaluators describe the perturbation
    ``phi`` and ``psi = |y|^2 + phi``. For ``base == "purepower"`` they
    describe ``Psi`` itself and no quadratic part is added.

    ``sym_diff(c, v)`` returns ``phi(c+v) + phi(c-v) - 2 phi(c)``; supplying
    it avoids cancellation when ``|v|`` is small next to ``|c|``.
    """

    name: str
    phi: Evaluator
    grad_phi: Evaluator
    hess_phi: Evaluator
    weight: Evaluator = unit_weight
    base: str = "paraboloid"
    p: float | None = None
    sym_diff: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    radial: bool = False
    strictly_convex: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.base not in ("paraboloid", "purepower"):
            raise DomainError(f"unknown base {self.base!r}")
        if self.base == "purepower" and (self.p is None or self.p < 2):
            raise DomainError("pure-power base needs p >= 2")

    @property
    def is_purepower(self) -> bool:
        return self.base == "purepower"

    def with_weight(self, weight: Evaluator, suffix: str = "weighted") -> "SurfaceSpec":
        return SurfaceSpec(
            name=f"{self.name}[{suffix}]",
            phi=self.phi,
            grad_phi=self.grad_phi,
            hess_phi=self.hess_phi,
            weight=weight,
            base=self.base,
            p=self.p,
            sym_diff=self.sym_diff,
            radial=self.radial,
            strictly_convex=self.strictly_convex,
            params=dict(self.params),
        )

    # psi-level evaluators

    def psi(self, y):
        y = np.asarray(y, dtype=float)
        val = _finite(self.phi(y), self.name, "phi")
        if self.is_purepower:
            return val
        return np.sum(y * y, axis=-1) + val

    def grad_psi(self, y):
        y = np.asarray(y, dtype=float)
        val = _finite(self.grad_phi(y), self.name, "grad_phi")
        if self.is_purepower:
            return val
        return 2.0 * y + val

    def hess_psi(self, y):
        y = np.asarray(y, dtype=float)
        val = _finite(self.hess_phi(y), self.name, "hess_phi")
        if self.is_purepower:
            return val
        return 2.0 * np.eye(2) + val

    def psi_sym_diff(self, c, v):
        """``psi(c+v) + psi(c-v) - 2 psi(c)``."""
        c = np.asarray(c, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.sym_diff is not None:
            val = _finite(self.sym_diff(c, v), self.name, "sym_diff")
        else:
            val = self.phi(c + v) + self.phi(c - v) - 2.0 * self.phi(c)
            val = _finite(val, self.name, "phi")
        if self.is_purepower:
            return val
        return 2.0 * np.sum(v * v, axis=-1) + val


def _finite(val, name, what):
    val = np.asarray(val, dtype=float)
    if not np.all(np.isfinite(val)):
        raise EvaluationError(f"{name}: non-finite {what} output")
    return val


class SurfaceEval(NamedTuple):
    psi: float
    grad: np.ndarray
    hess: np.ndarray
    degenerate: bool = False


def surface_eval(s: SurfaceSpec, y) -> SurfaceEval:
    """Value, gradient and Hessian of the full surface function at ``y``.

    ``degenerate`` is set when the Hessian is singular (the pure-power case
    at the origin) instead of raising.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (2,) or not np.all(np.isfinite(y)):
        raise DomainError("y must be a finite point of R^2")
    hess = s.hess_psi(y)
    degenerate = bool(np.linalg.det(hess) <= 0.0)
    return SurfaceEval(float(s.psi(y)), s.grad_psi(y), hess, degenerate)


def g_function(s: SurfaceSpec, xi, y, t):
    """``g(t) = psi(xi/2 - t y) + psi(xi/2 + t y) - 2 psi(xi/2)``."""
    c = np.asarray(xi, dtype=float) / 2.0
    y = np.asarray(y, dtype=float)
    t = np.asarray(t, dtype=float)
    return s.psi_sym_diff(c, t[..., None] * y)


def lambda_batch(s: SurfaceSpec, xi, w, cfg: NumericConfig | None = None) -> np.ndarray:
    """Vectorised implicit solve for ``lam(w)``; see module docstring.

    ``xi`` and ``w`` broadcast against each other over leading axes.
    Brackets the root (``[0, 1]`` suffices for paraboloid-base surfaces),
    bisects to width 1e-3 and then runs safeguarded Newton.
    """
    cfg = cfg or NumericConfig()
    c = np.asarray(xi, dtype=float) / 2.0
    w = np.asarray(w, dtype=float)
    c, w = np.broadcast_arrays(c, w)
    w2 = np.sum(w * w, axis=-1)
    target = 2.0 * w2
    tiny = w2 < _TINY_W**2

    def G(lam):
        return s.psi_sym_diff(c, lam[..., None] * w) - target

    def dG(lam):
        step = lam[..., None] * w
        u = s.grad_psi(c + step) - s.grad_psi(c - step)
        return np.sum(u * w, axis=-1)

    lo = np.zeros(w2.shape)
    hi = np.ones(w2.shape)
    g_hi = G(hi)
    for _ in range(cfg.max_iter):
        grow = (g_hi < 0) & ~tiny
        if not grow.any():
            break
        lo = np.where(grow, hi, lo)
        hi = np.where(grow, 2.0 * hi, hi)
        g_hi = np.where(grow, G(hi), g_hi)
    else:
        raise SolverError("could not bracket lam: surface grows too slowly")

    exact = g_hi == 0.0
    while True:
        open_ = (hi - lo > _BISECT_WIDTH) & ~exact & ~tiny
        if not open_.any():
            break
        mid = 0.5 * (lo + hi)
        g_mid = G(mid)
        below = g_mid < 0
        lo = np.where(open_ & below, mid, lo)
        hi = np.where(open_ & ~below, mid, hi)

    lam = np.where(exact, hi, 0.5 * (lo + hi))
    scale = np.maximum(target, np.finfo(float).tiny)
    done = exact | tiny
    for _ in range(cfg.max_iter):
        g = G(lam)
        conv = done | (np.abs(g) <= cfg.root_tol * scale)
        if conv.all():
            break
        lo = np.where(g < 0, np.maximum(lo, lam), lo)
        hi = np.where(g > 0, np.minimum(hi, lam), hi)
        d = dG(lam)
        with np.errstate(divide="ignore", invalid="ignore"):
            new = lam - g / d
        bad = ~np.isfinite(new) | (new <= lo) | (new >= hi)
        new = np.where(bad, 0.5 * (lo + hi), new)
        stalled = np.abs(new - lam) <= 4 * np.finfo(float).eps * np.maximum(lam, 1.0)
        done = done | conv | stalled
        lam = np.where(conv, lam, new)
    else:
        raise SolverError(f"lam solve did not converge in {cfg.max_iter} iterations")

    if tiny.any():
        lam = np.where(tiny, _small_w_limit(s, c, w), lam)
    return lam


def _small_w_limit(s, c, w):
    # lam -> sqrt(2 / <omega, H(psi)(c) omega>) as |w| -> 0
    norm = np.sqrt(np.sum(w * w, axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        omega = np.where(norm[..., None] > 0, w / norm[..., None], np.array([1.0, 0.0]))
    quad = np.einsum("...i,...ij,...j->...", omega, s.hess_psi(c), omega)
    if np.any(quad <= 0):
        raise DomainError("degenerate Hessian: lam has no finite limit as |w| -> 0")
    return np.sqrt(2.0 / quad)


def solve_lambda(s: SurfaceSpec, xi, w, cfg: NumericConfig | None = None) -> float:
    """Scalar implicit rescaling ``lam(w)`` at fixed ``xi``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (2,):
        raise DomainError("w must be a point of R^2")
    if not np.any(w):
        raise DomainError("lam is undefined at w = 0")
    return float(lambda_batch(s, xi, w, cfg))


def transform_T(s: SurfaceSpec, xi, y, cfg: NumericConfig | None = None) -> np.ndarray:
    """``T(y) = lam(y) y``; maps paraboloid level sets onto those of psi."""
    y = np.asarray(y, dtype=float)
    return solve_lambda(s, xi, y, cfg) * y


def det_T_prime(s: SurfaceSpec, xi, y, cfg: NumericConfig | None = None) -> float:
    """Jacobian determinant of ``T`` at ``y`` (d = 2, comparison ``|.|^2``).

    ``det T'(y) = lam * <4y, y> / <grad psi(xi/2 + T y) - grad psi(xi/2 - T y), y>``.
    """
    return float(det_T_prime_batch(s, xi, y, cfg))


def det_T_prime_batch(s: SurfaceSpec, xi, y, cfg: NumericConfig | None = None) -> np.ndarray:
    c = np.asarray(xi, dtype=float) / 2.0
    y = np.asarray(y, dtype=float)
    if np.any(np.sum(y * y, axis=-1) == 0):
        raise DomainError("det T' is undefined at y = 0")
    lam = lambda_batch(s, xi, y, cfg)
    step = lam[..., None] * y
    u = s.grad_psi(c + step) - s.grad_psi(c - step)
    den = np.sum(u * y, axis=-1)
    if np.any(den <= 0):
        raise ConvexityError(f"{s.name}: gradient difference not monotone; surface not strictly convex")
    return lam * 4.0 * np.sum(y * y, axis=-1) / den


def check_surface(s: SurfaceSpec, points, rtol: float = 1e-5, h: float = 1e-5) -> list[str]:
    """Sample the SurfaceSpec invariants; returns human-readable violations."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    problems = []
    phi = s.phi(pts)
    if np.any(phi < 0):
        problems.append("phi < 0 at some sampled point")
    eig = np.linalg.eigvalsh(s.hess_psi(pts))
    nonzero = np.sum(pts * pts, axis=-1) > 0
    if np.any(eig[nonzero, 0] <= 0):
        problems.append("Hessian of psi not positive definite")
    e = np.eye(2)
    for k in range(2):
        fd = (s.phi(pts + h * e[k]) - s.phi(pts - h * e[k])) / (2 * h)
        an = s.grad_phi(pts)[:, k]
        if not np.allclose(fd, an, rtol=rtol, atol=rtol * (1 + np.abs(phi))):
            problems.append(f"grad_phi[{k}] disagrees with finite differences")
        fd_h = (s.grad_phi(pts + h * e[k]) - s.grad_phi(pts - h * e[k])) / (2 * h)
        an_h = s.hess_phi(pts)[:, :, k]
        scale = 1 + np.abs(an_h).max()
        if not np.allclose(fd_h, an_h, rtol=rtol, atol=rtol * scale):
            problems.append(f"hess_phi[:, {k}] disagrees with finite differences")
    return problems
