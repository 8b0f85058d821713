"""Convolution of a surface's projection measure with itself.

Interior values use the angular representation

    (F sigma * G sigma)(xi, tau) = int_{S^1} F(xi/2 + a w) G(xi/2 - a w)
        / <w, (grad psi(xi/2 + a w) - grad psi(xi/2 - a w)) / a> dw,

with ``a = R lam(R w)`` and ``R = sqrt(tau/2 - psi(xi/2))``. The uniform
trapezoid rule on the circle is spectrally accurate for smooth integrands.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from .config import NumericConfig
from .errors import DomainError, QuadratureError, RegionError
from .geometry import SurfaceSpec, lambda_batch

Weight = Callable[[np.ndarray], np.ndarray]

BOUNDARY_RTOL = 1e-12
HALF_PI = math.pi / 2
_CHUNK = 256


def one(y):
    return np.ones(np.asarray(y).shape[:-1])


@dataclass(frozen=True)
class SpaceTimePoint:
    xi: tuple[float, float]
    tau: float

    def __post_init__(self):
        vals = (*self.xi, self.tau)
        if len(self.xi) != 2 or not all(math.isfinite(v) for v in vals):
            raise DomainError("SpaceTimePoint needs finite xi in R^2 and tau")
        object.__setattr__(self, "xi", (float(self.xi[0]), float(self.xi[1])))
        object.__setattr__(self, "tau", float(self.tau))


@dataclass(frozen=True)
class ConvValue:
    value: float
    region: str
    err_est: float

    def as_dict(self) -> dict:
        return asdict(self)


def classify_point(s: SurfaceSpec, p: SpaceTimePoint) -> str:
    """``interior``, ``boundary`` or ``outside`` the support ``tau >= 2 psi(xi/2)``."""
    edge = 2.0 * float(s.psi(np.asarray(p.xi) / 2))
    if abs(p.tau - edge) <= BOUNDARY_RTOL * (1.0 + abs(p.tau)):
        return "boundary"
    return "interior" if p.tau > edge else "outside"


def conv_boundary(s: SurfaceSpec, xi, weight: Weight | None = None) -> float:
    """Boundary value ``pi w(xi/2)^2 / sqrt(det H(psi)(xi/2))``."""
    c = np.asarray(xi, dtype=float) / 2
    det = float(np.linalg.det(s.hess_psi(c)))
    if not det > 0:
        raise DomainError(f"{s.name}: Hessian degenerate at xi/2 = {c.tolist()}")
    w = float((weight or s.weight)(c))
    return math.pi * w * w / math.sqrt(det)


def _circle(n):
    theta = 2 * math.pi * np.arange(n) / n
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def conv_heights(s: SurfaceSpec, F: Weight, G: Weight, xi, height, cfg: NumericConfig, nodes: int | None = None):
    """Batch interior evaluation at ``tau = 2 psi(xi/2) + height``.

    ``xi`` has shape ``(M, 2)`` and ``height`` shape ``(M,)`` with every
    height > 0. Returns ``(values, err_est)``; the error estimate compares
    the ``N``-node rule with the ``N/2``-node rule on the even nodes.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    height = np.atleast_1d(np.asarray(height, dtype=float))
    xi, height = np.broadcast_arrays(xi, height[:, None])
    height = height[:, 0]
    if np.any(~(height > 0)):
        raise RegionError("conv_weighted needs interior points (tau > 2 psi(xi/2))")
    n = nodes or cfg.angular_nodes
    n += n % 4  # half-rule must itself pair antipodes
    omega = _circle(n)
    half = n // 2
    vals = np.empty(len(height))
    errs = np.empty(len(height))
    for start in range(0, len(height), _CHUNK):
        sl = slice(start, start + _CHUNK)
        c = xi[sl, None, :] / 2
        R = np.sqrt(height[sl] / 2)
        # lam(-w) = lam(w): solve on half the circle only
        W = R[:, None, None] * omega[None, :half, :]
        lam = lambda_batch(s, 2 * c, W, cfg)
        alpha = (R[:, None] * lam)[..., None]
        step = alpha * omega[None, :half, :]
        plus, minus = c + step, c - step
        den = np.sum(omega[None, :half, :] * (s.grad_psi(plus) - s.grad_psi(minus)), axis=-1) / alpha[..., 0]
        fp, fm = F(plus), F(minus)
        gp, gm = G(plus), G(minus)
        # node k uses (F(plus) G(minus)); antipode k+n/2 uses (F(minus) G(plus))
        integrand = np.concatenate([fp * gm / den, fm * gp / den], axis=1)
        full = 2 * math.pi * integrand.mean(axis=1)
        coarse = 2 * math.pi * integrand[:, ::2].mean(axis=1)
        vals[sl] = full
        errs[sl] = np.abs(full - coarse)
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("non-finite convolution value", {"surface": s.name})
    return vals, errs


def conv_weighted(
    s: SurfaceSpec,
    F: Weight | None,
    G: Weight | None,
    p: SpaceTimePoint,
    cfg: NumericConfig | None = None,
    *,
    rtol: float | None = None,
    max_nodes: int = 1 << 15,
) -> ConvValue:
    """Interior value of ``F sigma * G sigma`` at ``p``.

    ``F = G = None`` means the surface weight. With ``rtol`` set, the node
    count doubles until ``err_est <= rtol * value`` (or ``max_nodes``).
    """
    cfg = cfg or NumericConfig()
    F = s.weight if F is None else F
    G = s.weight if G is None else G
    region = classify_point(s, p)
    if region != "interior":
        raise RegionError(f"point is {region}; interior formula does not apply")
    xi = np.asarray(p.xi)
    height = p.tau - 2.0 * float(s.psi(xi / 2))
    n = cfg.angular_nodes
    while True:
        v, e = conv_heights(s, F, G, xi[None], np.array([height]), cfg, nodes=n)
        v, e = float(v[0]), float(e[0])
        if rtol is None or e <= rtol * abs(v) or n >= max_nodes:
            break
        n *= 2
    return ConvValue(v, "interior", e)


def conv_eval(s: SurfaceSpec, p: SpaceTimePoint, cfg: NumericConfig | None = None, weighted: bool = True) -> ConvValue:
    """Evaluate anywhere: boundary closed form, zero outside, quadrature inside."""
    region = classify_point(s, p)
    weight = s.weight if weighted else one
    if region == "outside":
        return ConvValue(0.0, "outside", 0.0)
    if region == "boundary":
        return ConvValue(conv_boundary(s, p.xi, weight), "boundary", 0.0)
    return conv_weighted(s, weight, weight, p, cfg)


def conv_oracle(
    s: SurfaceSpec,
    F: Weight | None,
    G: Weight | None,
    p: SpaceTimePoint,
    cfg: NumericConfig | None = None,
    *,
    method: str = "grid",
    rays: int = 1024,
    radial_nodes: int = 12,
) -> float:
    """Brute-force mollified-delta estimate of ``(F sigma * G sigma)(p)``.

    Averages ``F(xi/2+y) G(xi/2-y)`` over the slab
    ``|tau - psi(xi/2+y) - psi(xi/2-y)| < eps`` and divides by ``2 eps``.
    Uses plain psi values only: no implicit rescaling, no gradients.

    ``method="grid"``: polar rays with the slab edges located by bisection
    and Gauss-Legendre across the slab (deterministic).
    ``method="mc"``: uniform samples in a disc covering the slab, seeded by
    ``cfg.seed``; noisy, for sanity checks only.
    """
    cfg = cfg or NumericConfig()
    F = s.weight if F is None else F
    G = s.weight if G is None else G
    eps = cfg.mollify_eps
    c = np.asarray(p.xi, dtype=float) / 2
    base = 2.0 * float(s.psi(c))

    def excess(y):
        return s.psi(c + y) + s.psi(c - y) - base

    theta = 2 * math.pi * (np.arange(rays) + 0.5) / rays
    omega = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    t = p.tau - base
    r_out = _ray_level(excess, omega, t + eps, cfg)
    if method == "grid":
        r_in = _ray_level(excess, omega, t - eps, cfg) if t - eps > 0 else np.zeros(rays)
        x, wts = roots_legendre(radial_nodes)
        half = 0.5 * (r_out - r_in)
        mid = 0.5 * (r_out + r_in)
        rho = mid[:, None] + half[:, None] * x[None, :]
        y = rho[..., None] * omega[:, None, :]
        vals = F(c + y) * G(c - y) * rho
        radial = half * (vals @ wts)
        return float(2 * math.pi * radial.mean() / (2 * eps))
    if method == "mc":
        rmax = 1.05 * float(r_out.max())
        rng = np.random.default_rng(cfg.seed)
        u = rng.random(cfg.mc_samples)
        phi = 2 * math.pi * rng.random(cfg.mc_samples)
        rr = rmax * np.sqrt(u)
        y = np.stack([rr * np.cos(phi), rr * np.sin(phi)], axis=-1)
        inside = np.abs(excess(y) - t) < eps
        vals = np.where(inside, F(c + y) * G(c - y), 0.0)
        return float(math.pi * rmax**2 * vals.mean() / (2 * eps))
    raise DomainError(f"unknown oracle method {method!r}")


def _ray_level(excess, omega, level, cfg):
    """Radius along each ray where ``excess(rho * omega)`` reaches ``level``."""
    lo = np.zeros(len(omega))
    hi = np.ones(len(omega))
    for _ in range(cfg.max_iter):
        short = excess(hi[:, None] * omega) < level
        if not short.any():
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, 2 * hi, hi)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        below = excess(mid[:, None] * omega) < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-15 * hi):
            break
    return 0.5 * (lo + hi)


def comparison_gap(s: SurfaceSpec, xi, t: float, cfg: NumericConfig | None = None) -> float:
    """``pi/2 - (sigma * sigma)(xi, 2 psi(xi/2) + t)``; positive when phi is strictly convex."""
    if not t > 0:
        raise DomainError("comparison gap needs t > 0")
    return float(comparison_gaps(s, np.asarray(xi, dtype=float)[None], np.array([t]), cfg)[0][0])


def comparison_gaps(s: SurfaceSpec, xi, t, cfg: NumericConfig | None = None):
    """Batch form of :func:`comparison_gap`; returns ``(gaps, err_est)``."""
    if s.is_purepower:
        raise DomainError("comparison principle needs a paraboloid-base surface")
    cfg = cfg or NumericConfig()
    vals, errs = conv_heights(s, one, one, xi, t, cfg)
    return HALF_PI - vals, errs


GRID_HEADER = ("xi1", "xi2", "tau", "value", "region", "err_est")


def conv_grid(s: SurfaceSpec, xi_points, taus, cfg: NumericConfig | None = None, weighted: bool = True) -> list[dict]:
    """Evaluate on the product of ``xi_points`` (K, 2) and ``taus`` (T,).

    Rows come back ordered by xi index then tau index.
    """
    cfg = cfg or NumericConfig()
    xi_points = np.atleast_2d(np.asarray(xi_points, dtype=float))
    taus = np.asarray(taus, dtype=float)
    weight = s.weight if weighted else one
    xi = np.repeat(xi_points, len(taus), axis=0)
    tau = np.tile(taus, len(xi_points))
    edge = 2.0 * s.psi(xi / 2)
    height = tau - edge
    band = BOUNDARY_RTOL * (1.0 + np.abs(tau))
    region = np.where(np.abs(height) <= band, "boundary", np.where(height > 0, "interior", "outside"))
    value = np.zeros(len(tau))
    err = np.zeros(len(tau))
    inner = region == "interior"
    if inner.any():
        value[inner], err[inner] = conv_heights(s, weight, weight, xi[inner], height[inner], cfg)
    for i in np.flatnonzero(region == "boundary"):
        value[i] = conv_boundary(s, xi[i], weight)
    return [
        dict(xi1=float(xi[i, 0]), xi2=float(xi[i, 1]), tau=float(tau[i]), value=float(value[i]), region=str(region[i]), err_est=float(err[i]))
        for i in range(len(tau))
    ]
