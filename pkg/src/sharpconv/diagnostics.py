"""Extremizing-sequence diagnostics.

* concentration ratios of exponential trial sequences ``f_n = e^{-n gamma}``,
  where ``gamma`` is psi minus its tangent plane at ``y0``;
* the weak interaction of distant caps, with a numerical check;
* grid scans of the comparison gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import NumericConfig
from .convolution import HALF_PI, conv_boundary, conv_heights, comparison_gaps, one
from .errors import DomainError
from .geometry import SurfaceSpec
from .parallel import chunks, max_workers, ordered_map
from .quadrature import hermite_2d, laguerre

EXTRAPOLATION_MODEL = "ratio(n) = L + c/n, least squares"
DEFAULT_N_LIST = (16, 32, 64)


def _gamma_fn(s: SurfaceSpec, y0):
    y0 = np.asarray(y0, dtype=float)
    p0 = float(s.psi(y0))
    g0 = s.grad_psi(y0)

    def gamma(y):
        return s.psi(y) - p0 - (y - y0) @ g0

    return gamma


def _gaussian_frame(s, y0, scale, nodes):
    """Nodes ``u`` and weights for ``int e^{-scale * gamma(u)} g(u) du``.

    Gauss-Hermite in coordinates where the quadratic part of
    ``scale * gamma`` at ``y0`` is ``|x|^2``; the remainder goes into the weights.
    """
    A = s.hess_psi(np.asarray(y0, dtype=float)) / 2
    L = np.linalg.cholesky(scale * A)
    X, W = hermite_2d(nodes)
    u = y0 + np.linalg.solve(L.T, X.T).T
    gam = _gamma_fn(s, y0)(u)
    w = W * np.exp(np.sum(X * X, axis=1) - scale * gam) / np.prod(np.diag(L))
    return u, w


def concentration_ratio(
    s: SurfaceSpec,
    y0,
    n: float,
    cfg: NumericConfig | None = None,
    *,
    method: str = "support",
    nodes: int = 16,
) -> float:
    """``||f_n sigma * f_n sigma||^2 / ||f_n||^4`` for ``f_n = e^{-n gamma}``.

    On the support ``f_n(y) f_n(z) = e^{-n (tau - L(xi))}`` for an affine
    ``L``, so the numerator reduces to

        4 int e^{-4 n gamma(u)} int_0^inf e^{-2 n t} C(2u, 2 psi(u) + t)^2 dt du,

    ``C = sigma * sigma``. ``method="support"`` uses this 3D form
    (Gauss-Hermite x Gauss-Laguerre). ``method="pairs"`` integrates
    ``f^2(y) f^2(z) C(y + z, psi(y) + psi(z))`` over ``R^2 x R^2`` instead.
    """
    if s.is_purepower:
        raise DomainError("concentration ratio needs a paraboloid-base surface")
    if not n > 0:
        raise DomainError("n must be positive")
    cfg = cfg or NumericConfig()
    y0 = np.asarray(y0, dtype=float)
    _, wd = _gaussian_frame(s, y0, 2 * n, nodes)
    norm2 = wd.sum()
    if method == "support":
        u, wu = _gaussian_frame(s, y0, 4 * n, nodes)
        x, wl = laguerre(nodes)
        t = x / (2 * n)
        U = np.repeat(u, len(t), axis=0)
        T = np.tile(t, len(u))
        C, _ = conv_heights(s, one, one, 2 * U, T, cfg)
        inner = (C.reshape(len(u), len(t)) ** 2) @ wl / (2 * n)
        num = 4 * inner @ wu
    elif method == "pairs":
        y, wy = _gaussian_frame(s, y0, 2 * n, nodes)
        Y = np.repeat(y, len(y), axis=0)
        Z = np.tile(y, (len(y), 1))
        WW = np.outer(wy, wy).ravel()
        xi = Y + Z
        height = s.psi_sym_diff(xi / 2, (Y - Z) / 2)
        C = np.empty(len(xi))
        flat = height <= 1e-12 * (1 + np.abs(s.psi(Y) + s.psi(Z)))
        if np.any(~flat):
            C[~flat], _ = conv_heights(s, one, one, xi[~flat], height[~flat], cfg)
        for i in np.flatnonzero(flat):
            C[i] = conv_boundary(s, xi[i], one)
        num = WW @ C
    else:
        raise DomainError(f"unknown method {method!r}")
    return float(num / norm2**2)


def extrapolate(n_list, ratios) -> tuple[float, float]:
    """Least-squares fit of ``L + c/n``; returns ``(L, c)``."""
    n = np.asarray(n_list, dtype=float)
    M = np.stack([np.ones_like(n), 1 / n], axis=1)
    (L, c), *_ = np.linalg.lstsq(M, np.asarray(ratios, dtype=float), rcond=None)
    return float(L), float(c)


@dataclass
class ConcentrationStudy:
    y0: tuple[float, float]
    n_list: list[float]
    ratios: list[float]
    extrapolated: float
    target_boundary_value: float
    model: str = EXTRAPOLATION_MODEL

    def as_dict(self) -> dict:
        return dict(
            y0=list(self.y0),
            n_list=list(self.n_list),
            ratios=list(self.ratios),
            extrapolated=self.extrapolated,
            target_boundary_value=self.target_boundary_value,
            model=self.model,
        )


def concentration_study(s: SurfaceSpec, y0, n_list=DEFAULT_N_LIST, cfg: NumericConfig | None = None, **kw) -> ConcentrationStudy:
    y0 = tuple(float(v) for v in y0)
    ratios = ordered_map(lambda n: concentration_ratio(s, y0, n, cfg, **kw), n_list)
    L, _ = extrapolate(n_list, ratios)
    target = conv_boundary(s, 2 * np.asarray(y0), one)
    return ConcentrationStudy(y0, [float(n) for n in n_list], ratios, L, target)


def cap_interaction_bound(r: float, rho: float) -> float:
    """``(1/2) arcsin(2r / (rho - r))``, valid for ``rho > 3r > 0``."""
    if not (r > 0 and rho > 3 * r):
        raise DomainError("cap interaction bound needs rho > 3r > 0")
    return 0.5 * math.asin(2 * r / (rho - r))


def _ball(center, radius):
    center = np.asarray(center, dtype=float)

    def f(y):
        return (np.sum((y - center) ** 2, axis=-1) < radius * radius).astype(float)

    return f


def _disc_points(center, radius, grid):
    rr = radius * np.linspace(0, 1, grid)
    th = 2 * math.pi * np.arange(grid) / grid
    R, TH = np.meshgrid(rr, th, indexing="ij")
    return np.asarray(center) + np.stack([R * np.cos(TH), R * np.sin(TH)], axis=-1).reshape(-1, 2)


@dataclass
class CapCheck:
    value: float
    err_est: float
    bound: float
    at: tuple[float, float, float]

    @property
    def ok(self) -> bool:
        return self.value <= self.bound + 3 * self.err_est + 1e-12


def _sup_over_pairs(s, F, G, ys, zs, cfg):
    Y = np.repeat(ys, len(zs), axis=0)
    Z = np.tile(zs, (len(ys), 1))
    xi = Y + Z
    height = s.psi_sym_diff(xi / 2, (Y - Z) / 2)
    keep = height > 1e-9
    xi, height = xi[keep], height[keep]
    tau = 2 * s.psi(xi / 2) + height
    vals, errs = conv_heights(s, F, G, xi, height, cfg)
    k = int(np.argmax(vals))
    return float(vals[k]), float(errs[k]), (float(xi[k, 0]), float(xi[k, 1]), float(tau[k]))


def cap_interaction_numeric(
    s: SurfaceSpec, y0, r: float, rho: float, grid: int = 8, cfg: NumericConfig | None = None
) -> CapCheck:
    """Sampled sup of ``(1_{B_r(y0)} sigma * 1_{B_rho(y0)^c} sigma)``.

    Samples ``(xi, tau) = (y + z, psi(y) + psi(z))`` with ``y`` in the small
    ball and ``z`` on rings outside the large one (so ``|xi - 2 y0| >= rho - r``).
    """
    bound = cap_interaction_bound(r, rho)
    cfg = cfg or NumericConfig(angular_nodes=2048)
    y0 = np.asarray(y0, dtype=float)
    ys = _disc_points(y0, r, grid)
    th = 2 * math.pi * np.arange(4 * grid) / (4 * grid)
    ring = np.stack([np.cos(th), np.sin(th)], axis=-1)
    zs = np.concatenate([y0 + rho * k * ring for k in (1.0, 1.1, 1.5, 2.5)])
    v, e, at = _sup_over_pairs(s, _ball(y0, r), lambda y: 1.0 - _ball(y0, rho)(y), ys, zs, cfg)
    return CapCheck(v, e, bound, at)


def disjoint_balls_numeric(
    s: SurfaceSpec, c1, r1: float, c2, r2: float, grid: int = 8, cfg: NumericConfig | None = None
) -> CapCheck:
    """Sampled sup of ``(1_B sigma * 1_B' sigma)`` for disjoint balls; bound ``pi/4``."""
    c1, c2 = np.asarray(c1, dtype=float), np.asarray(c2, dtype=float)
    if np.linalg.norm(c1 - c2) < r1 + r2:
        raise DomainError("balls must be disjoint")
    cfg = cfg or NumericConfig(angular_nodes=2048)
    ys = _disc_points(c1, r1, grid)
    zs = _disc_points(c2, r2, grid)
    v, e, at = _sup_over_pairs(s, _ball(c1, r1), _ball(c2, r2), ys, zs, cfg)
    return CapCheck(v, e, math.pi / 4, at)


@dataclass
class ScanReport:
    surface: str
    min_gap: float
    argmin: tuple[float, float, float]
    nonpositive: list[tuple[float, float, float]]
    max_err: float
    rows: list[dict] = field(repr=False, default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.nonpositive


SCAN_HEADER = ("xi1", "xi2", "t", "gap")


def default_scan_grid(n_xi: int = 20, n_t: int = 20):
    axis = np.linspace(-4, 4, n_xi)
    xi = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    return xi, np.geomspace(0.1, 10, n_t)


def comparison_scan(s: SurfaceSpec, xi_grid, t_grid, cfg: NumericConfig | None = None, zero_tol: float = 0.0) -> ScanReport:
    """Comparison gap on the product grid; entries ``<= zero_tol`` are reported.

    For the paraboloid itself every gap is zero; pass ``zero_tol=-inf`` to
    tabulate without flagging.
    """
    cfg = cfg or NumericConfig()
    xi_grid = np.atleast_2d(np.asarray(xi_grid, dtype=float))
    t_grid = np.asarray(t_grid, dtype=float)
    XI = np.repeat(xi_grid, len(t_grid), axis=0)
    T = np.tile(t_grid, len(xi_grid))
    parts = ordered_map(lambda sl: comparison_gaps(s, XI[sl], T[sl], cfg), chunks(len(T), max_workers()))
    gaps = np.concatenate([g for g, _ in parts])
    errs = np.concatenate([e for _, e in parts])
    k = int(np.argmin(gaps))
    bad = np.flatnonzero(gaps <= zero_tol)
    rows = [dict(xi1=float(XI[i, 0]), xi2=float(XI[i, 1]), t=float(T[i]), gap=float(gaps[i])) for i in range(len(T))]
    return ScanReport(
        surface=s.name,
        min_gap=float(gaps[k]),
        argmin=(float(XI[k, 0]), float(XI[k, 1]), float(T[k])),
        nonpositive=[(float(XI[i, 0]), float(XI[i, 1]), float(T[i])) for i in bad],
        max_err=float(errs.max()),
        rows=rows,
    )
