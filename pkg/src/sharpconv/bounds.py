"""Bounds on optimal constants of the bilinear extension inequality.

Everything here is stated for the fourth power of the constant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .config import NumericConfig
from .convolution import HALF_PI, conv_heights
from .errors import DomainError, IntegrabilityError, QuadratureError
from .geometry import SurfaceSpec
from .purepower import conv_quartic_closed, pp_profile
from .quadrature import gl_panels
from .surfaces import quartic_mixed

SQRT3 = math.sqrt(3.0)


@dataclass
class BoundsReport:
    lower: list[tuple[float, str]]
    upper: list[tuple[float, str]]
    best_lower: float = field(init=False)
    best_upper: float = field(init=False)

    def __post_init__(self):
        self.best_lower = max(v for v, _ in self.lower)
        self.best_upper = min(v for v, _ in self.upper)
        if self.best_lower > self.best_upper * (1 + 1e-12):
            raise QuadratureError("inconsistent bounds", {"lower": self.lower, "upper": self.upper})

    def entry(self, kind: str) -> float | None:
        for v, k in self.lower + self.upper:
            if k == kind:
                return v
        return None

    def as_dict(self) -> dict:
        return {
            "lower": [{"value": v, "provenance": k} for v, k in self.lower],
            "upper": [{"value": v, "provenance": k} for v, k in self.upper],
            "best_lower": self.best_lower,
            "best_upper": self.best_upper,
        }


def gamma_fn(x: float) -> float:
    if not x > 0:
        raise DomainError("gamma_fn is only provided for x > 0")
    return math.gamma(x)


def gamma_lower_pp(p: float) -> float:
    """Exponential-trial lower bound for the pure-power surface."""
    if p < 2:
        raise DomainError("need p >= 2")
    return math.pi / (p * 2 ** (1 - 2 / p)) * gamma_fn(0.5 + 1 / p) ** 2 / gamma_fn(2 / p)


def boundary_value_pp(p: float) -> float:
    return math.pi / (p * math.sqrt(p - 1))


def pp_bounds(p: float) -> BoundsReport:
    if p < 2:
        raise DomainError("need p >= 2")
    lower = [(boundary_value_pp(p), "boundary"), (gamma_lower_pp(p), "gamma")]
    return BoundsReport(lower, [(math.pi / p, "axis")])


def _radial_integral(f, what):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, 0, np.inf, limit=200, epsabs=0, epsrel=1e-12)
        except (integrate.IntegrationWarning, OverflowError) as exc:
            raise IntegrabilityError(f"{what} integral does not converge") from exc
    if not (math.isfinite(val) and math.isfinite(err)) or err > 1e-6 * abs(val) + 1e-300:
        raise IntegrabilityError(f"{what} integral does not converge")
    return val


def lower_bound_exp(s: SurfaceSpec, svals, cfg: NumericConfig | None = None) -> float:
    """``sup_s ||f_s||^4 / int_E e^{-2 s tau}`` with ``f_s = e^{-s psi} sqrt(w)``.

    ``E`` is the support of the convolution. Radial surfaces only: both
    integrals reduce to one-dimensional radial ones.
    """
    if not s.radial:
        raise DomainError("lower_bound_exp needs a radial surface")
    svals = list(svals)
    if not svals or any(not v > 0 for v in svals):
        raise DomainError("svals must be a nonempty list of positive numbers")

    def prof(rho):
        return float(s.psi(np.array([rho, 0.0])))

    def wt(rho):
        return float(s.weight(np.array([rho, 0.0])))

    best = 0.0
    for sv in svals:
        with np.errstate(over="ignore", under="ignore"):
            norm2 = 2 * math.pi * _radial_integral(lambda r: math.exp(-2 * sv * prof(r)) * wt(r) * r, "norm")
            supp = (2 / sv) * 2 * math.pi * _radial_integral(lambda r: math.exp(-4 * sv * prof(r)) * r, "support")
        best = max(best, norm2 * norm2 / supp)
    return best


def _crossover_fn(p):
    return 2 * math.lgamma(0.5 + 1 / p) - (math.log(2) * (1 - 2 / p) + math.lgamma(2 / p) - 0.5 * math.log(p - 1))


def crossover_p0(tol: float = 1e-6) -> float:
    """Exponent where the gamma and boundary lower bounds coincide, in (2, 10)."""
    if not tol > 0:
        raise DomainError("tol must be positive")
    grid = np.linspace(2.05, 10, 160)
    vals = [_crossover_fn(p) for p in grid]
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa > 0 >= fb:
            break
    else:
        raise QuadratureError("no sign change found for the crossover", {})
    while b - a > tol:
        m = 0.5 * (a + b)
        if _crossover_fn(m) > 0:
            a = m
        else:
            b = m
    # polish inside the final bracket; the answer stays within tol of the root
    return optimize.brentq(_crossover_fn, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def _curve(a, r):
    return math.pi * (1 + a * r) / (2 * math.sqrt((1 + 2 * r) * (1 + 6 * r)))


def boundary_curve_sup(a: float, cfg: NumericConfig | None = None) -> float:
    """``sup_{r >= 0} pi (1 + a r) / (2 sqrt((1 + 2r)(1 + 6r)))``."""
    if not a > 2:
        raise DomainError("boundary_curve_sup needs a > 2")
    # golden section in u = r / (1 + r) over [0, 1000/1001]
    umax = 1000 / 1001
    res = optimize.minimize_scalar(
        lambda u: -_curve(a, u / (1 - u)), bounds=(0.0, umax), method="bounded", options={"xatol": 1e-12}
    )
    cands = [_curve(a, 0.0), _curve(a, umax / (1 - umax)), -res.fun, a * math.pi / (4 * SQRT3)]
    return max(cands)


def quartic_bounds(a: float, cfg: NumericConfig | None = None) -> BoundsReport:
    """Bounds for the quartic surface with weight ``(1 + a|y|^2)^(1/2)``."""
    if not a >= 0:
        raise DomainError("need a >= 0")
    if a <= 2:
        return BoundsReport([(HALF_PI, "exact")], [(HALF_PI, "exact")])
    lower = [
        (HALF_PI, "origin"),
        (a * math.pi / (4 * SQRT3), "boundary"),
        (a * math.sqrt(2 * math.pi) * gamma_fn(0.75) ** 2 / 8, "gamma"),
        (boundary_curve_sup(a, cfg), "curve"),
    ]
    return BoundsReport(lower, [(a * math.pi / 4, "axis")])


def _ratio_edges(p: float, panels: int) -> np.ndarray:
    tmax = 2 ** (2 - 2 / p)
    tk = (10 * 2 ** (1 - p)) ** (-2 / p)
    pts = sorted({0.0, 1.0, tmax} | ({tk} if 0 < tk < tmax else set()))
    # geometric grading towards both ends of every piece
    g = 0.5 ** np.arange(1, panels + 1)
    frac = np.concatenate([[0.0], g[::-1], 1 - g, [1.0]])
    edges = [a + (b - a) * frac for a, b in zip(pts[:-1], pts[1:])]
    return np.unique(np.concatenate(edges))


def strichartz_ratio_pp(p: float, cfg: NumericConfig | None = None, order: int = 16, panels: int = 24) -> float:
    """``||f sqrt(w) nu * f sqrt(w) nu||^2 / ||f||^4`` for ``f = e^{-Psi} |y|^((p-2)/4)``.

    Reduces to ``(p / 2 pi) Gamma(2/p) / Gamma(1/2 + 1/p)^2`` times the
    integral of the squared profile ``P(t^{-p/2})`` over ``0 < t < 2^{2-2/p}``,
    done with composite Gauss-Legendre on panels graded towards ``t = 0``,
    the kink at ``t = 1`` and the support edge.
    """
    if not p > 2:
        raise DomainError("need p > 2")
    cfg = cfg or NumericConfig()
    results = []
    for o in (order, 2 * order):
        t, w = gl_panels(_ratio_edges(p, panels), o)
        lam = t ** (-p / 2)
        if p == 4:
            vals = conv_quartic_closed(lam, cfg)
        else:
            vals, _, _ = pp_profile(p, lam, cfg, rtol=1e-10)
        results.append(float(vals**2 @ w))
    if abs(results[1] - results[0]) > 1e-8 * abs(results[1]):
        raise QuadratureError("ratio integral not converged", {"p": p, "estimates": results})
    pref = p / (2 * math.pi) * gamma_fn(2 / p) / gamma_fn(0.5 + 1 / p) ** 2
    return pref * results[1]


def verify_quartic_ceiling(a_values=(0.0, 0.5, 1.0, 2.0), n_xi: int = 20, n_t: int = 10, cfg: NumericConfig | None = None) -> dict:
    """Check ``(w_a sigma * w_a sigma) <= pi/2`` on a product grid, strict off-axis for ``a < 2``.

    The xi grid has an even number of points per axis so it avoids the axis.
    """
    cfg = cfg or NumericConfig()
    axis = np.linspace(-3, 3, n_xi)
    xi = np.stack(np.meshgrid(axis, axis, indexing="ij"), axis=-1).reshape(-1, 2)
    ts = np.geomspace(1e-3, 1e2, n_t)
    XI = np.repeat(xi, n_t, axis=0)
    T = np.tile(ts, len(xi))
    out = {}
    for a in a_values:
        s = quartic_mixed(a)
        vals, errs = conv_heights(s, s.weight, s.weight, XI, T, cfg)
        worst = int(np.argmax(vals))
        ok = bool(np.all(vals <= HALF_PI + 1e-10))
        strict = bool(np.all(vals < HALF_PI)) if a < 2 else True
        out[a] = dict(
            max_value=float(vals[worst]),
            at=(float(XI[worst, 0]), float(XI[worst, 1]), float(T[worst])),
            min_gap=float(HALF_PI - vals.max()),
            max_err=float(errs.max()),
            ok=ok and strict,
        )
    return out
