"""Pure-power surface ``Psi = |y|^p`` with weight ``|y|^((p-2)/2)``.

By homogeneity the weighted convolution depends on ``(xi, tau)`` only
through ``lam = tau / |xi|^p``. Putting ``xi = 2 e1`` and writing
``y = r (cos theta, sin theta)`` turns the support equation into
``phi_theta(r) = 2^p lam - 2`` with

    phi_theta(r) = (r^2 + 1 + 2 r c)^(p/2) + (r^2 + 1 - 2 r c)^(p/2) - 2,  c = cos theta,

and the profile becomes a single angular integral of
``((r^2+1)^2 - 4 r^2 c^2)^((p-2)/4) r / phi_theta'(r)``.
"""

from __future__ import annotations

import math

import numpy as np

from .config import NumericConfig
from .convolution import ConvValue
from .errors import DomainError, QuadratureError, SolverError
from .quadrature import quarter_nodes

_SERIES_R = 1e-6
_BOUNDARY_DELTA = 1e-10
_DEFAULT_RTOL = 1e-12
_MAX_NODES = 1 << 16


def _check_p(p):
    if not p >= 2:
        raise DomainError("pure-power exponent must satisfy p >= 2")


def _pow_m1(q, x):
    """``(1 + x)^q - 1`` without cancellation; ``x >= -1``, ``q >= 0``."""
    x = np.asarray(x, dtype=float)
    if q == 0:
        return np.zeros_like(x)
    with np.errstate(divide="ignore"):
        return np.expm1(q * np.log1p(x))


def phi_theta(p: float, theta, r):
    """``(r^2+1+2rc)^(p/2) + (r^2+1-2rc)^(p/2) - 2`` with ``c = cos theta``."""
    _check_p(p)
    c = np.cos(theta)
    r = np.asarray(r, dtype=float)
    a = r * r + 2 * r * c
    b = r * r - 2 * r * c
    out = _pow_m1(p / 2, a) + _pow_m1(p / 2, b)
    return float(out) if np.ndim(out) == 0 else out


def phi_theta_prime(p: float, theta, r):
    """``d/dr phi_theta(r) = p r (A^q + B^q) + p c (A^q - B^q)``, ``q = (p-2)/2``."""
    _check_p(p)
    c = np.cos(theta)
    r = np.asarray(r, dtype=float)
    q = (p - 2) / 2
    a = r * r + 2 * r * c
    b = r * r - 2 * r * c
    ea, eb = _pow_m1(q, a), _pow_m1(q, b)
    out = p * r * (2 + ea + eb) + p * c * (ea - eb)
    return float(out) if np.ndim(out) == 0 else out


def _r_bound(p, s):
    # convexity of x^(p/2): phi_theta(r) >= 2 (r^2+1)^(p/2) - 2
    return np.sqrt(np.maximum(_pow_m1(2 / p, s / 2), 0.0))


def _invert(p, theta, s, cfg):
    """Vectorised root of ``phi_theta(r) = s``; Newton from the upper bound.

    ``phi_theta`` is convex and increasing in ``r``, so Newton started at an
    upper bound decreases monotonically onto the root.
    """
    theta, s = np.broadcast_arrays(np.asarray(theta, dtype=float), np.asarray(s, dtype=float))
    r = _r_bound(p, s) * (1 + 1e-12) + 1e-300
    active = s > 0
    for _ in range(cfg.max_iter):
        f = phi_theta(p, theta, r) - s
        d = phi_theta_prime(p, theta, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(active & (d > 0), f / d, 0.0)
        step = np.maximum(step, 0.0)
        r = r - step
        active &= step > 4 * np.finfo(float).eps * r
        if not active.any():
            break
    else:
        raise SolverError("phi_theta inversion did not converge")
    return np.where(s > 0, r, 0.0)


def invert_phi_theta(p: float, theta: float, s: float, cfg: NumericConfig | None = None) -> float:
    """The unique ``r >= 0`` with ``phi_theta(p, theta, r) = s``."""
    _check_p(p)
    if s < 0:
        raise DomainError("phi_theta takes only nonnegative values")
    return float(_invert(p, theta, s, cfg or NumericConfig()))


def _profile_integrand(p, theta, s, cfg):
    """Integrand values on nodes ``theta`` (M,) for heights ``s`` (K,)."""
    th = theta[None, :]
    r = _invert(p, th, s[:, None], cfg)
    c = np.cos(th)
    q = (p - 2) / 2
    a = r * r + 2 * r * c
    b = r * r - 2 * r * c
    ea, eb = _pow_m1(q, a), _pow_m1(q, b)
    # r / phi' with the 0/0 limit 1/phi''(0) near r = 0
    small = r < _SERIES_R
    r_safe = np.where(small, 1.0, r)
    ratio = np.where(small, 1.0 / (2 * p * (1 + (p - 2) * c * c)), 1.0 / (p * (2 + ea + eb) + p * c * (ea - eb) / r_safe))
    ab = np.maximum((r * r + 1) ** 2 - 4 * r * r * c * c, 0.0)
    return ab ** ((p - 2) / 4) * ratio


_WORK = 1 << 21  # cap on rows * nodes per evaluation


def _adaptive_quarter(func, args, rtol, start=64, max_nodes=_MAX_NODES):
    """``4 * int_0^{pi/2} func(args, theta)`` per entry of ``args``.

    The node count doubles separately for each entry until successive
    estimates agree to ``rtol``; returns ``(values, err_est)``.
    """
    args = np.asarray(args, dtype=float)
    vals = np.empty(len(args))
    errs = np.empty(len(args))

    def run(idx, n):
        theta, w = quarter_nodes(n)
        out = np.empty(len(idx))
        step = max(1, _WORK // n)
        for k in range(0, len(idx), step):
            sub = idx[k : k + step]
            out[k : k + step] = 4 * func(args[sub], theta) @ w
        return out

    idx = np.arange(len(args))
    n = start
    prev = run(idx, n)
    while len(idx):
        n *= 2
        cur = run(idx, n)
        err = np.abs(cur - prev)
        done = (err <= rtol * np.abs(cur) + 1e-15) | (n >= max_nodes)
        vals[idx[done]] = cur[done]
        errs[idx[done]] = err[done]
        idx, prev = idx[~done], cur[~done]
    return vals, errs


def _start(cfg):
    # angular_nodes counts the full circle; the rule covers a quarter of it
    return max(16, cfg.angular_nodes // 4)


def pp_profile(p: float, lam, cfg: NumericConfig | None = None, rtol: float = _DEFAULT_RTOL):
    """Vectorised profile: returns ``(values, err_est, region)`` arrays for ``lam``."""
    _check_p(p)
    cfg = cfg or NumericConfig()
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    edge = 2.0 ** (1 - p)
    bvalue = math.pi / (p * math.sqrt(p - 1))
    delta = lam - edge
    band = 1e-12 * (1 + np.abs(lam))
    region = np.where(np.abs(delta) <= band, "boundary", np.where(delta > 0, "interior", "outside"))
    values = np.where(region == "outside", 0.0, bvalue)
    errs = np.zeros(len(lam))
    work = delta >= _BOUNDARY_DELTA
    if work.any():
        s = 2.0**p * lam[work] - 2.0
        v, e = _adaptive_quarter(lambda sv, th: _profile_integrand(p, th, sv, cfg), s, rtol, start=_start(cfg))
        if not np.all(np.isfinite(v)):
            raise QuadratureError("non-finite pure-power profile", {"p": p})
        values[work], errs[work] = v, e
    return values, errs, region


def conv_pp(p: float, lam: float, cfg: NumericConfig | None = None) -> ConvValue:
    """``(w nu_p * w nu_p)(xi, lam |xi|^p)`` for any ``xi != 0``."""
    v, e, reg = pp_profile(p, [lam], cfg)
    return ConvValue(float(v[0]), str(reg[0]), float(e[0]))


def quartic_closed_integrand(lam, theta):
    """Integrand of the explicit quartic profile; ``lam`` (K,), ``theta`` (M,)."""
    lam = np.asarray(lam, dtype=float)[..., None]
    c2 = np.cos(theta) ** 2
    den = 2 * lam + c2 + c2 * c2
    num = lam + c2 + 2 * c2 * c2 - 2 * np.sqrt(den) * c2
    return np.sqrt(np.maximum(num, 0.0) / den) / (4 * math.sqrt(2))


def conv_quartic_closed(lam, cfg: NumericConfig | None = None, rtol: float = _DEFAULT_RTOL):
    """Explicit quartic (``p = 4``) profile; no root solve involved.

    Accepts a scalar or an array of ``lam >= 1/8``.
    """
    arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(arr < 0.125):
        raise DomainError("quartic closed form needs lam >= 1/8")
    v, _ = _adaptive_quarter(quartic_closed_integrand, arr, rtol, start=_start(cfg or NumericConfig()))
    return float(v[0]) if np.ndim(lam) == 0 else v


PROFILE_HEADER = ("p", "lambda", "value", "err_est")


def profile_rows(p: float, lams, cfg: NumericConfig | None = None) -> list[dict]:
    v, e, _ = pp_profile(p, lams, cfg)
    return [dict(p=float(p), **{"lambda": float(l)}, value=float(a), err_est=float(b)) for l, a, b in zip(np.atleast_1d(lams), v, e)]
