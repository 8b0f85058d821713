"""Seeded verification drivers behind ``sharpconv verify``.

Each driver returns a plain dict with an ``ok`` flag and a short summary;
draws come from ``numpy.random.default_rng(seed)`` so reruns are identical.
"""

from __future__ import annotations

import numpy as np

from .config import NumericConfig
from .convolution import SpaceTimePoint, conv_oracle, conv_weighted
from .diagnostics import cap_interaction_numeric, comparison_scan, default_scan_grid, disjoint_balls_numeric
from .geometry import det_T_prime_batch, lambda_batch
from .surfaces import REGISTERED, get_surface

STRICT_SURFACES = ("quartic-mixed", "powerpert:a=1,p=3", "exp", "poly:c2=1,c3=0.5")


def check_comparison(surfaces=("quartic-mixed", "exp"), cfg: NumericConfig | None = None, n_xi: int = 20, n_t: int = 20) -> dict:
    """Strict gap on the default grid for curved surfaces, zero gap for the paraboloid."""
    xi, t = default_scan_grid(n_xi, n_t)
    out = {"ok": True, "surfaces": {}}
    for name in surfaces:
        rep = comparison_scan(get_surface(name), xi, t, cfg)
        out["surfaces"][name] = {"min_gap": rep.min_gap, "argmin": list(rep.argmin), "nonpositive": len(rep.nonpositive)}
        out["ok"] &= rep.ok
    flat = comparison_scan(get_surface("paraboloid"), xi, t, cfg, zero_tol=-np.inf)
    worst = max(abs(r["gap"]) for r in flat.rows)
    out["paraboloid_max_abs_gap"] = worst
    out["ok"] &= worst <= 1e-8
    return out


def check_contraction(draws: int = 1000, seed: int = 20160101, cfg: NumericConfig | None = None) -> dict:
    """``0 < det T' < 1`` for strictly convex phi and ``0 < lam <= 1`` for every draw."""
    rng = np.random.default_rng(seed)
    out = {"ok": True, "draws": draws, "surfaces": {}}
    names = STRICT_SURFACES + ("paraboloid",)
    counts = np.bincount(rng.integers(0, len(names), draws), minlength=len(names))
    for name, k in zip(names, counts):
        s = get_surface(name)
        xi = rng.uniform(-2, 2, (k, 2))
        y = rng.uniform(-2, 2, (k, 2))
        lam = lambda_batch(s, xi, y, cfg)
        lam_ok = bool(np.all((lam > 0) & (lam <= 1 + 1e-14)))
        entry = {"draws": int(k), "lam_min": float(lam.min()), "lam_max": float(lam.max()), "lam_ok": lam_ok}
        ok = lam_ok
        if s.strictly_convex:
            det = det_T_prime_batch(s, xi, y, cfg)
            det_ok = bool(np.all((det > 0) & (det < 1)))
            entry.update(det_min=float(det.min()), det_max=float(det.max()), det_ok=det_ok)
            ok &= det_ok
        out["surfaces"][name] = entry
        out["ok"] &= ok
    return out


def check_oracle(points: int = 30, seed: int = 20160101, cfg: NumericConfig | None = None, surfaces=REGISTERED) -> dict:
    """Angular engine against the slab oracle at random interior points."""
    cfg = cfg or NumericConfig()
    rng = np.random.default_rng(seed)
    out = {"ok": True, "points": points, "surfaces": {}}
    for name in surfaces:
        s = get_surface(name)
        worst = 0.0
        fails = 0
        for _ in range(points):
            xi = rng.uniform(-1.5, 1.5, 2)
            t = rng.uniform(0.1, 3.0)
            p = SpaceTimePoint(tuple(xi), 2 * float(s.psi(xi / 2)) + t)
            v = conv_weighted(s, None, None, p, cfg)
            o = conv_oracle(s, None, None, p, cfg)
            tol = max(1e-3 * v.value, 3 * v.err_est)
            worst = max(worst, abs(v.value - o) / tol)
            fails += abs(v.value - o) > tol
        out["surfaces"][name] = {"worst_over_tol": worst, "failures": int(fails)}
        out["ok"] &= fails == 0
    return out


def check_caps(triples: int = 20, seed: int = 20160101, grid: int = 4, nodes: int = 512) -> dict:
    """Sampled cap interaction against its bound; also the disjoint-ball ceiling."""
    rng = np.random.default_rng(seed)
    cfg = NumericConfig(angular_nodes=nodes)
    rows = []
    ok = True
    for k in range(triples):
        s = get_surface(("paraboloid", "quartic-mixed")[k % 2])
        r = rng.uniform(0.05, 1.0)
        rho = r * rng.uniform(3.2, 8.0)
        y0 = rng.uniform(-1, 1, 2)
        c = cap_interaction_numeric(s, y0, r, rho, grid, cfg)
        rows.append({"surface": s.name, "r": r, "rho": rho, "y0": y0.tolist(), "value": c.value, "bound": c.bound, "ok": c.ok})
        ok &= c.ok
    d = disjoint_balls_numeric(get_surface("paraboloid"), (0, 0), 1.0, (2.5, 0), 1.0, grid, cfg)
    ok &= d.ok
    return {"ok": bool(ok), "triples": rows, "disjoint": {"value": d.value, "bound": d.bound, "ok": d.ok}}
