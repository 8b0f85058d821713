"""Built-in surface registry.

Names accepted by :func:`get_surface` (and the CLI ``--surface`` flag)::

    paraboloid                  phi = 0
    quartic-mixed[:a=A]         phi = |y|^4, optional weight (1 + A|y|^2)^(1/2)
    powerpert:a=A,p=P           phi = A |y|^P            (A > 0, P > 2)
    purepower:p=P               Psi = |y|^P, weight |y|^((P-2)/2)   (P >= 2)
    exp                         phi = e^{y1} + e^{y2}
    poly:c1=..,c2=..,...        phi = sum_k ck |y|^(2k)  (ck >= 0)
"""

from __future__ import annotations

import functools
from math import comb

import numpy as np

from .errors import DomainError
from .geometry import SurfaceSpec, unit_weight


def _sq(y):
    return np.sum(y * y, axis=-1)


class _RadialPoly:
    """phi(y) = sum_k c[k] |y|^(2k), k >= 1."""

    def __init__(self, coeffs: dict[int, float]):
        self.coeffs = {k: float(v) for k, v in coeffs.items() if v != 0}

    def value(self, y):
        x = _sq(np.asarray(y, dtype=float))
        return sum((c * x**k for k, c in self.coeffs.items()), np.zeros_like(x))

    def _d1(self, x):
        return sum((c * k * x ** (k - 1) for k, c in self.coeffs.items()), np.zeros_like(x))

    def _d2(self, x):
        return sum((c * k * (k - 1) * x ** max(k - 2, 0) for k, c in self.coeffs.items() if k >= 2), np.zeros_like(x))

    def grad(self, y):
        y = np.asarray(y, dtype=float)
        return 2.0 * self._d1(_sq(y))[..., None] * y

    def hess(self, y):
        y = np.asarray(y, dtype=float)
        x = _sq(y)
        out = 2.0 * self._d1(x)[..., None, None] * np.eye(2)
        return out + 4.0 * self._d2(x)[..., None, None] * y[..., :, None] * y[..., None, :]

    def sym_diff(self, c, v):
        # (A+B)^k + (A-B)^k - 2C^k with A = |c|^2+|v|^2, B = 2<c,v>, C = |c|^2;
        # expanded so every term is nonnegative.
        C = _sq(c)
        V = _sq(v)
        A = C + V
        B = 2.0 * np.sum(c * v, axis=-1)
        total = np.zeros(np.broadcast(C, V).shape)
        for k, ck in self.coeffs.items():
            diff = sum((A**i * C ** (k - 1 - i) for i in range(k)), np.zeros_like(total)) * V
            even = sum((comb(k, j) * A ** (k - j) * B**j for j in range(2, k + 1, 2)), np.zeros_like(total))
            total = total + 2.0 * ck * (diff + even)
        return total


class _RadialPower:
    """phi(y) = a |y|^p."""

    def __init__(self, a: float, p: float):
        self.a = float(a)
        self.p = float(p)

    def value(self, y):
        return self.a * _sq(np.asarray(y, dtype=float)) ** (self.p / 2)

    def grad(self, y):
        y = np.asarray(y, dtype=float)
        r2 = _sq(y)
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = np.where(r2 > 0, r2 ** ((self.p - 2) / 2), 1.0 if self.p == 2 else 0.0)
        return self.a * self.p * fac[..., None] * y

    def hess(self, y):
        y = np.asarray(y, dtype=float)
        r2 = _sq(y)
        p = self.p
        pos = r2 > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            fac = np.where(pos, r2 ** ((p - 2) / 2), 1.0 if p == 2 else 0.0)
            unit = np.where(pos[..., None], y / np.sqrt(np.where(pos, r2, 1.0))[..., None], 0.0)
        outer = unit[..., :, None] * unit[..., None, :]
        return self.a * p * fac[..., None, None] * (np.eye(2) + (p - 2) * outer)

    def sym_diff(self, c, v):
        q = self.p / 2
        C = _sq(c)
        V = _sq(v)
        B = 2.0 * np.sum(c * v, axis=-1)
        C, V, B = np.broadcast_arrays(C, V, B)
        pos = C > 0
        safe = np.where(pos, C, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            xp = (V + B) / safe
            xm = np.maximum((V - B) / safe, -1.0)
            rel = np.expm1(q * np.log1p(xp)) + np.expm1(q * np.log1p(xm))
        out = np.where(pos, safe**q * rel, 2.0 * V**q)
        return self.a * out


class _ExpSum:
    """phi(y) = e^{y1} + e^{y2}."""

    def value(self, y):
        return np.sum(np.exp(np.asarray(y, dtype=float)), axis=-1)

    def grad(self, y):
        return np.exp(np.asarray(y, dtype=float))

    def hess(self, y):
        e = np.exp(np.asarray(y, dtype=float))
        return e[..., :, None] * np.eye(2)

    def sym_diff(self, c, v):
        c = np.asarray(c, dtype=float)
        v = np.asarray(v, dtype=float)
        return np.sum(np.exp(c) * 4.0 * np.sinh(v / 2) ** 2, axis=-1)


def quartic_weight(a: float):
    """``w_a(y) = (1 + a|y|^2)^(1/2)``."""

    def w(y):
        return np.sqrt(1.0 + a * _sq(np.asarray(y, dtype=float)))

    return w


def purepower_weight(p: float):
    """``w(y) = |y|^((p-2)/2)``."""

    def w(y):
        return _sq(np.asarray(y, dtype=float)) ** ((p - 2) / 4)

    return w


def _from_term(name, term, **kw):
    return SurfaceSpec(name=name, phi=term.value, grad_phi=term.grad, hess_phi=term.hess, sym_diff=term.sym_diff, **kw)


def paraboloid() -> SurfaceSpec:
    return _from_term("paraboloid", _RadialPoly({}), radial=True, strictly_convex=False)


def quartic_mixed(a: float | None = None) -> SurfaceSpec:
    name = "quartic-mixed" if a is None else f"quartic-mixed:a={a:g}"
    weight = unit_weight if a is None else quartic_weight(a)
    if a is not None and a < 0:
        raise DomainError("quartic weight parameter a must be >= 0")
    return _from_term(name, _RadialPoly({2: 1.0}), weight=weight, radial=True, params={"a": a})


def power_perturbation(a: float, p: float) -> SurfaceSpec:
    if not (a > 0 and p > 2):
        raise DomainError("powerpert needs a > 0 and p > 2")
    return _from_term(f"powerpert:a={a:g},p={p:g}", _RadialPower(a, p), radial=True, params={"a": a, "p": p})


def pure_power(p: float) -> SurfaceSpec:
    if p < 2:
        raise DomainError("purepower needs p >= 2")
    return _from_term(
        f"purepower:p={p:g}",
        _RadialPower(1.0, p),
        weight=purepower_weight(p),
        base="purepower",
        p=float(p),
        radial=True,
        params={"p": p},
    )


def exponential() -> SurfaceSpec:
    return _from_term("exp", _ExpSum(), radial=False)


def polynomial(coeffs: dict[int, float]) -> SurfaceSpec:
    if any(k < 1 for k in coeffs) or any(v < 0 for v in coeffs.values()):
        raise DomainError("poly coefficients need k >= 1 and ck >= 0")
    label = ",".join(f"c{k}={v:g}" for k, v in sorted(coeffs.items()))
    strict = any(v > 0 for v in coeffs.values())
    return _from_term(f"poly:{label}", _RadialPoly(coeffs), radial=True, strictly_convex=strict)


def _parse_params(text: str) -> dict[str, float]:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise DomainError(f"bad surface parameter {item!r}")
        try:
            out[key.strip()] = float(val)
        except ValueError as exc:
            raise DomainError(f"bad surface parameter {item!r}") from exc
    return out


@functools.lru_cache(maxsize=64)
def get_surface(name: str) -> SurfaceSpec:
    """Build a registered surface from its name string."""
    kind, _, rest = name.strip().partition(":")
    params = _parse_params(rest)
    try:
        if kind == "paraboloid" and not params:
            return paraboloid()
        if kind == "quartic-mixed" and set(params) <= {"a"}:
            return quartic_mixed(params.get("a"))
        if kind == "powerpert" and set(params) == {"a", "p"}:
            return power_perturbation(params["a"], params["p"])
        if kind == "purepower" and set(params) == {"p"}:
            return pure_power(params["p"])
        if kind == "exp" and not params:
            return exponential()
        if kind == "poly" and all(k.startswith("c") and k[1:].isdigit() for k in params):
            return polynomial({int(k[1:]): v for k, v in params.items()})
    except KeyError:
        pass
    raise DomainError(f"unknown surface {name!r}")


REGISTERED = ("paraboloid", "quartic-mixed", "powerpert:a=1,p=3", "purepower:p=4", "exp")
