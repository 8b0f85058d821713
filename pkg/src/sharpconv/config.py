"""Numerical knobs shared by every module, plus the flat config-file reader."""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .errors import DomainError


@dataclass(frozen=True)
class NumericConfig:
    """Quadrature sizes, solver tolerances and oracle settings.

    Attributes
    ----------
    angular_nodes : int
        Trapezoid nodes on the unit circle (>= 16).
    root_tol : float
        Residual tolerance for implicit solves, relative to the size of the
        target value.
    max_iter : int
        Iteration cap for Newton/bisection loops.
    mollify_eps : float
        Half-width of the slab used by the brute-force oracle.
    mc_samples : int
        Sample count for the Monte Carlo oracle.
    seed : int
        Seed for every random path (Monte Carlo, property draws in ``verify``).
    """

    angular_nodes: int = 256
    root_tol: float = 1e-13
    max_iter: int = 200
    mollify_eps: float = 1e-3
    mc_samples: int = 200_000
    seed: int = 20160101

    def __post_init__(self):
        if self.angular_nodes < 16:
            raise DomainError("angular_nodes must be >= 16")
        for name in ("root_tol", "mollify_eps"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("max_iter", "mc_samples"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")

    def replace(self, **changes) -> "NumericConfig":
        return dataclasses.replace(self, **changes)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(NumericConfig)}


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines into NumericConfig keyword arguments.

    Blank lines and ``#`` comments are ignored; unknown keys are an error.
    """
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[numeric]\n" + text)
    except configparser.Error as exc:
        raise DomainError(f"malformed config: {exc}") from exc
    out = {}
    for key, raw in parser.items("numeric"):
        key = key.strip().replace("-", "_")
        if key not in _FIELD_TYPES:
            raise DomainError(f"unknown config key {key!r}")
        kind = int if _FIELD_TYPES[key] in ("int", int) else float
        try:
            out[key] = kind(float(raw)) if kind is int else kind(raw)
        except ValueError as exc:
            raise DomainError(f"bad value for {key}: {raw!r}") from exc
    return out


def load_config(path: str | Path | None = None, **overrides) -> NumericConfig:
    values = {}
    if path is not None:
        values.update(parse_config_text(Path(path).read_text()))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return NumericConfig(**values)
