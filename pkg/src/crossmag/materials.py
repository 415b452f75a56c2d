"""Ferromagnet parameter records and the built-in material database."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import MU0
from .errors import InvalidArgumentError, NotFoundError


@dataclass(frozen=True)
class Material:
    """Saturation magnetization Ms (A/m), exchange stiffness A (J/m),
    spin polarization P, and Gilbert damping alpha."""

    name: str
    Ms: float
    A: float
    P: float
    alpha: float

    def __post_init__(self):
        if self.Ms <= 0:
            raise InvalidArgumentError(f"{self.name}: Ms must be > 0, got {self.Ms}")
        if self.A <= 0:
            raise InvalidArgumentError(f"{self.name}: A must be > 0, got {self.A}")
        if not 0 < self.P <= 1:
            raise InvalidArgumentError(f"{self.name}: P must be in (0, 1], got {self.P}")
        if not 0 <= self.alpha < 1:
            raise InvalidArgumentError(f"{self.name}: alpha must be in [0, 1), got {self.alpha}")


# Parameter sets for the three built-in free-layer materials.
_BUILTINS = {
    "co": Material(name="Co", Ms=1400e3, A=30e-12, P=0.40, alpha=0.010),
    "cms": Material(name="CMS", Ms=800e3, A=2.35e-12, P=0.56, alpha=0.008),
    "cfas": Material(name="CFAS", Ms=900e3, A=2.0e-11, P=0.76, alpha=0.010),
}

_registry: dict[str, Material] = dict(_BUILTINS)


def builtin_names() -> list[str]:
    return [_BUILTINS[k].name for k in ("co", "cms", "cfas")]


def get_material(name: str) -> Material:
    """Look up a material by (case-insensitive) name."""
    try:
        return _registry[name.lower()]
    except KeyError:
        raise NotFoundError(
            f"unknown material {name!r}; available: {', '.join(sorted(m.name for m in _registry.values()))}"
        ) from None


def register_material(mat: Material) -> None:
    """Add a custom material; built-in names cannot be overwritten."""
    key = mat.name.lower()
    if key in _BUILTINS:
        raise InvalidArgumentError(f"cannot overwrite built-in material {mat.name!r}")
    _registry[key] = mat


def exchange_length(mat: Material) -> float:
    """l_ex = sqrt(2A / (mu0 Ms^2)), the scale below which m is uniform (m)."""
    return float(np.sqrt(2 * mat.A / (MU0 * mat.Ms**2)))
