"""Physical and reduced Friedmann coefficients, plus 3-sphere volume/density.

The reduced form of the Friedmann equation used throughout the package is

    (dR/dt)^2 = alpha/R + delta/R^2 + beta*R^2 - gamma,   R > 0

with ``delta = 0`` for pure matter + vacuum.  Units are whatever the caller
supplies, as long as they are mutually consistent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidParameter

_CURVATURES = (-1, 0, 1)


def _check_finite(**values: float) -> None:
    for name, v in values.items():
        if not math.isfinite(v):
            raise InvalidParameter(f"{name} must be finite, got {v!r}")


def _check_epsilon(epsilon) -> int:
    if epsilon not in _CURVATURES:
        raise InvalidParameter(f"epsilon must be one of -1, 0, +1, got {epsilon!r}")
    return int(epsilon)


@dataclass(frozen=True)
class PhysicalParams:
    G: float
    c: float
    Lambda: float
    M: float
    epsilon: int

    def __post_init__(self):
        for name in ("G", "c", "Lambda", "M"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(G=self.G, c=self.c, Lambda=self.Lambda, M=self.M)
        object.__setattr__(self, "epsilon", _check_epsilon(self.epsilon))
        for name in ("G", "c", "M", "Lambda"):
            if getattr(self, name) <= 0:
                raise InvalidParameter(f"{name} must be > 0, got {getattr(self, name)!r}")


@dataclass(frozen=True)
class ReducedParams:
    """Coefficients of the reduced Friedmann equation.

    ``epsilon`` is stored alongside ``gamma`` so regime logic never has to
    infer the curvature from a floating-point sign test.
    """

    alpha: float
    beta: float
    gamma: float
    epsilon: int
    delta: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(alpha=self.alpha, beta=self.beta, gamma=self.gamma, delta=self.delta)
        eps = _check_epsilon(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if self.alpha <= 0:
            raise InvalidParameter(f"alpha must be > 0, got {self.alpha!r}")
        if self.beta <= 0:
            raise InvalidParameter(f"beta must be > 0, got {self.beta!r}")
        if self.delta < 0:
            raise InvalidParameter(f"delta must be >= 0, got {self.delta!r}")
        sign = (self.gamma > 0) - (self.gamma < 0)
        if sign != eps:
            raise InvalidParameter(
                f"sign(gamma) must equal epsilon: gamma={self.gamma!r}, epsilon={eps}"
            )

    def matter_only(self) -> "ReducedParams":
        """Copy with the radiation term dropped."""
        return self if self.delta == 0 else replace(self, delta=0.0)

    @classmethod
    def from_triple(cls, alpha: float, beta: float, gamma: float, delta: float = 0.0):
        """Build from (alpha, beta, gamma), taking epsilon from the sign of gamma."""
        eps = (gamma > 0) - (gamma < 0)
        return cls(alpha, beta, gamma, eps, delta)


def reduce(phys: PhysicalParams) -> ReducedParams:
    """Map physical inputs to (alpha, beta, gamma).

    Uses A = M / (2 pi^2) for the conserved rho*R^3, so alpha = 4GM / (3 pi).
    """
    A = phys.M / (2.0 * math.pi**2)
    alpha = 8.0 * math.pi * phys.G / 3.0 * A
    beta = phys.Lambda * phys.c**2 / 3.0
    gamma = phys.epsilon * phys.c**2
    return ReducedParams(alpha=alpha, beta=beta, gamma=float(gamma), epsilon=phys.epsilon)


def sphere_volume(R: float) -> float:
    """Volume 2 pi^2 R^3 of the 3-sphere of radius R."""
    if not R > 0:
        raise InvalidParameter(f"R must be > 0, got {R!r}")
    return 2.0 * math.pi**2 * R**3


def density_at(R: float, M: float) -> float:
    if not R > 0:
        raise InvalidParameter(f"R must be > 0, got {R!r}")
    if not M > 0:
        raise InvalidParameter(f"M must be > 0, got {M!r}")
    return M / (2.0 * math.pi**2 * R**3)
