"""Closed-form Hubble-parameter markers for the expanding closed universe.

Everything here follows from

    H^2(R) = beta + alpha/R^3 + delta/R^4 - gamma/R^2

together with the time derivative of H along any solution,

    dH/dt = -3 alpha / (2 R^3) - 2 delta / R^4 + gamma / R^2,

which depends on R only.  For delta = 0 and D > 0, epsilon = +1 (case II(ii)):

* R(t) has its inflection at R_w = (alpha / 2beta)^(1/3),
* H(t) is minimal at R_min = 3 alpha / 2 gamma, with
  H_min^2 = beta - 4 gamma^3 / (27 alpha^2),
* H(t) has its inflection at R_wH = 9 alpha / 4 gamma,
* H -> sqrt(beta) as R -> infinity,
* R' >= sqrt(beta) * y0, where x0 +- i y0 are the complex cubic roots.

H(t_w)^2 = 3 beta - gamma (alpha / 2beta)^(-2/3) exceeds beta exactly when
2 alpha^2 beta > gamma^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .cubic import RegimeTag, classify, complex_pair
from .errors import InvalidParameter, WrongRegime
from .params import PhysicalParams, ReducedParams, reduce

Ordering = Literal["below", "equal", "above"]


def _check_R(R) -> None:
    if not np.all(np.asarray(R) > 0):
        raise InvalidParameter(f"R must be > 0, got {R!r}")


def hubble_sq(R, params: ReducedParams):
    """H^2 at scale factor R (scalar or array); negative inside a forbidden interval."""
    _check_R(R)
    a, b, g, d = params.alpha, params.beta, params.gamma, params.delta
    return b + a / R**3 + d / R**4 - g / R**2


@dataclass(frozen=True)
class HubbleLaw:
    """H^2 and its derivatives as functions of R for fixed coefficients."""

    params: ReducedParams

    def __call__(self, R: float) -> float:
        return hubble_sq(R, self.params)

    def dR(self, R: float) -> float:
        """d(H^2)/dR."""
        _check_R(R)
        a, g, d = self.params.alpha, self.params.gamma, self.params.delta
        return -3.0 * a / R**4 - 4.0 * d / R**5 + 2.0 * g / R**3

    def dR2(self, R: float) -> float:
        """d^2(H^2)/dR^2."""
        _check_R(R)
        a, g, d = self.params.alpha, self.params.gamma, self.params.delta
        return 12.0 * a / R**5 + 20.0 * d / R**6 - 6.0 * g / R**4

    def hdot(self, R: float) -> float:
        """dH/dt at scale factor R (same on expanding and contracting branches)."""
        _check_R(R)
        a, g, d = self.params.alpha, self.params.gamma, self.params.delta
        return -1.5 * a / R**3 - 2.0 * d / R**4 + g / R**2

    def hdot_dR(self, R: float) -> float:
        """d/dR of dH/dt; H''(t) = hdot_dR(R) * R'(t)."""
        _check_R(R)
        a, g, d = self.params.alpha, self.params.gamma, self.params.delta
        return 4.5 * a / R**4 + 8.0 * d / R**5 - 2.0 * g / R**3


@dataclass(frozen=True)
class MarkerSet:
    R_w: float
    R_min: float
    R_wH: float
    H_min_sq: float
    H_w_sq: float
    H_inf: float
    speed_bound: float


def _require_case_iiii(params: ReducedParams) -> None:
    regime = classify(params)
    if regime.tag is not RegimeTag.CASE_IIii:
        raise WrongRegime(f"needs case II(ii) (epsilon=+1, D>0), got {regime.tag.value}")


def marker_set(params: ReducedParams) -> MarkerSet:
    _require_case_iiii(params)
    a, b, g = params.alpha, params.beta, params.gamma
    _, _, y0 = complex_pair(params)
    R_w = (a / (2.0 * b)) ** (1.0 / 3.0)
    return MarkerSet(
        R_w=R_w,
        R_min=1.5 * a / g,
        R_wH=2.25 * a / g,
        H_min_sq=b - 4.0 * g**3 / (27.0 * a * a),
        H_w_sq=3.0 * b - g / (R_w * R_w),
        H_inf=math.sqrt(b),
        speed_bound=math.sqrt(b) * y0,
    )


def h_at_R_turning_vs_asymptote(params: ReducedParams, rtol: float = 1e-12) -> Ordering:
    """Position of H(t_w)^2 relative to beta = H(infinity)^2.

    Compared directly; values within ``rtol * beta`` count as equal.
    """
    m = marker_set(params)
    diff = m.H_w_sq - params.beta
    if abs(diff) <= rtol * params.beta:
        return "equal"
    return "above" if diff > 0 else "below"


def _check_closed(phys: PhysicalParams) -> None:
    if phys.epsilon != 1:
        raise InvalidParameter(f"needs epsilon = +1, got {phys.epsilon}")


def lambda_bound(G: float, c: float, M: float) -> float:
    """pi^2 c^4 / (4 (G M)^2): D > 0 iff Lambda exceeds this."""
    for name, v in (("G", G), ("c", c), ("M", M)):
        if not (v > 0 and math.isfinite(v)):
            raise InvalidParameter(f"{name} must be finite and > 0, got {v!r}")
    return math.pi**2 * c**4 / (4.0 * (G * M) ** 2)


def lambda_lower_bound(phys: PhysicalParams) -> float:
    _check_closed(phys)
    return lambda_bound(phys.G, phys.c, phys.M)


def r_min_physical(phys: PhysicalParams) -> float:
    """2GM / (pi c^2), the location of the Hubble minimum."""
    _check_closed(phys)
    _require_case_iiii(reduce(phys))
    return 2.0 * phys.G * phys.M / (math.pi * phys.c**2)


def lambda_from_hmin(h_min: float, G: float, c: float, M: float) -> float:
    """Invert H_min^2 = (c^2/3) (Lambda - pi^2 c^4 / 4(GM)^2) for Lambda."""
    if not (h_min >= 0 and math.isfinite(h_min)):
        raise InvalidParameter(f"h_min must be finite and >= 0, got {h_min!r}")
    return 3.0 * h_min**2 / c**2 + lambda_bound(G, c, M)


def radiation_corrected_rmin(params: ReducedParams) -> float:
    """Hubble-minimum location with the radiation term delta/R^4 in H^2.

    Stationary point of H^2: positive root of 2 gamma R^2 - 3 alpha R - 4 delta = 0.
    delta = 0 gives back 3 alpha / 2 gamma.
    """
    if params.epsilon != 1:
        raise WrongRegime(f"needs epsilon = +1, got {params.epsilon}")
    a, g, d = params.alpha, params.gamma, params.delta
    return (3.0 * a + math.sqrt(9.0 * a * a + 32.0 * g * d)) / (4.0 * g)
