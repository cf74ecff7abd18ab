"""Depressed cubic R^3 + pR + q = 0 behind the Friedmann equation.

Multiplying the right-hand side alpha/R + beta*R^2 - gamma by R/beta gives
the cubic with p = -gamma/beta and q = alpha/beta.  Its discriminant

    D = (alpha / 2beta)^2 - (gamma / 3beta)^3

decides which R are reachable:

* D > 0: one negative real root -r0 and a complex pair x0 +- i*y0, so the
  right-hand side is positive for every R > 0.
* D < 0 (only possible for epsilon = +1): three real roots r0neg < 0 < r1 < r2
  and the interval (r1, r2) is forbidden.
* D ~ 0: the branching case, detected and reported but not analyzed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DegenerateDiscriminant, RadiationNotSupported, WrongRegime
from .params import ReducedParams

DEGENERACY_RTOL = 1e-12
_ACOS_SLACK = 1e-14


@dataclass(frozen=True)
class OneRealPlusPair:
    """Roots -r0 (r0 > 0) and x0 +- i*y0 (y0 > 0)."""

    r0: float
    x0: float
    y0: float
    variant: str = field(default="one-real-plus-pair", init=False)


@dataclass(frozen=True)
class ThreeReal:
    r0neg: float
    r1: float
    r2: float
    phi: float
    variant: str = field(default="three-real", init=False)


@dataclass(frozen=True)
class Degenerate:
    variant: str = field(default="degenerate", init=False)


RootStructure = OneRealPlusPair | ThreeReal | Degenerate


@dataclass(frozen=True)
class CubicAnalysis:
    p: float
    q: float
    D: float
    roots: RootStructure


class RegimeTag(str, enum.Enum):
    CASE_I = "case-I"
    CASE_IIi = "case-IIi"
    CASE_IIii = "case-IIii"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Regime:
    """Regime tag with the R-regions where the Friedmann right side is >= 0.

    Regions are ``(lo, hi)`` pairs with ``hi = math.inf`` when unbounded.  The
    endpoints r1 and r2 of a forbidden interval are themselves admissible
    (R' = 0 there).
    """

    tag: RegimeTag
    D: float
    admissible_regions: tuple[tuple[float, float], ...]
    forbidden_interval: tuple[float, float] | None = None
    analysis: CubicAnalysis | None = None


def coefficients(params: ReducedParams) -> tuple[float, float, float]:
    """Return (p, q, D) without resolving roots."""
    a, b, g = params.alpha, params.beta, params.gamma
    p = -g / b
    q = a / b
    D = (a / (2.0 * b)) ** 2 - (g / (3.0 * b)) ** 3
    return p, q, D


def degeneracy_tolerance(p: float, q: float) -> float:
    # purely relative: invariant under R -> lambda*R rescaling of the coefficients
    return DEGENERACY_RTOL * max((q / 2.0) ** 2, abs(p / 3.0) ** 3)


def is_degenerate(params: ReducedParams) -> bool:
    p, q, D = coefficients(params)
    return abs(D) <= degeneracy_tolerance(p, q)


def _require_matter_only(params: ReducedParams) -> None:
    if params.delta != 0:
        raise RadiationNotSupported(
            "cubic analysis needs delta == 0; the radiation term makes the equation quartic"
        )


def _checked_discriminant(params: ReducedParams) -> tuple[float, float, float]:
    _require_matter_only(params)
    p, q, D = coefficients(params)
    tol = degeneracy_tolerance(p, q)
    if abs(D) <= tol:
        raise DegenerateDiscriminant(D, p, q, tol)
    return p, q, D


def trig_roots(params: ReducedParams) -> tuple[float, float, float]:
    """Positive roots (r1, r2) and angle phi for the three-real-root case.

    With m = sqrt(gamma / 3beta) and cos(phi) = -(alpha/2beta) * m^-3:

        r2 = 2m cos(phi/3)
        r1 = m (sqrt(3) sin(phi/3) - cos(phi/3))
    """
    p, q, D = _checked_discriminant(params)
    if D > 0:
        raise WrongRegime(f"trig_roots needs D < 0, got D={D!r}")
    a, b, g = params.alpha, params.beta, params.gamma
    m = math.sqrt(g / (3.0 * b))
    cos_phi = -(a / (2.0 * b)) / m**3
    if cos_phi < -1.0 - _ACOS_SLACK or cos_phi > 1.0 + _ACOS_SLACK:
        raise WrongRegime(f"cos(phi) = {cos_phi!r} is outside [-1, 1]")
    phi = math.acos(min(1.0, max(-1.0, cos_phi)))
    c3, s3 = math.cos(phi / 3.0), math.sin(phi / 3.0)
    r2 = 2.0 * m * c3
    r1 = m * (math.sqrt(3.0) * s3 - c3)
    # sqrt(3) sin - cos cancels when r1 << m; one Newton step restores relative accuracy
    f1, df1 = r1**3 + p * r1 + q, 3.0 * r1 * r1 + p
    if df1 != 0.0:
        polished = r1 - f1 / df1
        if abs(polished**3 + p * polished + q) <= abs(f1):
            r1 = polished
    return r1, r2, phi


def _negative_real_root(p: float, q: float) -> float:
    """Unique real root of x^3 + px + q for D > 0, q > 0 (so the root is < 0).

    Newton iteration kept inside a sign bracket; any step that leaves the
    bracket or converges too slowly is replaced by bisection.
    """
    lo, hi = -1.0 - max(abs(p), abs(q)), 0.0  # Cauchy bound: f(lo) < 0 < f(0) = q
    x = 0.5 * (lo + hi)
    step_prev = hi - lo
    step = step_prev
    for _ in range(200):
        fx = x**3 + p * x + q
        if fx == 0.0:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        dfx = 3.0 * x * x + p
        newton_ok = dfx != 0.0 and abs(2.0 * fx) <= abs(step_prev * dfx)
        x_new = x - fx / dfx if newton_ok else 0.0
        if not newton_ok or not lo < x_new < hi:
            x_new = 0.5 * (lo + hi)
        step_prev, step = step, abs(x_new - x)
        if step <= 2.0 * 2.2e-16 * abs(x_new) or hi - lo <= 2.0 * 2.2e-16 * abs(x_new):
            return x_new
        x = x_new
    return x


def complex_pair(params: ReducedParams) -> tuple[float, float, float]:
    """Return (r0, x0, y0) with roots -r0 and x0 +- i*y0 for D > 0."""
    p, q, D = _checked_discriminant(params)
    if D < 0:
        raise WrongRegime(f"complex_pair needs D > 0, got D={D!r}")
    r0 = -_negative_real_root(p, q)
    x0 = 0.5 * r0
    y0_sq = q / r0 - x0 * x0
    if not y0_sq > 0:
        raise WrongRegime(f"no complex pair: y0^2 = {y0_sq!r}")
    return r0, x0, math.sqrt(y0_sq)


def analyze(params: ReducedParams) -> CubicAnalysis:
    p, q, D = _checked_discriminant(params)
    if D > 0:
        r0, x0, y0 = complex_pair(params)
        roots: RootStructure = OneRealPlusPair(r0, x0, y0)
    else:
        r1, r2, phi = trig_roots(params)
        roots = ThreeReal(-(r1 + r2), r1, r2, phi)
    return CubicAnalysis(p, q, D, roots)


def classify(params: ReducedParams) -> Regime:
    """Sort parameters into Case I, II(i), II(ii) or the degenerate branch."""
    _require_matter_only(params)
    unbounded = ((0.0, math.inf),)
    try:
        analysis = analyze(params)
    except DegenerateDiscriminant as exc:
        return Regime(RegimeTag.DEGENERATE, exc.D, ())

    if params.epsilon in (0, -1):
        # gamma <= 0 makes D a sum of non-negative terms with (alpha/2beta)^2 > 0
        assert analysis.D > 0, analysis
        return Regime(RegimeTag.CASE_I, analysis.D, unbounded, None, analysis)
    if analysis.D > 0:
        return Regime(RegimeTag.CASE_IIii, analysis.D, unbounded, None, analysis)
    roots = analysis.roots
    assert isinstance(roots, ThreeReal)
    return Regime(
        RegimeTag.CASE_IIi,
        analysis.D,
        ((0.0, roots.r1), (roots.r2, math.inf)),
        (roots.r1, roots.r2),
        analysis,
    )
