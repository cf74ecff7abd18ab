"""Numerical integration of the Friedmann equation with event detection.

Away from zeros of f(R) = alpha/R + delta/R^2 + beta*R^2 - gamma the solver
integrates the first-order form dR/dt = s * sqrt(f(R)), s = +-1.  Inside a
guard band f(R) <= guard * scale(R) it switches to the second-order form

    R'' = f'(R) / 2

so trajectories pass through R' = 0 (recollapse/bounce), where the square
root is not Lipschitz.  Each stretch is one scipy ``solve_ivp`` call; the
dense interpolants are kept so events can be refined after the fact.

Time is anchored at t = 0 for ``r_start``.
"""

from __future__ import annotations

import bisect
import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .cubic import RegimeTag, classify
from .errors import (
    DegenerateDiscriminant,
    ForbiddenStart,
    InvalidParameter,
    NoExtremumInSpan,
    SingularityFloor,
    StepFailure,
)
from .params import ReducedParams

log = logging.getLogger(__name__)

_MAX_SEGMENTS = 10_000
# H'' stencil step as a fraction of the local Hubble time 1/max(|H|, sqrt(beta))
_STENCIL_FRACTION = 0.02
_EPS = np.finfo(float).eps


class Direction(str, enum.Enum):
    EXPANDING = "expanding"
    CONTRACTING = "contracting"


class EventKind(str, enum.Enum):
    HUBBLE_MINIMUM = "HubbleMinimum"
    HUBBLE_MAXIMUM = "HubbleMaximum"
    R_TURNING_POINT = "RTurningPoint"
    H_TURNING_POINT = "HTurningPoint"
    RECOLLAPSE = "Recollapse"
    BOUNCE = "Bounce"
    SINGULARITY_APPROACH = "SingularityApproach"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    R: float
    H: float


@dataclass(frozen=True)
class IntegrationConfig:
    """Integration settings.

    ``r_stop`` ends an expanding run once R reaches it; ``r_floor`` ends a
    contracting run near the big-bang singularity (default 1e-8 * 3alpha/2gamma,
    or 1e-8 without a positive gamma).  ``floor_policy="raise"`` turns reaching
    the floor into :class:`SingularityFloor`.
    """

    r_start: float
    t_span: float
    direction: Direction = Direction.EXPANDING
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float | None = None
    event_refinement_tol: float | None = None
    r_stop: float | None = None
    r_floor: float | None = None
    floor_policy: str = "event"
    guard: float = 1e-2
    method: str = "RK45"

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        if not (self.r_start > 0 and math.isfinite(self.r_start)):
            raise InvalidParameter(f"r_start must be finite and > 0, got {self.r_start!r}")
        if not (self.t_span > 0 and math.isfinite(self.t_span)):
            raise InvalidParameter(f"t_span must be finite and > 0, got {self.t_span!r}")
        for name in ("rel_tol", "abs_tol", "max_step", "event_refinement_tol", "r_floor"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidParameter(f"{name} must be > 0, got {v!r}")
        if self.r_stop is not None and not self.r_stop > 0:
            raise InvalidParameter(f"r_stop must be > 0, got {self.r_stop!r}")
        if not 0 < self.guard < 0.5:
            raise InvalidParameter(f"guard must be in (0, 0.5), got {self.guard!r}")
        if self.floor_policy not in ("event", "raise"):
            raise InvalidParameter(f"floor_policy must be 'event' or 'raise', got {self.floor_policy!r}")

    @property
    def step_cap(self) -> float:
        return self.max_step if self.max_step is not None else self.t_span / 100.0

    @property
    def refinement_tol(self) -> float:
        if self.event_refinement_tol is not None:
            return self.event_refinement_tol
        return 1e-12 * self.t_span


def rhs_squared(R: float, params: ReducedParams) -> float:
    """Right-hand side of the Friedmann equation, i.e. R'(t)^2."""
    if not R > 0:
        raise InvalidParameter(f"R must be > 0, got {R!r}")
    return _f(R, params)


def _f(R, p: ReducedParams):
    return p.alpha / R + p.delta / R**2 + p.beta * R**2 - p.gamma


def _df(R, p: ReducedParams):
    return -p.alpha / R**2 - 2.0 * p.delta / R**3 + 2.0 * p.beta * R


def _scale(R, p: ReducedParams):
    return p.alpha / R + p.delta / R**2 + p.beta * R**2 + abs(p.gamma)


@dataclass(frozen=True)
class _Segment:
    second_order: bool
    sign: float
    t0: float
    t1: float
    sol: object  # scipy OdeSolution

    def state(self, t: float, params: ReducedParams) -> tuple[float, float]:
        y = self.sol(t)
        if self.second_order:
            return float(y[0]), float(y[1])
        R = float(y[0])
        return R, self.sign * math.sqrt(max(_f(R, params), 0.0))

    def states(self, t: np.ndarray, params: ReducedParams) -> tuple[np.ndarray, np.ndarray]:
        y = self.sol(t)
        if self.second_order:
            return y[0], y[1]
        R = y[0]
        return R, self.sign * np.sqrt(np.maximum(_f(R, params), 0.0))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Integrated samples (t, R, Rdot, H) plus detected events.

    Sample arrays are read-only; ``state_at`` evaluates the dense output
    between samples.
    """

    params: ReducedParams
    config: IntegrationConfig
    t: np.ndarray
    R: np.ndarray
    Rdot: np.ndarray
    H: np.ndarray
    segments: tuple[_Segment, ...] = field(repr=False)
    events: tuple[Event, ...] = ()

    @property
    def samples(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self.t.tolist(), self.R.tolist(), self.Rdot.tolist(), self.H.tolist()))

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def state_at(self, t: float) -> tuple[float, float]:
        if not self.t[0] <= t <= self.t[-1]:
            raise InvalidParameter(f"t={t!r} outside [{self.t[0]!r}, {self.t[-1]!r}]")
        starts = [s.t0 for s in self.segments]
        i = max(bisect.bisect_right(starts, t) - 1, 0)
        return self.segments[i].state(t, self.params)

    def hubble_at(self, t: float) -> float:
        R, V = self.state_at(t)
        return V / R

    def states_at(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized ``state_at``: arrays R(t), Rdot(t)."""
        t = np.asarray(t, dtype=float)
        if t.size and (t.min() < self.t[0] or t.max() > self.t[-1]):
            raise InvalidParameter("times outside the integrated span")
        starts = np.array([s.t0 for s in self.segments])
        idx = np.maximum(np.searchsorted(starts, t, side="right") - 1, 0)
        R = np.empty(t.shape)
        V = np.empty(t.shape)
        for i in np.unique(idx):
            sel = idx == i
            R[sel], V[sel] = self.segments[i].states(t[sel], self.params)
        return R, V

    def energy_residual(self) -> np.ndarray:
        """|Rdot^2 - f(R)| / max(beta, f(R)) at every sample."""
        f = _f(self.R, self.params)
        return np.abs(self.Rdot**2 - f) / np.maximum(self.params.beta, f)

    def events_of(self, kind: EventKind) -> list[Event]:
        return [e for e in self.events if e.kind is kind]


def _check_start(params: ReducedParams, r_start: float) -> None:
    if params.delta == 0:
        regime = classify(params)
        if regime.tag is RegimeTag.DEGENERATE:
            raise DegenerateDiscriminant(regime.D, float("nan"), float("nan"), 0.0)
        if regime.forbidden_interval is not None:
            r1, r2 = regime.forbidden_interval
            if r1 < r_start < r2:
                raise ForbiddenStart(f"r_start={r_start!r} lies in the forbidden interval ({r1!r}, {r2!r})")
    # roots computed in closed form may sit a few ulps off; tolerate that much
    if _f(r_start, params) < -1e-12 * _scale(r_start, params):
        raise ForbiddenStart(f"f(r_start) = {_f(r_start, params)!r} < 0 at r_start={r_start!r}")


def _terminal(fn, direction=0):
    fn.terminal = True
    fn.direction = direction
    return fn


def integrate(params: ReducedParams, config: IntegrationConfig) -> Trajectory:
    _check_start(params, config.r_start)
    p = params
    guard = config.guard
    r_floor = config.r_floor
    if r_floor is None:
        r_floor = 1e-8 * (1.5 * p.alpha / p.gamma if p.gamma > 0 else 1.0)
    expanding = config.direction is Direction.EXPANDING

    def first_order(t, y, s):
        R = y[0]
        if R <= 0:
            return [math.nan]
        return [s * math.sqrt(max(_f(R, p), 0.0))]

    def second_order(t, y):
        R = y[0]
        if R <= 0:
            return [math.nan, math.nan]
        return [y[1], 0.5 * _df(R, p)]

    enter_band = _terminal(lambda t, y, *a: _f(y[0], p) - guard * _scale(y[0], p), -1)
    leave_band = _terminal(lambda t, y, *a: _f(y[0], p) - 2.0 * guard * _scale(y[0], p), +1)
    floor_hit = _terminal(lambda t, y, *a: y[0] - r_floor, -1)
    stop_events = [floor_hit]
    if config.r_stop is not None:
        stop_events.append(_terminal(lambda t, y, *a: y[0] - config.r_stop, +1))

    R = config.r_start
    f0 = max(_f(R, p), 0.0)
    sign = 1.0 if expanding else -1.0
    V = sign * math.sqrt(f0)
    second = f0 <= guard * _scale(R, p)
    t = 0.0
    t_end = config.t_span
    segments: list[_Segment] = []
    hit_floor = False

    while t < t_end:
        if len(segments) >= _MAX_SEGMENTS:
            raise StepFailure("too many mode switches", (t, R, V))
        common = dict(
            method=config.method,
            rtol=config.rel_tol,
            atol=config.abs_tol,
            max_step=config.step_cap,
            dense_output=True,
        )
        if second:
            sol = solve_ivp(second_order, (t, t_end), [R, V], events=[leave_band, *stop_events], **common)
        else:
            sol = solve_ivp(first_order, (t, t_end), [R], events=[enter_band, *stop_events], args=(sign,), **common)
        if sol.status == -1:
            last = (float(sol.t[-1]), float(sol.y[0, -1]), float(sol.y[-1, -1]) if second else V)
            raise StepFailure(f"integration failed at t={sol.t[-1]!r}: {sol.message}", last)
        seg = _Segment(second, sign, float(sol.t[0]), float(sol.t[-1]), sol.sol)
        segments.append(seg)
        t = seg.t1
        R, V = seg.state(t, p)
        if sol.status == 0:
            break
        fired = [i for i, te in enumerate(sol.t_events) if len(te)]
        if 1 in fired:
            hit_floor = True
            break
        if 2 in fired:
            break
        if second:
            sign = 1.0 if V >= 0 else -1.0
            log.debug("t=%g R=%g: leaving guard band (sign %+d)", t, R, sign)
        else:
            log.debug("t=%g R=%g: entering guard band", t, R)
        second = not second

    traj = _assemble(p, config, segments)
    events = detect_events(traj)
    if hit_floor:
        events.append(Event(EventKind.SINGULARITY_APPROACH, t, R, V / R))
    traj = _with_events(traj, events)
    if hit_floor and config.floor_policy == "raise":
        raise SingularityFloor(f"R fell below floor {r_floor!r} at t={t!r}", traj)
    return traj


def _assemble(p: ReducedParams, config: IntegrationConfig, segments: list[_Segment]) -> Trajectory:
    ts, Rs, Vs = [], [], []
    for seg in segments:
        st = seg.sol.ts
        if ts and st[0] <= ts[-1][-1]:
            st = st[1:]
        ys = np.array([seg.state(tt, p) for tt in st]).reshape(-1, 2)
        ts.append(np.asarray(st, dtype=float))
        Rs.append(ys[:, 0])
        Vs.append(ys[:, 1])
    t = np.concatenate(ts)
    R = np.concatenate(Rs)
    V = np.concatenate(Vs)
    H = V / R
    for arr in (t, R, V, H):
        arr.setflags(write=False)
    return Trajectory(p, config, t, R, V, H, tuple(segments))


def _with_events(traj: Trajectory, events: list[Event]) -> Trajectory:
    """Attach events and merge their states into the sample arrays."""
    events = sorted(events, key=lambda e: e.t)
    extra = [e.t for e in events if e.t not in set(traj.t.tolist())]
    t = traj.t
    R, V = traj.R, traj.Rdot
    if extra:
        states = np.array([traj.state_at(te) for te in extra])
        t = np.concatenate([t, extra])
        order = np.argsort(t, kind="stable")
        t = t[order]
        R = np.concatenate([R, states[:, 0]])[order]
        V = np.concatenate([V, states[:, 1]])[order]
    H = V / R
    for arr in (t, R, V, H):
        arr.setflags(write=False)
    return Trajectory(traj.params, traj.config, t, R, V, H, traj.segments, tuple(events))


def _brackets(t: np.ndarray, values: np.ndarray, rising: bool | None = None):
    """Sign-change brackets of ``values``; zeros are treated as unknown sign."""
    nz = np.flatnonzero(values)
    out = []
    for i, j in zip(nz[:-1], nz[1:]):
        a, b = values[i], values[j]
        if (a < 0) == (b < 0):
            continue
        if rising is True and not a < 0:
            continue
        if rising is False and not a > 0:
            continue
        out.append((float(t[i]), float(t[j])))
    return out


def _refine(fn, lo: float, hi: float, traj: Trajectory) -> float:
    xtol = traj.config.refinement_tol
    return brentq(fn, lo, hi, xtol=xtol, rtol=1e-15, maxiter=500)


def _event_at(kind: EventKind, t: float, traj: Trajectory) -> Event:
    R, V = traj.state_at(t)
    return Event(kind, t, R, V / R)


def _hdot_at(traj: Trajectory, t: float) -> float:
    R, V = traj.state_at(t)
    return 0.5 * _df(R, traj.params) / R - (V / R) ** 2


def _hubble_extrema(traj: Trajectory) -> list[Event]:
    p = traj.params
    hdot = 0.5 * _df(traj.R, p) / traj.R - traj.H**2
    events = []
    for rising, kind in ((True, EventKind.HUBBLE_MINIMUM), (False, EventKind.HUBBLE_MAXIMUM)):
        for lo, hi in _brackets(traj.t, hdot, rising):
            te = _refine(lambda s: _hdot_at(traj, s), lo, hi, traj)
            events.append(_event_at(kind, te, traj))
    return events


def _r_turning(traj: Trajectory) -> list[Event]:
    """Sign changes of R'' = f'(R)/2."""
    p = traj.params
    events = []
    for lo, hi in _brackets(traj.t, _df(traj.R, p)):
        te = _refine(lambda s: _df(traj.state_at(s)[0], p), lo, hi, traj)
        events.append(_event_at(EventKind.R_TURNING_POINT, te, traj))
    return events


def _stencil_h(traj: Trajectory, t: float) -> float:
    H = abs(traj.hubble_at(t))
    return _STENCIL_FRACTION / max(H, math.sqrt(traj.params.beta))


def _hddot(traj: Trajectory, t, h):
    """Five-point central difference for H''(t) on the dense output (vectorized)."""
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    pts = t[..., None] + offsets * h[..., None]
    R, V = traj.states_at(pts.ravel())
    H = (V / R).reshape(pts.shape)
    w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0])
    return (H @ w) / (12.0 * h * h)


def _h_turning(traj: Trajectory) -> list[Event]:
    """Sign changes of H''(t), estimated by finite differences.

    A sample only gets a sign when the estimate clears the roundoff floor of
    the stencil and agrees with the estimate at double step, so the flat
    late-time tail cannot fake inflections.
    """
    t0, t1 = traj.t[0], traj.t[-1]
    h = _STENCIL_FRACTION / np.maximum(np.abs(traj.H), math.sqrt(traj.params.beta))
    inside = (traj.t - 4 * h >= t0) & (traj.t + 4 * h <= t1)
    vals = np.zeros(len(traj.t))
    if inside.any():
        ti, hi_, Hi = traj.t[inside], h[inside], traj.H[inside]
        g1 = _hddot(traj, ti, hi_)
        g2 = _hddot(traj, ti, 2 * hi_)
        ok = (np.abs(g1) > 1e3 * _EPS * np.abs(Hi) / hi_**2) & (np.abs(g1 - g2) <= 0.5 * np.abs(g1))
        vals[inside] = np.where(ok, g1, 0.0)
    events = []
    for lo, hi in _brackets(traj.t, vals):
        step = min(_stencil_h(traj, lo), _stencil_h(traj, hi))

        def g(s, step=step):
            return float(_hddot(traj, s, step))

        if g(lo) * g(hi) > 0:
            continue
        te = _refine(g, lo, hi, traj)
        events.append(_event_at(EventKind.H_TURNING_POINT, te, traj))
    return events


def _reversals(traj: Trajectory) -> list[Event]:
    events = []
    for seg in traj.segments:
        if not seg.second_order:
            continue
        mask = (traj.t >= seg.t0) & (traj.t <= seg.t1)
        ts, vs = traj.t[mask], traj.Rdot[mask]
        for rising, kind in ((False, EventKind.RECOLLAPSE), (True, EventKind.BOUNCE)):
            for lo, hi in _brackets(ts, vs, rising):
                te = _refine(lambda s: seg.state(s, traj.params)[1], lo, hi, traj)
                events.append(_event_at(kind, te, traj))
    return events


def detect_events(traj: Trajectory) -> list[Event]:
    """All Hubble extrema, turning points and reversals along ``traj``."""
    events = _hubble_extrema(traj) + _r_turning(traj) + _h_turning(traj) + _reversals(traj)
    return sorted(events, key=lambda e: e.t)


def locate_h_minimum(traj: Trajectory) -> Event:
    """First minimum of H(t) along the trajectory."""
    found = [e for e in _hubble_extrema(traj) if e.kind is EventKind.HUBBLE_MINIMUM]
    if not found:
        raise NoExtremumInSpan("H(t) has no minimum over the integrated span")
    return found[0]


def locate_turning_points(traj: Trajectory, params: ReducedParams | None = None) -> list[Event]:
    """Inflections of R(t) and of H(t), ordered in time."""
    if params is not None and params != traj.params:
        raise InvalidParameter("params do not match the trajectory")
    found = sorted(_r_turning(traj) + _h_turning(traj), key=lambda e: e.t)
    if not found:
        raise NoExtremumInSpan("no turning point of R or H over the integrated span")
    return found
