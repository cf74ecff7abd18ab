"""Regimes, closed-form markers and numerical trajectories of the Friedmann equation."""

from .cubic import CubicAnalysis, Regime, RegimeTag, analyze, classify, complex_pair, trig_roots
from .dynamics import (
    Direction,
    Event,
    EventKind,
    IntegrationConfig,
    Trajectory,
    integrate,
    locate_h_minimum,
    locate_turning_points,
    rhs_squared,
)
from .errors import (
    DegenerateDiscriminant,
    ForbiddenStart,
    FriedmannError,
    InvalidParameter,
    NoExtremumInSpan,
    RadiationNotSupported,
    SingularityFloor,
    StepFailure,
    WrongRegime,
)
from .markers import (
    HubbleLaw,
    MarkerSet,
    h_at_R_turning_vs_asymptote,
    hubble_sq,
    lambda_from_hmin,
    lambda_lower_bound,
    marker_set,
    r_min_physical,
    radiation_corrected_rmin,
)
from .params import PhysicalParams, ReducedParams, density_at, reduce, sphere_volume

__version__ = "0.1.0"
