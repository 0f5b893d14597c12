"""Invariant double circles of skew products over period-doubling maps.

The base is a one-parameter interval map f(lam, r) (the logistic map by
default); the fibre is the circle R/Z, rotated by a constant or by an amount
g(lam, r).  Past the first period doubling the base has an attracting 2-cycle
r1 < r2 and the product carries two circles {r1} x S^1 and {r2} x S^1 that
the map swaps.  This package finds the cycle and its parameter window and
checks those circles numerically.
"""

from .circle import (
    GOLDEN,
    CirclePoint,
    GapStats,
    circle_dist,
    circle_embed,
    continued_fraction,
    gap_statistics,
    normalize,
    rationality_diagnostic,
    rotate,
    star_discrepancy,
)
from .errors import (
    AmbiguousCycles,
    DomainError,
    NoFixedPoint,
    NoTwoCycle,
    OrbitEscaped,
    RationalRotation,
    WindowNotFound,
)
from .map1d import (
    ConditionReport,
    DoublingWindow,
    MapFamily,
    TwoCycle,
    check_doubling_condition,
    cycle_multiplier,
    doubling_window,
    find_fixed_points,
    find_two_cycle,
    logistic_family,
)
from .skew import (
    ConstantRotation,
    SkewState,
    SkewSystem,
    VariableRotation,
    double_step_rotation,
    exact_circle_orbit,
    orbit,
    split_parity,
    step,
)
from .verify import (
    VerificationReport,
    attraction_check,
    density_certificate,
    disjointness_check,
    epsilon_net_check,
    f2_invariance_check,
    swap_invariance_check,
    union_invariance_check,
    verify_system,
)

__version__ = "0.1.0"
