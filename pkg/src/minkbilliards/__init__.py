"""Billiards within an ellipsoid in the 3-dimensional Minkowski space.

Numeric simulator (reflection, caustics, period detection), exact-rational
rank-type periodicity conditions, polynomial Pell identities, and a
search-and-cross-validate pipeline connecting the two.
"""

from .confocal import (
    CausticCase,
    CausticPair,
    Ellipsoid,
    EllipticCoords,
    IntervalPartition,
    QuadricType,
    classify_case,
    elliptic_coordinates,
    interval_partition,
    line_caustics,
    point_from_elliptic,
    quadric_residual,
    quadric_type,
)
from .conditions import (
    HyperellipticParams,
    cayley_test,
    condition_vector,
    darboux_integrals,
    divided_series,
    double_caustic_test,
    lightlike_test,
    rationalize,
    sqrt_series,
)
from .minkowski import (
    LineType,
    Vec3,
    classify_direction,
    mink_dot,
    mink_quadrance,
    reflect_direction,
)
from .pell import (
    PellSolution,
    PellVariant,
    RatPoly,
    compose_pell,
    solve_pell,
    solve_pell_singular,
    verify_pell,
)
from .search import (
    PeriodicCandidate,
    SearchSpec,
    ValidationReport,
    cross_validate,
    find_periodic,
    tangent_line_for_caustics,
)
from .series import (
    HankelMatrix,
    NormalizedSeries,
    SeriesKind,
    hankel_block,
    hankel_rank,
)
from .simulator import (
    BounceRecord,
    PeriodSignature,
    SurfaceComponent,
    Trajectory,
    chasles_residual,
    classify_surface_point,
    detect_period,
    next_impact,
    parity_ok,
    reflect_at,
    surface_normal,
    trace,
)

__version__ = "0.1.0"
