"""Exact-arithmetic analysis of expanding Lorenz maps.

Minimal periods and their unique periodic orbits, renormalization
checking and towers, backward-limit classification, and the
nonwandering decomposition, all over exact rationals with certified
comparisons.
"""

from .numerics import (
    CertifiedReal,
    Interval,
    Order,
    PrecisionExhausted,
    Scalar,
    cmp_certified,
    interval_contains,
    parse_scalar,
    format_scalar,
    sqrt_rational,
)
from .maps import (
    BranchFn,
    BranchLabel,
    IntervalDoesNotStraddleC,
    LorenzMap,
    Side,
    SidedPoint,
    SideRequired,
    ValidationReport,
    beta_transformation,
    evaluate,
    inverse_images,
    iterate,
    parse_map_text,
    rescale_to_unit,
    symmetric_map,
    validate_map,
)
from .interval_dynamics import (
    CapExceeded,
    CoverageResult,
    HittingResult,
    IntervalUnion,
    covering_check,
    hitting_index,
    image_union,
    interval_orbit,
    leo_evidence,
)
from .periods import (
    AmbiguousPreimage,
    BranchBudgetExceeded,
    MinimalPeriodResult,
    PeriodicOrbit,
    UniquenessViolated,
    fixed_points,
    minimal_period,
    minimal_periodic_orbit,
    periodic_points,
)
from .renorm import (
    MinimalRenormResult,
    RenormCheck,
    RenormStep,
    Tower,
    TowerLevel,
    TowerTerminal,
    Trichotomy,
    classify_trichotomy,
    is_valid_renormalization,
    minimal_renormalization,
    periodic_renorm_check,
    renorm_tower,
)
from .limits import (
    AlphaClass,
    AlphaKind,
    Membership,
    MembershipResult,
    OmegaDecomposition,
    OmegaPart,
    StructureKind,
    StructureTag,
    alpha_classify,
    alpha_limit_approx,
    depth_report,
    membership_E,
    omega_decomposition,
    orbit_unions,
    preimage_open_intervals,
)

__version__ = "0.1.0"
