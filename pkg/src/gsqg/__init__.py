"""Patch dynamics for generalized surface quasi-geostrophic flows.

Active scalars theta transported by u = grad^perp (-Delta)^{-1} m(Lambda)
theta, on the whole plane or the upper half-plane with an impermeable wall.
The package builds the radial convolution kernel from the spectral
multiplier m, evolves patch boundaries by contour dynamics, audits the
velocity sign bounds that drive two patches into the wall corner, and runs
the approach-to-collision scenario end to end.
"""

from .multipliers import (
    Multiplier,
    Regime,
    make_multiplier,
    check_hypotheses,
    classify_osgood,
    script_g,
)
from .kernel import (
    KernelTable,
    build_table,
    closed_form_G,
    compute_G,
    compute_G_prime,
    compute_R,
    verify_asymptotics,
)
from .contour import (
    ContourSystem,
    Diagnostics,
    PatchContour,
    compute_rhs,
    diagnostics,
    init_shape,
    mirror_patch,
    patch_area,
    point_inside,
    reparametrize,
    reparametrize_system,
    step,
)
from .velocity import (KernelSplit, RegionSet, SplitVelocities,
                       VelocityEstimate, bad_part_majorant, disk_region,
                       kernel_split, rect_region, split_velocities,
                       triangle_region, velocity_area, velocity_contour)
from .scenario import (
    BoundsReport,
    CollisionTime,
    ContainmentReport,
    OutputRecord,
    PiIndices,
    ProbeAudit,
    ScenarioConfig,
    ScenarioResult,
    build_initial_data,
    collision_time,
    containment_check,
    driving_rate,
    pi_indices,
    run_scenario,
    verify_velocity_bounds,
)
from .errors import (
    AccuracyError,
    CflError,
    ContactImminentError,
    DerivativeUnavailableError,
    DomainError,
    GsqgError,
    IndeterminateTailError,
    NoCollisionError,
    PositivityError,
    ProximityError,
    QuadratureError,
    SelfIntersectionError,
    SingularEvaluationError,
    TableRangeError,
    ToleranceUnattainableError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "Multiplier",
    "Regime",
    "make_multiplier",
    "check_hypotheses",
    "classify_osgood",
    "script_g",
    "KernelTable",
    "build_table",
    "closed_form_G",
    "compute_G",
    "compute_G_prime",
    "compute_R",
    "verify_asymptotics",
    "ContourSystem",
    "Diagnostics",
    "PatchContour",
    "compute_rhs",
    "diagnostics",
    "init_shape",
    "mirror_patch",
    "patch_area",
    "point_inside",
    "reparametrize",
    "reparametrize_system",
    "step",
    "BoundsReport",
    "CollisionTime",
    "ContainmentReport",
    "OutputRecord",
    "PiIndices",
    "ProbeAudit",
    "ScenarioConfig",
    "ScenarioResult",
    "build_initial_data",
    "collision_time",
    "containment_check",
    "driving_rate",
    "pi_indices",
    "run_scenario",
    "verify_velocity_bounds",
    "AccuracyError",
    "CflError",
    "ContactImminentError",
    "DerivativeUnavailableError",
    "DomainError",
    "GsqgError",
    "IndeterminateTailError",
    "NoCollisionError",
    "PositivityError",
    "ProximityError",
    "QuadratureError",
    "SelfIntersectionError",
    "SingularEvaluationError",
    "TableRangeError",
    "ToleranceUnattainableError",
    "ValidationError",
    "__version__",
    "KernelSplit",
    "RegionSet",
    "SplitVelocities",
    "VelocityEstimate",
    "bad_part_majorant",
    "disk_region",
    "kernel_split",
    "rect_region",
    "split_velocities",
    "triangle_region",
    "velocity_area",
    "velocity_contour",
]
