"""Capacitary energies and equilibrium shapes of charged flat drops."""

from .specfun import (
    RationalPolynomial,
    elliptic_K,
    elliptic_E,
    dudko_f,
    dudko_g,
    taylor_K15,
    taylor_E15,
    derive_certificate,
    sturm_constant_sign,
)
from .geometry import (
    GeometryError,
    PlanarSet,
    ConvexPolygon,
    EllipseSpec,
    perimeter,
    area,
    diameter,
    set_distance,
    convex_hull,
    hull_of_points,
    minkowski_sum,
    scale,
    rotate,
    translate,
    roundness,
    hadwiger_round,
    make_ellipse,
    make_disk,
)
from .capacity import (
    SolverError,
    Mesh,
    DiscreteMeasure,
    CapacityResult,
    build_mesh,
    assemble_kernel,
    equilibrium_measure,
    measure_energy,
    riesz_energy,
    capacity_C1,
    interaction_energy,
)
from .energy import (
    InfeasibleConfigurationError,
    EnergyReport,
    CriticalThresholds,
    BallConfiguration,
    energy_report,
    ball_energy_Q,
    ball_energy_U,
    ball_energy_U_infimum,
    optimal_ball_radius,
    critical_thresholds,
    multiball_energy_upper,
    mist_configuration,
    nonexistence_witness,
    eu_divergence_sequence,
    dudko_energy_bound,
    nondimensionalize_Q,
    nondimensionalize_U,
)
from .verify import CheckResult, run_check, run_all

__version__ = "0.1.0"
