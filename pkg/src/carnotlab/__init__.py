"""Exact horizontal calculus, gauge-ball quadrature, and heat Monte Carlo
on step-2 Carnot groups."""

from .fields import (
    BochnerLeftTerms,
    VectorField,
    bochner_left_terms,
    bochner_residual_right,
    caloric_residual,
    carre_du_champ,
    commutator,
    difference_residual,
    dilation_field,
    harmonic_basis,
    horizontal_fields,
    horizontal_gradient,
    horizontal_laplacian,
    left_field,
    right_field,
    theta_field,
    vertical_field,
)
from .functionals import (
    FrequencyValue,
    IdentityDefect,
    ProbeResult,
    RepresentationDefect,
    SplitDirichlet,
    TwoTermFrequency,
    acf_product,
    conjecture_probe,
    d_alpha,
    dirichlet_identity_defect,
    disk_quadratic_max,
    frequency,
    frequency_two_term,
    m_alpha,
    mean_value_defect,
    omega,
    omega_r_independence,
    orthogonality_defect,
    surface_average,
)
from .gaugering import (
    GaugeElem,
    GaugeRing,
    UnsupportedGroupError,
    gauge,
    gauge_fourth_power,
    gauge_pairing_residual,
    radial_power_laplacian_residual,
    verify_gauge,
)
from .groups import (
    GroupSpec,
    GroupValidationError,
    Point,
    builtin_group,
    dilate,
    free_step_two,
    group_from_json,
    group_to_json,
    heisenberg,
    identity,
    inverse,
    multiply,
    point,
    resolve_group,
)
from .heat import (
    HeatConfig,
    HeatEstimate,
    LowerBoundReport,
    PathEnsemble,
    PtScan,
    heat_functional,
    heat_scan,
    lower_bound_check,
    observable_mean,
    pt_monotone_check,
    simulate,
)
from .poly import Poly, PolyParseError, parse_poly
from .presets import PRESETS, preset_names, resolve_poly
from .quadrature import (
    MCEstimate,
    NonintegrableError,
    QuadratureConfig,
    QuadratureGrid,
    SphereChart,
    ball_integral,
    default_grid,
    mc_ball_integral,
    sphere_chart,
    surface_integral,
)
from .scans import ScanReport, linear_grid, monotonicity_scan, scan_verdict, write_csv

__version__ = "0.1.0"
