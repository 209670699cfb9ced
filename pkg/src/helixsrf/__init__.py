"""Steiner ratio function of helical point sets in 3-space."""
from .analytic import (
    ALPHA_R,
    OMEGA_R,
    RHO_CONJECTURE,
    SrfValue,
    a_coefficient,
    conjecture_params,
    cos_theta,
    radius,
    rho_surface,
    srf,
    step_distance,
    steiner_length_density,
    symmetry_image,
)
from .errors import (
    CrossCheckFailure,
    DegenerateError,
    DegenerateRoot,
    DomainError,
    EmptyFeasibleSet,
    NonConvergence,
    SpecError,
)
from .helix import HelixParams, Point3, terminal_point
from .optimize import conjecture_report, grid_scan, refine_local, solve_triple_point
from .oracle import steiner_ratio_finite
from .region import in_compact_region, omega_window, unit_rho_curve

__version__ = "0.1.0"
