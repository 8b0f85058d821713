"""Convolution densities of convex surfaces and sharp extension-constant bounds."""

from .bounds import (
    BoundsReport,
    boundary_curve_sup,
    crossover_p0,
    gamma_fn,
    gamma_lower_pp,
    lower_bound_exp,
    pp_bounds,
    quartic_bounds,
    strichartz_ratio_pp,
)
from .config import NumericConfig, load_config
from .convolution import (
    ConvValue,
    SpaceTimePoint,
    classify_point,
    comparison_gap,
    conv_boundary,
    conv_eval,
    conv_oracle,
    conv_weighted,
)
from .diagnostics import (
    cap_interaction_bound,
    cap_interaction_numeric,
    comparison_scan,
    concentration_ratio,
    concentration_study,
)
from .geometry import SurfaceSpec, check_surface, det_T_prime, g_function, solve_lambda, surface_eval, transform_T
from .purepower import conv_pp, conv_quartic_closed, invert_phi_theta, phi_theta, phi_theta_prime
from .surfaces import get_surface

__version__ = "0.1.0"
