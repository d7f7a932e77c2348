"""
Library defaults and plot styling.
Numerical laboratory for mean curvature flow and self-expanders.
"""

import os
from pathlib import Path

BASE_DIR = Path(__file__).parent.parent
CONFIG_DIR = BASE_DIR / 'configs'

# Environment variable naming the default output root for runs
OUTPUT_ROOT_ENV = 'MCF_LAB_OUTPUT_ROOT'


def default_output_root() -> Path:
    """Output root from the environment, falling back to ./runs."""
    return Path(os.environ.get(OUTPUT_ROOT_ENV, 'runs'))


# Monochrome scheme shared with the plotting module
COLORS = {
    'bg_dark': '#0a0a0a',       # Figure background
    'bg_light': '#1e1e1e',      # Plot area
    'text_white': '#ffffff',
    'text_light': '#e0e0e0',
    'grid': '#2a2a2a',

    'accent_green': '#3d9970',  # Initial data / PASS
    'accent_red': '#dc3545',    # FAIL
    'accent_blue': '#5bc0de',   # Evolving snapshots
    'accent_yellow': '#d69e2e', # Reference profiles
    'accent_purple': '#805ad5',
    'accent_orange': '#dd6b20',
}

PLOT_CONFIG = {
    'height': 600,
    'template': 'plotly_dark',
    'max_snapshot_traces': 12,   # Snapshots drawn per profile figure
    'line_width': 1.5,
}

# Representation and geometry defaults
GEOMETRY_DEFAULTS = {
    'min_curve_nodes': 8,           # PlanarCurve lower bound
    'axis_tolerance': 1e-12,        # |r| below this counts as on the axis
    'graph_direction_sign': -1.0,   # w = sign * e_{n+1}; graphs carry a downward normal
    'hyperboloid_epsilon': 1e-3,    # Sheet parametrization starts at u = 1 + eps
}

# Flow engine defaults
FLOW_DEFAULTS = {
    'cfl': 0.5,                     # theta in (0, 1]
    'max_step': 1e-2,               # Upper bound on an accepted step
    'max_halvings': 20,             # Rejected-step halvings before giving up
    'max_steps': 2_000_000,
    'curvature_ceiling': 1e4,       # FiniteTimeSingularity when max|A|^2 exceeds this (x initial max|A|^2, min 1)
    'blowup_product': 0.5,          # ... or when max|A|^2 * step exceeds this
    'mesh_floor': 1e-7,             # MeshCollapse below this edge length
    'gradient_bound': 1e3,          # GaugeLoss above this sup|u_r|
    'displacement_fraction': 0.5,   # Reject steps moving a node further than this * min edge
    'r_max': 20.0,                  # Default truncation radius in similarity variables
}

# Monitor tolerances
TOLERANCES = {
    'tol_mono': 1e-6,               # Integral monotonicity, relative per sample pair
    'tol_pointwise': 5e-2,          # Pointwise identities at baseline resolution
    'tol_slope': 5e-2,              # Weighted-mass slope against -deficit
    'overflow_exponent': 700.0,     # Weight exponents above this are excluded
    'excluded_fraction': 1e-12,     # INCONCLUSIVE above this excluded-weight fraction
    'truncation_sensitivity': 1e-6, # Doubling R_int may change values by at most this
    'sign_slack_factor': 10.0,      # Sign checks allow -factor * h^2
    'vanishing_ratio': 0.1,         # Deficit-vanishing: last window <= ratio * first window
    'geometry_identity': 1e-10,     # Orthonormality and decomposition checks
}

# Expander shooting defaults
SOLVER_DEFAULTS = {
    'tol': 1e-4,                    # Node-wise |H + <x,nu>| after sampling
    'r_max': 10.0,
    'grid_step': 0.05,              # Initial sampling step, halved on refinement
    'max_refinements': 6,
    'r_start': 1e-4,                # Series start away from the axis
    'rtol': 1e-11,
    'atol': 1e-12,
    'method': 'DOP853',
    'slope_blowup': 1e6,            # |u_r| treated as blowup
}

# Run output
OUTPUT_CONFIG = {
    'schema_version': 1,
    'float_format': '%.17g',
    'partial_suffix': '.partial',
    'snapshot_dir': 'snapshots',
    'series_dir': 'series',
    'plot_dir': 'plots',
    'report_name': 'report.json',
    'log_name': 'steps.jsonl',
    'config_echo_name': 'config.normalized.cfg',
}
