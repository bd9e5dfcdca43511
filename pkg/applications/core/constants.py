"""Default parameter sets, numerical floors and exit codes.

Physical defaults are not published anywhere for this plant; they are a
consistent small-turbine set (provenance: invented, plumbing only). The
drag polynomial coefficients are the published ones.
"""

import math

PARAMETER_PROVENANCE = 'invented (plumbing only)'

DEFAULT_AERO = {
    'rho': 1.25,
    'rp': 2.0,
    'dr': 5.0,
    'fr': 2.0,
    'lever': 1.5,
    't_beta': 0.5,
}

DEFAULT_DRAG_POLYNOMIAL = {
    'a0': 0.25382,
    'a1': -0.1369,
    'a2': 0.04345,
    'a3': -0.00263,
    'b0': -0.008608,
    'b1': 0.0063,
    'b2': -0.0015,
    'b3': 0.000118,
}

# Widely used exponential Cp surface, pitch expressed in degrees inside the formula.
DEFAULT_POWER_COEFFICIENT = {
    'c1': 0.5176,
    'c2': 116.0,
    'c3': 0.4,
    'c4': 5.0,
    'c5': 21.0,
    'c6': 0.0068,
}
BETZ_LIMIT = 16.0 / 27.0

DEFAULT_MACHINE = {
    'rs': 0.1,
    'phi_f': 0.3,
    'p': 4,
    'ld': 8.0e-3,
    'lq': 10.0e-3,
    'l0': 2.0e-3,
    'j': 0.5,
    'fv': 0.01,
}

DEFAULT_WIND_SPEED = 8.0
DEFAULT_BETA_REF = 0.05

DEFAULT_GAINS = {
    'k_psi': 15.0,
    'k_omega1': 20.0,
    'k_id1': 500.0,
    'k_ih1': 500.0,
    'k_omega2': 20.0,
    'k_id2': 500.0,
    'k_ih2': 500.0,
    'delta': 1.5,
    'eps': (10.0, 100.0, 10.0, 10.0, 100.0, 10.0, 10.0),
    # Surfaces with every pole at -5.
    'psi_surface': (25.0, 10.0),
    'omega_surface': (5.0,),
    'robust_gain': 5.0,
}

DEFAULT_FAULT_ONSET = 7.0
DEFAULT_DT = 1.0e-4
DEFAULT_HORIZON = 10.0
DT_FIDELITY_LIMIT = 1.0e-3

ORIENTATION_FLOOR = 1.0e-3
TIP_SPEED_FLOOR = 1.0e-3
INDUCTANCE_CONDITION_LIMIT = 1.0e10
DECOUPLING_CONDITION_LIMIT = 1.0e8

DIVERGENCE_FACTOR = 10.0
CURRENT_LIMIT_FLOOR = 100.0
OMEGA_REFERENCE_FLOOR = 1.0

DEFAULT_TURBULENCE = {
    'intensity': 0.1,
    'components': 16,
    'f_min': 0.02,
    'f_max': 0.5,
    'seed': 0,
}

DEFAULT_SETTLE_TIME = 2.0
DEFAULT_THRESHOLDS = {
    'psi_error': 0.01,
    'omega_error': 0.01,
    'id_max': 0.05,
    'ih_max': 0.05,
    'phase_sum_ratio': 0.01,
}

TWO_PI_OVER_THREE = 2.0 * math.pi / 3.0
SQRT_TWO_THIRDS = math.sqrt(2.0 / 3.0)
SQRT_ONE_THIRD = math.sqrt(1.0 / 3.0)
SQRT_THREE_HALVES = math.sqrt(1.5)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_DIVERGED = 3
EXIT_SINGULAR = 4
