"""
Persian Carpet Constants

Every tunable numeric default of the package lives here, grouped by the
module that consumes it. Values are fixed so that results (and rendered
images) are reproducible byte for byte; callers override them through
function arguments or the CLI, never by editing this file at runtime.
"""

import math

# =============================================================================
# RIEMANN SPHERE
# =============================================================================
# A point with |z| above the switch threshold is stored in the inverted
# chart w = 1/z. Both charts then stay well-conditioned.

CHART_SWITCH = 1e8

# 0/0 detection: both numerator and denominator below this fraction of
# their coefficient scale at the evaluation point.
DEGENERATE_TOL = 1e-13


# =============================================================================
# ROOT FINDING (simultaneous iteration)
# =============================================================================

ROOT_MAX_ITER = 500               # Iteration cap for the all-roots method
ROOT_STEP_TOL = 1e-14             # Converged when |step| < tol·(1+|root|)
ROOT_RESIDUAL_TOL = 1e-12         # Polish target, relative to max|coeff|·(1+|r|)^deg
ROOT_POLISH_STEPS = 8             # Newton refinements per root
ROOT_INIT_ANGLE = 0.4             # Offset of the initial circle (radians)
CLUSTER_TOL = 1e-7                # Roots closer than this merge into a multiple root
COMMON_ROOT_TOL = 1e-9            # Numerator/denominator roots closer than this are shared
COEFF_TRIM_TOL = 1e-14            # Relative size below which a leading coefficient is dropped


# =============================================================================
# SPECTRAL (weighted dynamical trees)
# =============================================================================
# Power iteration runs on M + sI. A shift of order one makes the iteration
# converge on cyclic matrices whose peripheral spectrum is a rotation group.

POWER_SHIFT = 1.0
POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000
UNOBSTRUCTED_TOL = 1e-9           # Numeric guard for trees without a closed form


# =============================================================================
# HURWITZ
# =============================================================================

HURWITZ_MAX_DEGREE = 7


# =============================================================================
# FAMILY
# =============================================================================

LADDER_K = 20.0                   # Order-of-magnitude constant of the ladder checks
LADDER_SAMPLES = 256              # Boundary sample count per region
LADDER_MAX_LAMBDA = 1e-2
VALID_LAMBDA_RADIUS = 0.1         # Outside this |λ| the map is built but unverified
LAMBDA_DEGENERACY_TOL = 1e-12     # |factor| below this counts as vanishing
PCF_MAX_PERIOD = 8
PCF_CLUSTER_TOL = 1e-8
PCF_PERIOD_TOL = 1e-10


# =============================================================================
# SYMBOLIC
# =============================================================================

ALPHABET_SIZE = 4
ALLOWED_PAIRS = frozenset({(0, 1), (1, 2), (2, 0), (2, 3), (3, 0), (3, 1)})
ALPHA_PERIOD = (0, 1, 2)          # Words ending in a rotation of this collapse
MAX_WORD_LENGTH = 30
INTERVAL_SPACING = 4.0            # I_i = [4i, 4i+1]
SUBINTERVAL_LENGTH = 1.0 / 3.0


# =============================================================================
# MODULI
# =============================================================================

GROTZSCH_C = 1.0                  # Inverse Grötzsch constant (an input, not computed)
LEVEL_MARGIN = 1.1                # Modulus of the annulus between β₀ and β₃⁺
ANNULUS_SAMPLES = 720
ANNULUS_R = math.exp(math.pi)     # Outer/inner scale of the annulus-disk lemma


# =============================================================================
# RENDER
# =============================================================================

TILE_SIZE = 64
TRAP_RADIUS = 1e-3                # Chordal radius of the trap balls
TRAP_FRACTION = 0.4               # Default trap is at most this share of the cycle spacing
ZERO_NUDGE = 1e-3                 # λ samples closer to 0 than this share of a pixel are moved off it
MAX_ITER = 500
PERIODIC_TOL = 1e-12              # Chordal return distance for periodic detection
PERIODIC_MAX_PERIOD = 8
TIME_BRIGHTNESS_STEP = 8
TIME_BRIGHTNESS_CAP = 191
WORKERS_ENV = "PERSIAN_CARPET_WORKERS"

# Pixel classification codes (basin indices are 0..p-1).
UNDECIDED = -1
DEGENERATE = -2

REPRODUCE_PX = 1024
