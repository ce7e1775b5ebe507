"""Solver configuration and constants"""
import os

# Runtime Configuration
OUTPUT_DIR = os.getenv("PHI_OUTPUT_DIR", "output")
VERBOSE = os.getenv("PHI_VERBOSE", "").lower() in ("1", "true", "yes")

# Parameter Domain
PARAM_FLOOR = 1e-6  # 1+delta and 1+gamma must stay above this

# Grid Configuration
DEFAULT_GRID_POINTS = int(os.getenv("PHI_GRID_POINTS", "2001"))
MIN_SOLVER_GRID_POINTS = 201
SPACING_RTOL = 1e-12

# Picard Configuration
DEFAULT_TOL = float(os.getenv("PHI_TOL", "1e-10"))
DEFAULT_MAX_ITERATIONS = 200
DEFAULT_TAIL_EPSILON = 1e-16
X_MAX_FLOOR = 5.0

# Shooting Configuration
DEFAULT_STEP_COUNT = 20000
SLOPE_BRACKET_HI_START = 2.0
BOUNDARY_TOL = 1e-12
MAX_BRACKET_DOUBLINGS = 60
MAX_BISECTIONS = 200
ESCAPE_BAND = (-0.1, 1.5)
SINGULARITY_FLOOR = 1e-12

# Region Configuration
BOUNDARY_SEARCH_CAP = 10.0
BOUNDARY_SCAN_POINTS = 2001
BOUNDARY_TOL_DEFAULT = 1e-10
REGION_DEFAULT_RANGE = (-0.9, 1.0)
REGION_DEFAULT_RESOLUTION = 200

# Stefan Configuration
STEFAN_MAX_SWEEPS = 100
STEFAN_DAMPING = 0.5
STEFAN_MAX_DAMPINGS = 30
STEFAN_DEFAULT_TOL = 1e-9

# Verification Thresholds
BOUNDS_TOL = 1e-8
CONCAVITY_TOL = 1e-6
CROSS_METHOD_TOL = 1e-6
FIXED_POINT_TOL = 2e-10
RESIDUAL_EDGE_POINTS = 3

# Output Configuration
CSV_DIGITS = 17
SIDECAR_SUFFIX = ".meta.json"

# Exit Codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_HEURISTIC = 2
