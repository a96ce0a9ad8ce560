"""
Default settings for hdct.

Every tunable of the library lives here as a module-level constant. Don't
edit this file to change behaviour locally; put the handful of values you
actually want to change in `hdct/conf/local_settings.py` instead, which
`hdct/conf/settings.py` imports on top of these defaults.

"""

import os

######################################################################
# Numerical tolerances
######################################################################

# Compositions: rows must sum to one within this absolute tolerance.
ROW_SUM_TOL = 1e-9
# CLR rows must sum to zero within CLR_ROW_SUM_TOL * p.
CLR_ROW_SUM_TOL = 1e-8
# A CLR column whose variance estimate is at or below this is degenerate.
DEGENERATE_VARIANCE_TOL = 1e-14
# mu0 passed to the one-sample tests must already be centered (sum to zero).
MU0_CENTER_TOL = 1e-8
# Eigenvalues below -PSD_TOL * ||sigma|| make a covariance not PSD.
PSD_TOL = 1e-10
# Relative asymmetry accepted for "symmetric" input matrices.
SYMMETRY_TOL = 1e-10

######################################################################
# Test defaults
######################################################################

DEFAULT_ALPHA = 0.05
# Smallest sample sizes the sum statistics are defined for.
MIN_SAMPLES = 5
MIN_GROUP_SAMPLES = 2
# Covariance divisor: False follows n (one-sample) and n1 + n2 (pooled).
UNBIASED_COV = False
# Trace of the squared sample correlation: "auto", "gram" or "naive".
TRACE_PATH = "auto"

######################################################################
# Data generation
######################################################################

DEFAULT_ENERGY = 0.5
DEFAULT_PSEUDOCOUNT = 0.0

# B1: sigma_ij = B1_RHO ** |i - j|
B1_RHO = 0.5
# B2: variances ~ U(B2_VAR_RANGE), first [p ** B2_SPIKE_EXPONENT] loadings ~ U(B2_LOADING_RANGE)
B2_VAR_RANGE = (1.0, 2.0)
B2_LOADING_RANGE = (0.7, 0.9)
B2_SPIKE_EXPONENT = 0.3
# B3: gamma gamma^T + (I - rho W)^-1 (I - rho W^T)^-1 with a rook-form W
B3_RHO_EPS = 0.5
B3_DELTA_GAMMA = 0.3
B3_LOADING_RANGE = (0.7, 0.9)

# A3: A3_WEIGHT * N(0, A3_WIDE_VAR) + (1 - A3_WEIGHT) * N(0, 1)
A3_WEIGHT = 0.1
A3_WIDE_VAR = 9.0

######################################################################
# Runtime
######################################################################

LOG_LEVEL = os.environ.get("HDCT_LOG_LEVEL", "WARNING")
# Worker threads for the Monte-Carlo engine; an integer or "auto".
THREADS = os.environ.get("HDCT_THREADS", "auto")
