"""Default tolerances and limits.

Math modules take these as keyword defaults; the CLI exposes overrides for
the user-facing ones.
"""

# Root finding: absolute width of the final bisection bracket in h.
ROOT_TOL = 1e-12

# Fixed-point residual threshold, measured on max-normalized vectors.
RESIDUAL_TOL = 1e-9

# Power iteration: relative change between successive Rayleigh-quotient
# estimates, residual threshold, and iteration cap.
POWER_RQ_TOL = 1e-14
POWER_RESIDUAL_TOL = 1e-12
POWER_MAX_ITER = 10**6

# Dense matrices below this edge count, sparse from it upward.
DENSE_EDGE_LIMIT = 64

# Path-count oracle: default radius in integer grid units, number of fit
# points, and the refusal cap on DP grid cells.
ORACLE_R_MAX_GRID = 30
ORACLE_FIT_POINTS = 12
ORACLE_CELL_CAP = 10**9

# Random-metric minimality checks.
SAMPLE_COUNT = 200
SAMPLE_SEED = 0

# Covering inequality: gap below which the equality characterization is
# tested, and the relative spread allowed when recovering the scale factor.
EQUALITY_GAP_TOL = 1e-6
PROPORTIONALITY_TOL = 1e-6
