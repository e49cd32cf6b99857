MEMBERSHIP_TOL = 1e-12
WITNESS_TOL = 1e-9
ONE_TOL = 1e-6  # "nu equals one" on continuous spaces
REGIME_TOL = 1e-3
MLE_SET_TOL = 1e-9
MLE_DEDUP_RESOLUTION = 1e-6

LOGLIK_CAP = 700.0  # exp(700) is close to the double overflow threshold
PENALTY_WEIGHT = 1e6
INFEASIBLE_OBJECTIVE = 1e300

BRACKET_MAX_EXPANSIONS = 64
BRACKET_DECREASES = 3
BISECTION_ITERATIONS = 80
GOLDEN_MAX_ITERATIONS = 200
REPAIR_MAX_ITERATIONS = 50
SIMPLEX_MAX_ITERATIONS = 4000

DEFAULT_REL_TOL = 1e-8
DEFAULT_GRID = {1: 512, 2: 96}
DEFAULT_REFINE_ROUNDS = 4
DEFAULT_MULTISTARTS = 16
DEFAULT_SEED = 0

A_STAR = 0.01
B_STAR = 0.01

QUAD_REL_TOL = 1e-6
PRIOR_NORMALIZATION_TOL = 1e-6
QUAD_SCAN_POINTS = 256
QUAD_ABS_TOL = 1e-14
QUAD_LIMIT = 200
QUAD_FAIL_REL = 1e-4  # give up on estimates worse than this
BOUND_TOL = 1e-9
PROBE_POINTS = 33
