import numpy as np

PI = np.pi

DEFAULT_ALPHA = 0.1
DEFAULT_SPLIT_RATIO = 0.5
DEFAULT_SEED = 0

# ceil() guard against products such as 10 * (1 - 0.1) = 9.000000000000002
RANK_TOLERANCE = 1e-10

DEFAULT_GRID_POINTS = 200

CD_TOLERANCE = 1e-8
CD_MAX_SWEEPS = 100_000

MAD_FLOOR_FRACTION = 1e-6

DEFAULT_CV_FOLDS = 10
DEFAULT_LASSO_GRID_SIZE = 20
LASSO_GRID_RATIO = 1e-3

WILCOXON_EXACT_MAX = 50

SETTING_C_CURRENT_WEIGHT = 0.4
SETTING_C_LAG_WEIGHT = 0.2
SETTING_C_MAX_LAG = 3
SKEW_NORMAL_SHAPE = 5.0
T_NOISE_DF = 2
SETTING_B_BASIS_PER_COORDINATE = 3
REFERENCE_DRAWS = 100_000
SUPER_ORACLE_DRAWS = 1_000_000

SINE_HOMO_SCALE = PI ** 2 / 20

CONDITIONAL_COVERAGE_BINS = 10
