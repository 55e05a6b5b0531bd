PROB_TOL = 1e-12  # absolute tolerance for probability comparisons
CONFIG_STOCHASTIC_TOL = 1e-9  # column sums accepted on config load
FEASIBILITY_TOL = 1e-7  # LP residual at or below this counts as feasible
PIVOT_TOL = 1e-12
LP_MAX_PIVOTS = 50_000

FW_MAX_ITERATIONS = 5000
FW_GAP_TOL = 1e-6  # bits
FW_SMOOTHING = 1e-12
LINE_SEARCH_STEPS = 60

BA_TOL = 1e-12
BA_MAX_ITERATIONS = 10_000

DEFAULT_RESTARTS = 64
DEFAULT_INITIAL_STEP = 0.25
DEFAULT_MIN_STEP = 1e-4
DEFAULT_MAX_ROUNDS = 200

CODEBOOK_MAX_ATTEMPTS = 1000
MAX_CODEWORDS = 2**20
DECODE_CHUNK = 4096
CONFIDENCE_Z = 1.96

DEFAULT_SUITE_TRIALS = 2000
DEFAULT_SUITE_SEED = 20240601

LOG_LEVEL_ENV = "MACAUTH_LOG_LEVEL"
SILENCE = "silence"
