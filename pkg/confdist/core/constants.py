"""
All default limits, bounds and exit codes.
"""

# Saturation
DEFAULT_RELAXATION_CAP = 1_000_000  # relaxations of a single transition before giving up
TROPICAL_CEILING = 2 ** 62  # costs at or above this saturate to +inf

# Brute-force oracle
ORACLE_BOUND_STEP = 2
ORACLE_BOUND_CEILING = 16
ORACLE_RELAXATION_CAP = 100_000

# Sparse block precomputation (number of module sequences)
BLOCK_BUDGET = 200_000

# Benchmark harness
DEFAULT_BENCH_SIZES = (10, 20, 40, 80)
BENCH_REPETITIONS = 3
BENCH_CSV_COLUMNS = ("n", "confdist_seconds", "wpds_seconds", "speedup", "confdist_ops", "wpds_ops")

# Settings file read by load_config when --config is not given
CONFIG_FILE = "data/confdist.json"

# Console log buffer
MAX_LOGS = 500

# CLI exit statuses
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_DIAGNOSTIC = 3
