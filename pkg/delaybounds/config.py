import os

LOG_LEVEL = os.getenv("DELAYBOUNDS_LOG_LEVEL", "INFO")

# Seed override for scenario runs (the --seed flag still wins)
SEED_OVERRIDE = os.getenv("DELAYBOUNDS_SEED")

# Tolerances
TOL_ORTH = float(os.getenv("DELAYBOUNDS_TOL_ORTH", "1e-10"))
TOL_SOUNDNESS = float(os.getenv("DELAYBOUNDS_TOL_SOUNDNESS", "1e-9"))
TOL_EQUALITY = float(os.getenv("DELAYBOUNDS_TOL_EQUALITY", "1e-8"))
TOL_PSD = float(os.getenv("DELAYBOUNDS_TOL_PSD", "1e-8"))
TOL_IDENTITY = float(os.getenv("DELAYBOUNDS_TOL_IDENTITY", "1e-12"))
TOL_SPAN = float(os.getenv("DELAYBOUNDS_TOL_SPAN", "1e-10"))

ALPHA_MIN = float(os.getenv("DELAYBOUNDS_ALPHA_MIN", "1e-6"))
MAX_DEGREE = int(os.getenv("DELAYBOUNDS_MAX_DEGREE", "12"))

# Counterexample search
SWEEP_SIZE = int(os.getenv("DELAYBOUNDS_SWEEP_SIZE", "50"))
SEARCH_BUDGET = int(os.getenv("DELAYBOUNDS_BUDGET", "10000"))

WORKERS = int(os.getenv("DELAYBOUNDS_WORKERS", "1"))
OUTPUT_DIR = os.getenv("DELAYBOUNDS_OUTPUT_DIR", "./reports")
