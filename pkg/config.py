import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

ARTIFACT_VERSION = "0.3.0"

# Worker pool cap for every parallel sweep
HYPLAB_THREADS = int(os.getenv("HYPLAB_THREADS", "4"))

LOG_LEVEL = os.getenv("HYPLAB_LOG_LEVEL", "INFO")
OUTPUT_DIR = Path(os.getenv("HYPLAB_OUTPUT_DIR", "output"))

DENSITY_HORIZON = int(os.getenv("HYPLAB_DENSITY_HORIZON", str(10**6)))
PAIR_HORIZON = int(os.getenv("HYPLAB_PAIR_HORIZON", str(10**4)))

# Above this horizon sets are never materialized as boolean masks
DENSE_ARRAY_LIMIT = int(os.getenv("HYPLAB_DENSE_ARRAY_LIMIT", str(5 * 10**7)))
# Above this horizon non-constant weight profiles are summed in floating point
EXACT_SUM_LIMIT = int(os.getenv("HYPLAB_EXACT_SUM_LIMIT", "20000"))
MAX_VARPI_BITS = int(os.getenv("HYPLAB_MAX_VARPI_BITS", str(2**20)))
