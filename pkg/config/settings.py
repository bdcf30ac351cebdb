"""Run-wide constants for the {g,h}-derivation verifier.

Everything a run depends on is either a CLI flag or one of these constants;
nothing is read from the environment.
"""

TOOL_NAME = "gh-derivation-verifier"
TOOL_VERSION = "1.0.0"

# Frozen layout identifiers embedded in every JSON report
BASIS_ORDERING = "row-major-ij"
PACKING_LAYOUT = "fgh-column-major"

# Sampling
DEFAULT_SEED = 0
DEFAULT_TRIALS = 1000
SAMPLE_RADIUS = 3

# Algebra audits
ASSOCIATIVITY_EXHAUSTIVE_MAX_DIM = 36
ASSOCIATIVITY_SAMPLES = 10_000

# Scalars
PRIME_FIELD_LIMIT = 2 ** 31

# Dense oracle elimination budget
ORACLE_MAX_COLUMNS = 300

GOLDEN_PATH = "reports/golden_dimensions.json"

# Golden grid recorded by `record-golden`
GOLDEN_TN_SIZES = (2, 3, 4, 5)
GOLDEN_MN_SIZES = (2, 3)
GOLDEN_FIELDS = ("Q", "Fp:3", "Fp:5", "Fp:7", "Fp:101")

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
LOG_LEVEL = "WARNING"
