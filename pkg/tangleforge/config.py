import os

from tangleforge.errors import ConfigError

SEED_ENV_VAR = "TANGLEFORGE_SEED"
CERTIFICATE_VERSION = "1"

# exhaustive search bounds (vertex counts)
TREEWIDTH_BOUND = 16
ROBUST_EXHAUSTIVE_BOUND = 16
BRAMBLE_SEARCH_BOUND = 6
EXCLUSIVE_STAR_BOUND = 7
TREE_OF_TANGLES_BOUND = 9
NESTED_SET_BOUND = 16
CHAIN_COLUMN_BOUND = 4

DEFAULT_TANGLE_LIMIT = 16
DEFAULT_ROBUST_BUDGET = 20000
DEFAULT_SEPARABILITY_BUDGET = 500
DEFAULT_JOBS = 1


def reject_seed_env(environ=None):
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR) is not None:
        raise ConfigError(f"{SEED_ENV_VAR} is set, but nothing in tangleforge is randomized")
