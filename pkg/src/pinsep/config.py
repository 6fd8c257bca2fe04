"""Size thresholds, overridable through the environment."""

from __future__ import annotations

import os

DEFAULT_MAX_DIM = 100_000
# dim_k Hom_A(C, M) above which Diff/End computations refuse to run
MAX_HOM_DIM = 10_000
# theorem-A conditions that need Diff/End are evaluated up to this dim_k C
THEOREM_A_MAX_DIM = 30
# chain and Kaehler computations
CHAIN_MAX_DIM = 1000
# exhaustive subalgebra enumeration
ENUMERATION_MAX_DIM = 8
# above this dim_k C the correspondence check avoids forming End_A(C)
JB_DENSE_MAX_DIM = 30
# above this dim_k C the Galois battery works in coordinates of a free basis
GALOIS_DENSE_MAX_DIM = 30


def max_dim(override: int | None = None) -> int:
    """Return the algebra dimension cap (argument, then PINSEP_MAX_DIM, then default)."""
    if override is not None:
        return int(override)
    env = os.environ.get("PINSEP_MAX_DIM")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_MAX_DIM
