"""Counter-based seed derivation.

Every per-run or per-vertex seed in the package comes from ``splitmix64``
applied to ``base + index``, so a run can be reproduced from the master seed
and its index alone.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def run_seed(master_seed: int, run: int) -> int:
    """Seed of run ``run`` in a batch started from ``master_seed``."""
    return splitmix64((master_seed + run) & MASK64)


def uniform_from_ids(ids) -> np.ndarray:
    """Deterministic values in [-1, 1) derived from integer ids."""
    z = np.asarray(ids, dtype=np.uint64) + np.uint64(0x9E3779B97F4A7C15)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) / float(1 << 53) * 2.0 - 1.0
