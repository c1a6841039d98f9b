"""Counter-based, splittable random streams.

Every random quantity in the package is drawn from a generator derived from a
master seed plus an integer key path, e.g. ``child_rng(seed, STREAM, rep)``.
The Philox bit generator is counter based, and ``SeedSequence`` hashes the key
path, so replicate ``r`` sees the same numbers regardless of which worker runs
it or in what order.
"""

from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1

# stream tags keep independent consumers of one master seed apart
STREAM_DESIGN = 1
STREAM_NOISE = 2
STREAM_SIGNAL = 3
STREAM_RANDOMIZATION = 4
STREAM_CHECK = 5


def _validate_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def derive(seed: int, *key: int) -> np.random.SeedSequence:
    """Child seed sequence for ``key`` under master ``seed``."""
    return np.random.SeedSequence(_validate_seed(seed), spawn_key=tuple(int(k) for k in key))


def child_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(derive(seed, *key)))


def derive_int(seed: int, *key: int) -> int:
    """A 64-bit integer child seed, for APIs that take a plain seed."""
    lo, hi = derive(seed, *key).generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)
