"""Deterministic, splittable random streams.

Every stochastic component draws from a named sub-stream derived from the
master seed, so experiments are reproducible and order-independent: the
paths of realization r do not depend on which algorithms ran before.
"""

import hashlib

import numpy as np


def _key_to_ints(key) -> list[int]:
    if isinstance(key, (int, np.integer)):
        return [int(key) & 0xFFFFFFFF]
    digest = hashlib.sha256(str(key).encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def seed_sequence(master_seed: int, *keys) -> np.random.SeedSequence:
    """SeedSequence for the sub-stream named by (master_seed, *keys)."""
    entropy = [int(master_seed)]
    for key in keys:
        entropy.extend(_key_to_ints(key))
    return np.random.SeedSequence(entropy)


def substream(master_seed: int, *keys) -> np.random.Generator:
    """Independent generator for the sub-stream named by (master_seed, *keys)."""
    return np.random.default_rng(seed_sequence(master_seed, *keys))


def realization_seed(master_seed: int, realization: int) -> int:
    """64-bit tag identifying one realization's stream; pairwise distinct w.h.p."""
    state = seed_sequence(master_seed, "realization", realization).generate_state(2)
    return int(state[0]) << 32 | int(state[1])
