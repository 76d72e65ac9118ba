"""Seed handling.

Every random quantity in the package is drawn from a numpy ``PCG64`` bit
generator seeded with an unsigned 64-bit integer. Per-trial and per-stream
seeds are derived from a base seed with :func:`mix_seed`, a chained
SplitMix64 finalizer, so they do not depend on how trials are scheduled.
Both algorithms are platform independent.
"""

import numpy as np

MASK64 = (1 << 64) - 1

# stream tags, fed to mix_seed alongside base seed and trial index
TAG_MASK = 0x6D61736B
TAG_MASK1 = 0x6D61736B31
TAG_MASK2 = 0x6D61736B32
TAG_EXPLORE = 0x65787072
TAG_START = 0x73746172
TAG_GW = 0x6777


def splitmix64(x):
    """One SplitMix64 step: advance by the golden gamma and finalize."""
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(*parts):
    """Hash any number of integers into one 64-bit seed."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h


def make_rng(seed):
    seed = int(seed)
    if seed < 0 or seed > MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))
