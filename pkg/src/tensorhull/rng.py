"""Reproducible random streams.

Every stochastic routine draws from a Philox (counter-based) generator keyed
by ``(seed, tag, index)``, so a Monte-Carlo repetition or an epsilon-grid task
can be recomputed in isolation and in any order.
"""

import zlib

import numpy as np


def substream(seed, tag, index=0):
    """Return a generator for task ``index`` of operation ``tag``."""
    tag_key = zlib.crc32(str(tag).encode("utf-8"))
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(tag_key, int(index)))
    return np.random.Generator(np.random.Philox(ss))
