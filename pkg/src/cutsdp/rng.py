"""Seeded randomness shared by all stochastic components.

Every random draw in the package goes through :func:`derive_rng`, which maps
(master seed, purpose tag, index) to an independent PCG64 stream.  Reruns with
the same master seed are therefore bit-reproducible, and parallel workers can
derive their own streams without coordinating.
"""

from zlib import crc32

import numpy as np


def derive_rng(master_seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Independent generator for stream (master_seed, tag, index).

    The tag separates purposes ("er", "separation", ...), the index separates
    parallel runs within one purpose.
    """
    if master_seed < 0:
        raise ValueError("master seed must be a non-negative integer")
    key = (crc32(tag.encode("ascii")), int(index))
    seq = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(seq))
