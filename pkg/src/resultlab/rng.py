"""Counter-based random streams.

A stream is a Philox generator whose 128-bit key is ``(seed, trial_index)``;
the Philox counter plays the role of the draw index.  Streams for different
trials never overlap and do not depend on execution order.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1


def stream(seed: int, trial: int = 0, lane: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, trial)``.

    ``lane`` selects a disjoint region of the counter space, for when one trial
    needs several logically separate sequences.
    """
    if seed < 0 or trial < 0 or lane < 0:
        raise ValueError("seed, trial and lane must be non-negative")
    key = (int(seed) & MASK64) | ((int(trial) & MASK64) << 64)
    counter = np.array([0, 0, 0, int(lane) & MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
