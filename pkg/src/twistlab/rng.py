"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, stream index)``, so a
work item can be reproduced without replaying any other item.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "spawn"]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return the generator for stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def spawn(seed: int, count: int, offset: int = 0) -> list[np.random.Generator]:
    return [make_rng(seed, offset + i) for i in range(count)]
