"""Counter-based random streams keyed by (seed, *indices).

Each stream is an independent Philox generator derived through
:class:`numpy.random.SeedSequence` with the indices as spawn key, so a block
of work draws the same numbers no matter which thread or in which order it
runs.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

__all__ = ["BLOCK_SIZE", "keyed_stream", "blocks"]

BLOCK_SIZE = 1 << 16


def keyed_stream(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def blocks(n: int, block_size: int = BLOCK_SIZE) -> Iterator[tuple[int, int]]:
    """Yield ``(block_index, size)`` covering ``n`` items in fixed-size blocks."""
    for i, start in enumerate(range(0, n, block_size)):
        yield i, min(block_size, n - start)
