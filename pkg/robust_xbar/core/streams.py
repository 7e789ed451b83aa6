"""
Counter-based random streams.

A stream is identified by a master seed plus integer tags; within a stream,
index ``i`` selects a Philox generator whose counter starts at ``i << 128``,
so stream ``i`` can be regenerated on its own without replaying 0..i-1.
"""

from typing import Tuple

import numpy as np

from robust_xbar.core.errors import InvalidInputError

# Stream tags, one per consumer; changing them changes every published number.
TAG_FACTORS = 1
TAG_PHASE1 = 2
TAG_RUN_LENGTH = 3
TAG_PHASE2 = 4
TAG_FIXED_LIMITS = 5

_COUNTER_SHIFT = 128


class StreamFactory:
    """Hands out independent generators for (master_seed, tags, index)."""

    def __init__(self, master_seed: int, *tags: int):
        """
        Initialize the factory.

        Args:
            master_seed: Non-negative seed of the whole study
            *tags: Non-negative integers naming the consumer of the stream

        Raises:
            InvalidInputError: If the seed or a tag is negative
        """
        if master_seed < 0 or any(t < 0 for t in tags):
            raise InvalidInputError("seeds and stream tags must be non-negative")
        self.master_seed = int(master_seed)
        self.tags: Tuple[int, ...] = tuple(int(t) for t in tags)
        sequence = np.random.SeedSequence(self.master_seed, spawn_key=self.tags)
        self._key = sequence.generate_state(2, dtype=np.uint64)

    def generator(self, index: int) -> np.random.Generator:
        """
        Get the generator of one replication (or block).

        Args:
            index: Non-negative replication or block index

        Returns:
            A fresh numpy Generator positioned at the start of its stream
        """
        if index < 0:
            raise InvalidInputError(f"stream index must be non-negative, got {index}")
        bit_generator = np.random.Philox(key=self._key, counter=int(index) << _COUNTER_SHIFT)
        return np.random.Generator(bit_generator)

    def __repr__(self) -> str:
        return f"StreamFactory(master_seed={self.master_seed}, tags={self.tags})"


def block_bounds(total: int, block_size: int) -> Tuple[Tuple[int, int], ...]:
    """
    Split ``range(total)`` into fixed-size half-open blocks.

    The partition depends only on ``total`` and ``block_size``, never on how
    many workers consume it.
    """
    if block_size < 1:
        raise InvalidInputError(f"block size must be positive, got {block_size}")
    return tuple(
        (start, min(start + block_size, total)) for start in range(0, total, block_size)
    )
