"""Order-fixed reduction of per-block moments."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, List, Sequence, Union

import numpy as np

Number = Union[float, np.ndarray]


@dataclass(frozen=True)
class BlockMoments:
    """
    Count, mean and sum of squared deviations of one block of draws.

    ``mean`` and ``m2`` may be arrays, in which case every column is reduced
    independently with the same count.
    """

    count: int
    mean: Number
    m2: Number

    @classmethod
    def of(cls, draws: np.ndarray) -> "BlockMoments":
        """Moments of ``draws`` along axis 0."""
        draws = np.asarray(draws, dtype=float)
        center = np.mean(draws, axis=0)
        return cls(count=int(draws.shape[0]), mean=center, m2=np.sum((draws - center) ** 2, axis=0))

    def merge(self, other: "BlockMoments") -> "BlockMoments":
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / total)
        m2 = self.m2 + other.m2 + delta * delta * (self.count * other.count / total)
        return BlockMoments(count=total, mean=mean, m2=m2)

    def variance(self, ddof: int = 1) -> Number:
        if self.count - ddof <= 0:
            return self.m2 * 0.0
        return self.m2 / (self.count - ddof)


def pairwise_merge(blocks: Sequence[BlockMoments]) -> BlockMoments:
    """
    Merge blocks in a fixed balanced tree over their order.

    The result depends only on the sequence of blocks, never on which worker
    produced them.
    """
    if not blocks:
        raise ValueError("nothing to merge")
    if len(blocks) == 1:
        return blocks[0]
    middle = len(blocks) // 2
    return pairwise_merge(blocks[:middle]).merge(pairwise_merge(blocks[middle:]))


def map_ordered(func: Callable[[Any], Any], items: Sequence[Any], workers: int = 1) -> List[Any]:
    """
    Apply ``func`` to every item, in a thread pool when ``workers > 1``.

    Results come back in item order whatever the completion order.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
