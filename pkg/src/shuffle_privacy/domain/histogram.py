"""Domain model for the shuffler's output view."""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class Histogram:
    """Multiset of messages stored as per-symbol counts."""

    counts: Mapping[int, int] = field(default_factory=lambda: dict[int, int]())

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def weighted_sum(self) -> int:
        """Sum of all messages, i.e. sum of symbol * count."""
        return sum(symbol * count for symbol, count in self.counts.items())

    def count(self, symbol: int) -> int:
        return self.counts.get(symbol, 0)

    def as_array(self, symbols: Iterable[int]) -> NDArray[np.int64]:
        return np.array([self.count(symbol) for symbol in symbols], dtype=np.int64)

    @classmethod
    def from_messages(cls, messages: Iterable[int] | NDArray[np.int64]) -> Histogram:
        values = np.asarray(list(messages) if not isinstance(messages, np.ndarray) else messages)
        if values.size == 0:
            return cls(counts={})
        if not np.issubdtype(values.dtype, np.integer):
            raise ValueError("Histogram messages must be integer symbols.")
        symbols, counts = np.unique(values, return_counts=True)
        return cls(
            counts={int(symbol): int(count) for symbol, count in zip(symbols, counts, strict=True)}
        )
