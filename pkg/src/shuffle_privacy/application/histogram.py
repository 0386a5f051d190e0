"""Frequency estimation for shuffled k-ary randomized response."""

from __future__ import annotations

import math

from shuffle_privacy.application.errors import InputDomainError, PreconditionError
from shuffle_privacy.domain.histogram import Histogram


def krr_epsilon0_from_gamma(k: int, gamma: float) -> float:
    """Local budget of k-RR with blanket weight gamma, i.e. ln(k/gamma - k + 1)."""
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}.")
    if not 0 < gamma <= 1:
        raise PreconditionError(f"gamma must lie in (0, 1], got {gamma}.")
    return math.log1p(k * (1.0 / gamma - 1.0))


def estimate_frequencies(messages: Histogram, k: int, gamma: float, n: int) -> list[float]:
    """Unbiased per-symbol counts (Y(j) - gamma n / k) / (1 - gamma) for j = 1..k."""
    if not 0 <= gamma < 1:
        raise PreconditionError(f"gamma must lie in [0, 1), got {gamma}.")
    if messages.total != n:
        raise InputDomainError(f"Histogram holds {messages.total} messages, expected n={n}.")
    unknown = sorted(symbol for symbol in messages.counts if not 1 <= symbol <= k)
    if unknown:
        raise InputDomainError(f"Messages {unknown} lie outside the symbols 1..{k}.")
    blanket_share = gamma * n / k
    return [(messages.count(symbol) - blanket_share) / (1.0 - gamma) for symbol in range(1, k + 1)]
