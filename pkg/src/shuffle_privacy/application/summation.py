"""Single-message summation: parameter choice, debiasing analyzer and MSE bound."""

from __future__ import annotations

import logging
import math

from shuffle_privacy.application.errors import (
    InfeasibleParametersError,
    InputDomainError,
    PreconditionError,
)
from shuffle_privacy.application.histogram import krr_epsilon0_from_gamma
from shuffle_privacy.domain.histogram import Histogram
from shuffle_privacy.domain.summation import SummationParams

LOGGER = logging.getLogger(__name__)

DELTA_TERM = 14.0
EPSILON_TERM = 27.0


def histogram_gamma(k: int, n: int, epsilon: float, delta: float) -> float:
    """Blanket weight making shuffled k-RR (epsilon, delta)-DP.

    A value >= 1 means no blanket weight satisfies the hypothesis for these n and budget.
    """
    _check_budget(epsilon, delta, n)
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}.")
    return max(
        DELTA_TERM * k * math.log(2.0 / delta) / ((n - 1) * epsilon**2),
        EPSILON_TERM * k / ((n - 1) * epsilon),
    )


def blanket_mass(epsilon: float, delta: float) -> float:
    """c = max(14 ln(2/delta) / eps^2, 27 / eps)."""
    return max(DELTA_TERM * math.log(2.0 / delta) / epsilon**2, EPSILON_TERM / epsilon)


def choose_parameters(epsilon: float, delta: float, n: int) -> SummationParams:
    _check_budget(epsilon, delta, n)
    c = blanket_mass(epsilon, delta)
    k = math.ceil((n / c) ** (1.0 / 3.0))
    gamma = c * (k + 1) / n
    if gamma >= 1:
        raise InfeasibleParametersError(
            f"n={n} is too small for epsilon={epsilon}, delta={delta}: "
            f"gamma = c(k+1)/n = {gamma:.6g} >= 1.",
            reason="gamma >= 1",
        )
    params = SummationParams(c=c, k=k, n=n)
    LOGGER.debug(
        "event=summation_parameters_chosen n=%s c=%.17g k=%s gamma=%.17g",
        n,
        params.c,
        params.k,
        params.gamma,
    )
    return params


def analyze(messages: Histogram, params: SummationParams) -> float:
    """Debiased estimate of the sum of all inputs; not clipped to [0, n]."""
    if messages.total != params.n:
        raise InputDomainError(
            f"Histogram holds {messages.total} messages, expected n={params.n}."
        )
    unknown = sorted(symbol for symbol in messages.counts if not 0 <= symbol <= params.k)
    if unknown:
        raise InputDomainError(f"Messages {unknown} lie outside the levels 0..{params.k}.")
    raw_sum = messages.weighted_sum() / params.k
    return (raw_sum - params.c * (params.k + 1) / 2.0) / (1.0 - params.gamma)


def theoretical_mse_bound(params: SummationParams) -> float:
    """n/(1-gamma)^2 (1/(4k^2) + c(k+1)/(2n))."""
    rounding = 1.0 / (4.0 * params.k**2)
    blanket = params.c * (params.k + 1) / (2.0 * params.n)
    return params.n / (1.0 - params.gamma) ** 2 * (rounding + blanket)


def summation_local_epsilon0(params: SummationParams) -> float:
    """Local budget of the summation randomizer, k-RR over k+1 levels; inf without a blanket."""
    if params.gamma == 0:
        return math.inf
    return krr_epsilon0_from_gamma(params.k + 1, params.gamma)


def _check_budget(epsilon: float, delta: float, n: int) -> None:
    if not 0 < epsilon <= 1:
        raise PreconditionError(f"epsilon must lie in (0, 1], got {epsilon}.")
    if not 0 < delta <= 1:
        raise PreconditionError(f"delta must lie in (0, 1], got {delta}.")
    if n < 2:
        raise PreconditionError(f"n must be >= 2, got {n}.")
