"""Exact enumeration for shuffled k-ary randomized response at desk scale."""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import special

from shuffle_privacy.application.amplification import (
    delta_bennett_mixture,
    delta_hoeffding_mixture,
    delta_mixture,
)
from shuffle_privacy.application.blanket import profile_krr
from shuffle_privacy.application.errors import OracleCapacityError, PreconditionError
from shuffle_privacy.application.randomizers import krr_gamma, output_pmf
from shuffle_privacy.application.settings import DEFAULT_ORACLE, OracleSettings
from shuffle_privacy.domain.oracle import OracleCell
from shuffle_privacy.domain.randomizer import KRRSpec

LOGGER = logging.getLogger(__name__)


def enumerate_shuffled_outputs_krr(
    n: int,
    k: int,
    epsilon0: float,
    *,
    differing_symbol: int,
    base_symbol: int = 1,
    settings: OracleSettings = DEFAULT_ORACLE,
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    """Every histogram of n messages with its probability.

    n - 1 parties hold base_symbol and one party holds differing_symbol.
    """
    _check_parties(n, k, settings)
    spec = KRRSpec(k=k, epsilon0=epsilon0)
    base_pmf = output_pmf(spec, base_symbol)
    differing_pmf = output_pmf(spec, differing_symbol)

    histograms = _compositions(n, k)
    probabilities = np.zeros(len(histograms))
    for symbol_index in range(k):
        if differing_pmf[symbol_index] == 0:
            continue
        rest = histograms.copy()
        rest[:, symbol_index] -= 1
        reachable = rest[:, symbol_index] >= 0
        probabilities[reachable] += differing_pmf[symbol_index] * np.exp(
            _log_multinomial_pmf(rest[reachable], n - 1, base_pmf)
        )
    return histograms, probabilities


def exact_shuffled_divergence_krr(
    n: int,
    k: int,
    epsilon0: float,
    epsilon: float,
    *,
    symbol: int = 1,
    neighbor_symbol: int = 2,
    settings: OracleSettings = DEFAULT_ORACLE,
) -> float:
    """Hockey-stick divergence D_{e^eps}(M(x) || M(x')) of shuffled k-RR.

    x = (s, ..., s) and x' = (t, s, ..., s) for s = symbol and t = neighbor_symbol.
    """
    if epsilon < 0:
        raise PreconditionError(f"epsilon must be >= 0, got {epsilon}.")
    _, first = enumerate_shuffled_outputs_krr(
        n, k, epsilon0, differing_symbol=symbol, base_symbol=symbol, settings=settings
    )
    _, second = enumerate_shuffled_outputs_krr(
        n, k, epsilon0, differing_symbol=neighbor_symbol, base_symbol=symbol, settings=settings
    )
    excess = first - math.exp(epsilon) * second
    return _clamp_unit(math.fsum(excess[excess > 0].tolist()))


def exact_clipped_expectation_krr(
    m: int,
    k: int,
    epsilon0: float,
    epsilon: float,
    *,
    settings: OracleSettings = DEFAULT_ORACLE,
) -> float:
    """E[L_1 + ... + L_m]_+ for k-RR, summed over the counts of the two differing symbols."""
    if m < 0:
        raise PreconditionError(f"m must be >= 0, got {m}.")
    if m > settings.max_blanket_samples:
        raise OracleCapacityError(
            f"Exact clipped expectation is capped at m={settings.max_blanket_samples}.",
            requested=m,
            cap=settings.max_blanket_samples,
        )
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}.")
    if m == 0:
        return 0.0
    gamma = krr_gamma(k, epsilon0)
    growth = math.exp(epsilon)
    offset = m * gamma * -math.expm1(epsilon)
    scale = (1.0 - gamma) * k

    terms: list[float] = []
    log_m_factorial = float(special.gammaln(m + 1))
    for count_x in range(m + 1):
        count_x_prime = np.arange(0, m - count_x + 1)
        others = m - count_x - count_x_prime
        total = offset + scale * (count_x - growth * count_x_prime)
        positive = total > 0
        if not np.any(positive):
            continue
        log_weight = (
            log_m_factorial
            - special.gammaln(count_x + 1)
            - special.gammaln(count_x_prime[positive] + 1)
            - special.gammaln(others[positive] + 1)
            + (count_x + count_x_prime[positive]) * math.log(1.0 / k)
            + special.xlogy(others[positive], (k - 2) / k)
        )
        terms.extend((np.exp(log_weight) * total[positive]).tolist())
    return math.fsum(terms)


def exact_mixture_delta_krr(
    n: int,
    k: int,
    epsilon0: float,
    epsilon: float,
    *,
    settings: OracleSettings = DEFAULT_ORACLE,
) -> float:
    """Mixture bound evaluated with exact clipped expectations."""
    if n > settings.max_blanket_samples:
        raise OracleCapacityError(
            f"Exact mixture is capped at n={settings.max_blanket_samples}.",
            requested=n,
            cap=settings.max_blanket_samples,
        )
    gamma = krr_gamma(k, epsilon0)
    if gamma == 0:
        raise PreconditionError("epsilon0 is too large: the blanket weight underflows to 0.")
    exact_by_m = np.array(
        [
            exact_clipped_expectation_krr(m, k, epsilon0, epsilon, settings=settings)
            for m in range(n + 1)
        ]
    )
    return delta_mixture(n, gamma, lambda ms: exact_by_m[ms])


def oracle_sweep(
    n_max: int,
    ks: Sequence[int],
    epsilon0_grid: Sequence[float],
    epsilon_fractions: Sequence[float],
    *,
    settings: OracleSettings = DEFAULT_ORACLE,
) -> list[OracleCell]:
    """Sandwich check over n = 2..n_max; eps values are fractions of each eps0."""
    if not 2 <= n_max <= settings.max_parties:
        raise OracleCapacityError(
            f"n-max must lie in 2..{settings.max_parties}, got {n_max}.",
            requested=n_max,
            cap=settings.max_parties,
        )
    cells: list[OracleCell] = []
    for n, k, epsilon0, fraction in itertools.product(
        range(2, n_max + 1), ks, epsilon0_grid, epsilon_fractions
    ):
        epsilon = fraction * epsilon0
        cell = _oracle_cell(n, k, epsilon0, epsilon, settings)
        if not cell.holds:
            LOGGER.warning(
                "event=oracle_sandwich_violated n=%s k=%s epsilon0=%.17g epsilon=%.17g "
                "exact=%.17g mixture_exact=%.17g hoeffding=%.17g bennett=%.17g",
                n,
                k,
                epsilon0,
                epsilon,
                cell.exact,
                cell.mixture_exact,
                cell.hoeffding,
                cell.bennett,
            )
        cells.append(cell)
    LOGGER.info(
        "event=oracle_sweep_completed cells=%s violations=%s",
        len(cells),
        sum(not cell.holds for cell in cells),
    )
    return cells


def _oracle_cell(
    n: int, k: int, epsilon0: float, epsilon: float, settings: OracleSettings
) -> OracleCell:
    exact = exact_shuffled_divergence_krr(n, k, epsilon0, epsilon, settings=settings)
    mixture_exact = exact_mixture_delta_krr(n, k, epsilon0, epsilon, settings=settings)
    if epsilon <= 0:
        # a = 0: the concentration bounds only give the trivial guarantee.
        hoeffding = bennett = 1.0
    else:
        profile = profile_krr(k, epsilon0, epsilon)
        hoeffding = delta_hoeffding_mixture(n, profile)
        bennett = delta_bennett_mixture(n, profile)
    return OracleCell(
        n=n,
        k=k,
        epsilon0=epsilon0,
        epsilon=epsilon,
        exact=exact,
        mixture_exact=mixture_exact,
        hoeffding=hoeffding,
        bennett=bennett,
    )


def _check_parties(n: int, k: int, settings: OracleSettings) -> None:
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}.")
    if n > settings.max_parties:
        raise OracleCapacityError(
            f"Exact enumeration is capped at n={settings.max_parties}.",
            requested=n,
            cap=settings.max_parties,
        )
    histogram_count = math.comb(n + k - 1, k - 1)
    if histogram_count > settings.max_histograms:
        raise OracleCapacityError(
            f"{histogram_count} histograms exceed the cap of {settings.max_histograms}.",
            requested=histogram_count,
            cap=settings.max_histograms,
        )


def _compositions(total: int, parts: int) -> NDArray[np.int64]:
    """All count vectors of length parts summing to total, in lexicographic bar order."""
    rows: list[list[int]] = []
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        edges = (-1, *bars, total + parts - 1)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(parts)])
    return np.array(rows, dtype=np.int64)


def _log_multinomial_pmf(
    counts: NDArray[np.int64], trials: int, pmf: NDArray[np.float64]
) -> NDArray[np.float64]:
    """log Multinomial(trials, pmf) evaluated row-wise on count vectors."""
    return (
        float(special.gammaln(trials + 1))
        - special.gammaln(counts + 1).sum(axis=1)
        + special.xlogy(counts, pmf).sum(axis=1)
    )


def _clamp_unit(value: float) -> float:
    return min(1.0, max(0.0, value))
