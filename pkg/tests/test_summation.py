"""Unit tests for the single-message summation protocol."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from shuffle_privacy.application.errors import (
    InfeasibleParametersError,
    InputDomainError,
    PreconditionError,
)
from shuffle_privacy.application.randomizers import krr_gamma, output_pmf
from shuffle_privacy.application.simulation import shuffle
from shuffle_privacy.application.summation import (
    analyze,
    blanket_mass,
    choose_parameters,
    histogram_gamma,
    summation_local_epsilon0,
    theoretical_mse_bound,
)
from shuffle_privacy.domain.histogram import Histogram
from shuffle_privacy.domain.summation import SummationParams

LN200 = math.log(200.0)


def test_histogram_gamma_reference_value() -> None:
    value = histogram_gamma(2, 1_000_000, 1.0, 0.01)

    assert value == pytest.approx(2 * 14 * LN200 / 999_999, rel=1e-12)
    assert value == pytest.approx(1.4835e-4, rel=1e-4)


def test_histogram_gamma_delta_term_dominates_at_unit_epsilon() -> None:
    assert 14 * LN200 > 27
    assert histogram_gamma(2, 1_000, 1.0, 0.01) == pytest.approx(2 * 14 * LN200 / 999)


def test_histogram_gamma_vanishes_as_n_grows() -> None:
    values = [histogram_gamma(3, 10**power, 0.5, 1e-6) for power in range(2, 9)]

    assert all(later < earlier for earlier, later in zip(values, values[1:], strict=False))
    assert values[-1] < 1e-4


def test_histogram_gamma_rejects_invalid_arguments() -> None:
    with pytest.raises(PreconditionError, match="k must be"):
        histogram_gamma(1, 100, 1.0, 0.01)
    with pytest.raises(PreconditionError, match="epsilon"):
        histogram_gamma(2, 100, 1.5, 0.01)


def test_choose_parameters_reference_values() -> None:
    params = choose_parameters(1.0, 0.01, 1_000_000)

    assert params.c == pytest.approx(74.176, abs=1e-3)
    assert params.k == 24
    assert params.gamma == pytest.approx(1.8544e-3, rel=1e-4)


def test_choose_parameters_rejects_too_few_parties() -> None:
    with pytest.raises(InfeasibleParametersError, match="too small") as exc_info:
        choose_parameters(1.0, 0.01, 100)

    assert exc_info.value.reason == "gamma >= 1"


def test_blanket_mass_epsilon_term_dominates_for_weak_delta() -> None:
    assert blanket_mass(1.0, 1.0) == 27.0


def test_chosen_parameters_satisfy_histogram_hypothesis_on_k_plus_one_symbols() -> None:
    for n in (10_000, 1_000_000):
        params = choose_parameters(0.8, 1e-5, n)
        required = blanket_mass(0.8, 1e-5) * (n - 1) / n

        assert params.gamma * (n - 1) / (params.k + 1) >= required * (1 - 1e-12)


def test_analyze_without_blanket_returns_raw_sum() -> None:
    params = SummationParams(c=0.0, k=2, n=3)

    assert analyze(Histogram.from_messages([2, 0, 1]), params) == pytest.approx(1.5)


def test_analyze_all_top_levels() -> None:
    params = SummationParams(c=2.0, k=4, n=100)

    estimate = analyze(Histogram({4: 100}), params)

    gamma = params.gamma
    assert estimate == pytest.approx((100 - gamma * 100 / 2) / (1 - gamma))


def test_analyze_rejects_count_mismatch_and_unknown_levels() -> None:
    params = SummationParams(c=1.0, k=2, n=4)

    with pytest.raises(InputDomainError, match="expected n=4"):
        analyze(Histogram({1: 3}), params)
    with pytest.raises(InputDomainError, match="outside the levels"):
        analyze(Histogram({1: 3, 5: 1}), params)


def test_analyze_is_permutation_invariant(rng: np.random.Generator) -> None:
    params = SummationParams(c=1.0, k=3, n=8)
    messages = np.array([0, 3, 3, 1, 2, 2, 0, 1])

    estimates = {analyze(shuffle(rng.permutation(messages), rng), params) for _ in range(10)}

    assert len(estimates) == 1


def _exact_expectation(inputs: tuple[float, ...], params: SummationParams) -> float:
    spec = params.randomizer_spec()
    pmfs = [output_pmf(spec, x) for x in inputs]
    terms: list[float] = []
    for outcome in itertools.product(range(params.k + 1), repeat=len(inputs)):
        probability = math.prod(pmf[y] for pmf, y in zip(pmfs, outcome, strict=True))
        terms.append(probability * analyze(Histogram.from_messages(list(outcome)), params))
    return math.fsum(terms)


def test_analyzer_is_exactly_unbiased_on_two_parties() -> None:
    params = SummationParams(c=0.5, k=1, n=2)

    assert _exact_expectation((0.5, 0.5), params) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [1, 2])
def test_analyzer_is_exactly_unbiased_on_small_grids(n: int, k: int) -> None:
    params = SummationParams(c=0.3, k=k, n=n)
    grid = (0.0, 0.3, 0.5, 0.85, 1.0)

    for inputs in itertools.product(grid, repeat=n):
        assert _exact_expectation(inputs, params) == pytest.approx(math.fsum(inputs), abs=1e-12)


def test_theoretical_mse_bound_reference_value() -> None:
    params = choose_parameters(1.0, 0.01, 1_000_000)

    assert theoretical_mse_bound(params) == pytest.approx(1366.5, abs=0.5)


def test_theoretical_mse_bound_without_blanket_is_rounding_error() -> None:
    params = SummationParams(c=0.0, k=5, n=100)

    assert theoretical_mse_bound(params) == pytest.approx(100 / (4 * 25))


def test_theoretical_mse_bound_grows_like_cube_root() -> None:
    def bound(n: int) -> float:
        return theoretical_mse_bound(choose_parameters(1.0, 0.01, n))

    assert 0.75 * 100 ** (1 / 3) <= bound(10**6) / bound(10**4) <= 1.35 * 100 ** (1 / 3)
    assert 7.0 <= bound(10**7) / bound(10**4) <= 14.0


def test_summation_local_budget_matches_krr_on_levels() -> None:
    params = SummationParams(c=2.0, k=4, n=100)

    epsilon0 = summation_local_epsilon0(params)

    assert krr_gamma(params.k + 1, epsilon0) == pytest.approx(params.gamma, rel=1e-12)
    assert summation_local_epsilon0(SummationParams(c=0.0, k=4, n=100)) == math.inf
