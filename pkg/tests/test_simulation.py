"""Unit tests for the Monte Carlo protocol harness."""

from __future__ import annotations

import logging
import math

import numpy as np
import pytest

from shuffle_privacy.application.blanket import profile_krr, profile_laplace
from shuffle_privacy.application.errors import (
    InfeasibleParametersError,
    InputDomainError,
    PreconditionError,
)
from shuffle_privacy.application.settings import SimulationSettings
from shuffle_privacy.application.simulation import (
    empirical_L_moments,
    generate_inputs,
    mse_experiment,
    run_summation,
    shuffle,
    trial_rng,
)
from shuffle_privacy.application.summation import choose_parameters, theoretical_mse_bound
from shuffle_privacy.domain.experiment import InputDistribution, InputGenerator
from shuffle_privacy.domain.randomizer import KRRSpec, LaplaceSpec
from shuffle_privacy.domain.summation import SummationParams

UNIFORM = InputGenerator(InputDistribution.UNIFORM)


def test_shuffle_counts_messages(rng: np.random.Generator) -> None:
    assert dict(shuffle([3, 3, 3, 3, 3], rng).counts) == {3: 5}
    assert dict(shuffle([0, 2, 2, 1], rng).counts) == {0: 1, 1: 1, 2: 2}


def test_shuffle_forgets_order(rng: np.random.Generator) -> None:
    messages = [4, 1, 1, 0, 3, 3, 3]

    views = {
        tuple(sorted(shuffle(rng.permutation(messages), rng).counts.items())) for _ in range(5)
    }

    assert len(views) == 1


def test_shuffle_rejects_empty_input(rng: np.random.Generator) -> None:
    with pytest.raises(InputDomainError, match="at least one"):
        shuffle([], rng)


def test_trial_generators_depend_only_on_seed_and_trial() -> None:
    first = trial_rng(3, 5).random(4)

    assert np.array_equal(first, trial_rng(3, 5).random(4))
    assert not np.array_equal(first, trial_rng(3, 6).random(4))
    assert not np.array_equal(first, trial_rng(4, 5).random(4))


def test_run_summation_without_blanket_is_exact_on_zero_inputs() -> None:
    params = SummationParams(c=0.0, k=20, n=10_000)

    estimate = run_summation(np.zeros(10_000), 1.0, 0.01, seed=1, params=params)

    assert estimate == 0.0


def test_run_summation_is_deterministic_given_seed() -> None:
    inputs = np.linspace(0.0, 1.0, 5_000)

    first = run_summation(inputs, 1.0, 0.01, seed=42)
    second = run_summation(inputs, 1.0, 0.01, seed=42)

    assert first == second


def test_run_summation_validates_inputs() -> None:
    with pytest.raises(InputDomainError, match="at least one"):
        run_summation([], 1.0, 0.01, seed=0)
    with pytest.raises(InputDomainError, match="Parameters are for n=100"):
        run_summation(np.zeros(10), 1.0, 0.01, seed=0, params=SummationParams(c=1, k=2, n=100))
    with pytest.raises(InfeasibleParametersError):
        run_summation(np.zeros(50), 1.0, 0.01, seed=0)


def test_generate_inputs_per_distribution(rng: np.random.Generator) -> None:
    constant = generate_inputs(InputGenerator(InputDistribution.CONSTANT, 0.25), 4, rng)
    grid = generate_inputs(InputGenerator(InputDistribution.GRID), 5, rng)
    two_point = generate_inputs(InputGenerator(InputDistribution.TWO_POINT), 1_000, rng)
    uniform = generate_inputs(UNIFORM, 1_000, rng)

    assert constant.tolist() == [0.25] * 4
    assert grid.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert set(np.unique(two_point).tolist()) == {0.0, 1.0}
    assert np.all((uniform >= 0.0) & (uniform < 1.0))


def test_mse_experiment_reports_single_trial(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="shuffle_privacy.application.simulation"):
        report = mse_experiment(10_000, UNIFORM, 1, 1.0, 0.01, seed=3)

    assert report.trials == 1
    assert report.bias_stderr == math.inf
    assert report.empirical_mse == pytest.approx(report.empirical_bias**2)
    assert "event=experiment_few_trials" in caplog.text


def test_mse_experiment_rejects_zero_trials() -> None:
    with pytest.raises(PreconditionError, match="trials"):
        mse_experiment(10_000, UNIFORM, 0, 1.0, 0.01, seed=3)


def test_parallel_trials_reproduce_serial_report() -> None:
    serial = mse_experiment(5_000, UNIFORM, 40, 1.0, 0.01, seed=9)

    parallel = mse_experiment(
        5_000, UNIFORM, 40, 1.0, 0.01, seed=9, settings=SimulationSettings(max_workers=4)
    )

    assert parallel == serial


def test_constant_zero_inputs_are_unbiased() -> None:
    report = mse_experiment(
        20_000, InputGenerator(InputDistribution.CONSTANT, 0.0), 100, 1.0, 0.01, seed=5
    )

    assert abs(report.empirical_bias) <= 3 * report.bias_stderr


@pytest.mark.slow
def test_summation_error_respects_theoretical_bound() -> None:
    n, trials = 100_000, 500

    report = mse_experiment(n, UNIFORM, trials, 1.0, 0.01, seed=7)

    assert report.theoretical_bound == pytest.approx(
        theoretical_mse_bound(choose_parameters(1.0, 0.01, n))
    )
    assert report.empirical_mse <= report.theoretical_bound
    assert abs(report.empirical_bias) <= 3 * report.bias_stderr


@pytest.mark.slow
def test_single_runs_stay_within_six_bound_deviations() -> None:
    n, trials = 100_000, 500
    limit = 6 * math.sqrt(theoretical_mse_bound(choose_parameters(1.0, 0.01, n)))
    hits = 0

    for trial in range(trials):
        rng = trial_rng(13, trial)
        inputs = rng.random(n)
        if abs(run_summation(inputs, 1.0, 0.01, rng) - math.fsum(inputs.tolist())) <= limit:
            hits += 1

    assert hits >= 0.99 * trials


def test_empirical_moments_match_krr_profile() -> None:
    profile = profile_krr(2, 1.0, 0.5)

    moments = empirical_L_moments(KRRSpec(k=2, epsilon0=1.0), 0.5, 1, 2, 200_000, seed=2)

    assert abs(moments.mean + math.expm1(0.5)) <= 5 * moments.mean_stderr
    assert moments.min_seen >= profile.b_minus - 1e-9
    assert moments.max_seen <= profile.b_plus + 1e-9
    assert moments.second_moment <= profile.c2 + 5 * moments.second_moment_stderr


def test_empirical_moments_match_laplace_profile() -> None:
    profile = profile_laplace(1.0, 0.5)

    moments = empirical_L_moments(LaplaceSpec(epsilon0=1.0), 0.5, 0.0, 1.0, 200_000, seed=2)

    assert abs(moments.mean + math.expm1(0.5)) <= 5 * moments.mean_stderr
    assert moments.min_seen >= profile.b_minus - 1e-9
    assert moments.max_seen <= profile.b_plus + 1e-9
    assert moments.second_moment <= profile.c2 + 5 * moments.second_moment_stderr


def test_empirical_moments_require_enough_samples() -> None:
    with pytest.raises(PreconditionError, match="samples"):
        empirical_L_moments(KRRSpec(k=2, epsilon0=1.0), 0.5, 1, 2, 999, seed=0)
