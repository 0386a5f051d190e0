"""Monte Carlo harness for the shuffled protocols."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numpy.typing import ArrayLike, NDArray

from shuffle_privacy.application.blanket import amplification_rv_samples
from shuffle_privacy.application.errors import (
    InfeasibleParametersError,
    InputDomainError,
    PreconditionError,
)
from shuffle_privacy.application.histogram import estimate_frequencies, krr_epsilon0_from_gamma
from shuffle_privacy.application.randomizers import krr_gamma, randomize_many
from shuffle_privacy.application.settings import DEFAULT_SIMULATION, SimulationSettings
from shuffle_privacy.application.summation import (
    analyze,
    choose_parameters,
    histogram_gamma,
    theoretical_mse_bound,
)
from shuffle_privacy.domain.experiment import (
    ExperimentReport,
    InputDistribution,
    InputGenerator,
    LMoments,
)
from shuffle_privacy.domain.histogram import Histogram
from shuffle_privacy.domain.randomizer import KRRSpec, RandomizerSpec
from shuffle_privacy.domain.summation import SummationParams

LOGGER = logging.getLogger(__name__)

MIN_RECOMMENDED_TRIALS = 30
MIN_MOMENT_SAMPLES = 1000


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, independent of the order trials run in."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def shuffle(messages: ArrayLike, rng: np.random.Generator) -> Histogram:
    """Anonymize messages: permute them, then forget the order."""
    values = np.asarray(messages)
    if values.size == 0:
        raise InputDomainError("The shuffler needs at least one message.")
    return Histogram.from_messages(rng.permutation(values))


def run_summation(
    inputs: Sequence[float] | NDArray[np.float64],
    epsilon: float,
    delta: float,
    seed: int | np.random.Generator,
    *,
    params: SummationParams | None = None,
) -> float:
    """One execution of randomize -> shuffle -> analyze over all parties."""
    values = np.asarray(inputs, dtype=np.float64)
    if values.size == 0:
        raise InputDomainError("run_summation needs at least one input.")
    chosen = params or choose_parameters(epsilon, delta, values.size)
    if chosen.n != values.size:
        raise InputDomainError(f"Parameters are for n={chosen.n}, got {values.size} inputs.")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    messages = randomize_many(chosen.randomizer_spec(), values, rng)
    return analyze(shuffle(messages, rng), chosen)


def generate_inputs(
    generator: InputGenerator, n: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    if generator.distribution is InputDistribution.CONSTANT:
        return np.full(n, generator.value)
    if generator.distribution is InputDistribution.GRID:
        return np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(n)
    if generator.distribution is InputDistribution.UNIFORM:
        return rng.random(n)
    return rng.integers(0, 2, size=n).astype(np.float64)


def mse_experiment(
    n: int,
    input_gen: InputGenerator,
    trials: int,
    epsilon: float,
    delta: float,
    seed: int,
    *,
    params: SummationParams | None = None,
    settings: SimulationSettings = DEFAULT_SIMULATION,
) -> ExperimentReport:
    """Empirical MSE and bias of the summation protocol against the analytic bound."""
    if trials < 1:
        raise PreconditionError(f"trials must be >= 1, got {trials}.")
    if trials < MIN_RECOMMENDED_TRIALS:
        LOGGER.warning(
            "event=experiment_few_trials trials=%s recommended=%s",
            trials,
            MIN_RECOMMENDED_TRIALS,
        )
    chosen = params or choose_parameters(epsilon, delta, n)

    def run_trial(trial: int) -> float:
        rng = trial_rng(seed, trial)
        inputs = generate_inputs(input_gen, n, rng)
        estimate = run_summation(inputs, epsilon, delta, rng, params=chosen)
        return estimate - math.fsum(inputs.tolist())

    if settings.max_workers == 1:
        errors = np.array([run_trial(trial) for trial in range(trials)])
    else:
        with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
            errors = np.array(list(executor.map(run_trial, range(trials))))

    bias_stderr = float(np.std(errors, ddof=1)) / math.sqrt(trials) if trials > 1 else math.inf
    report = ExperimentReport(
        trials=trials,
        empirical_mse=float(np.mean(errors**2)),
        empirical_bias=float(np.mean(errors)),
        bias_stderr=bias_stderr,
        theoretical_bound=theoretical_mse_bound(chosen),
        seed=seed,
        params=chosen,
    )
    LOGGER.info(
        "event=experiment_completed n=%s trials=%s distribution=%s seed=%s "
        "empirical_mse=%.6g theoretical_bound=%.6g",
        n,
        trials,
        input_gen.distribution.value,
        seed,
        report.empirical_mse,
        report.theoretical_bound,
    )
    return report


def empirical_L_moments(  # noqa: N802
    spec: RandomizerSpec,
    epsilon: float,
    x: float,
    x_prime: float,
    samples: int,
    seed: int,
) -> LMoments:
    """Sample mean, second moment and extremes of the amplification variable L."""
    if samples < MIN_MOMENT_SAMPLES:
        raise PreconditionError(f"samples must be >= {MIN_MOMENT_SAMPLES}, got {samples}.")
    draws = amplification_rv_samples(
        spec, epsilon, x, x_prime, samples, np.random.default_rng(seed)
    )
    squares = draws**2
    return LMoments(
        samples=samples,
        mean=float(np.mean(draws)),
        second_moment=float(np.mean(squares)),
        min_seen=float(np.min(draws)),
        max_seen=float(np.max(draws)),
        mean_stderr=float(np.std(draws, ddof=1)) / math.sqrt(samples),
        second_moment_stderr=float(np.std(squares, ddof=1)) / math.sqrt(samples),
    )


def run_histogram(
    inputs: Sequence[int], k: int, epsilon: float, delta: float, seed: int
) -> list[float]:
    """Private histogram: k-RR with the blanket weight that certifies (epsilon, delta)."""
    n = len(inputs)
    target_gamma = histogram_gamma(k, n, epsilon, delta)
    if target_gamma >= 1:
        raise InfeasibleParametersError(
            f"n={n} is too small for a private histogram over {k} symbols at "
            f"epsilon={epsilon}, delta={delta}.",
            reason="gamma >= 1",
        )
    spec = KRRSpec(k=k, epsilon0=krr_epsilon0_from_gamma(k, target_gamma))
    rng = np.random.default_rng(seed)
    messages = randomize_many(spec, inputs, rng)
    return estimate_frequencies(shuffle(messages, rng), k, krr_gamma(k, spec.epsilon0), n)
