"""Local randomizers and their output densities."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from shuffle_privacy.application.errors import InputDomainError
from shuffle_privacy.domain.randomizer import (
    KRRSpec,
    LaplaceSpec,
    Message,
    RandomizerSpec,
    SummationSpec,
)


def krr_gamma(k: int, epsilon0: float) -> float:
    """Blanket weight k/(e^eps0 + k - 1) of k-ary randomized response."""
    # Written with e^-eps0 so large budgets underflow to 0 instead of overflowing.
    tail = math.exp(-epsilon0)
    return k * tail / (1.0 + (k - 1) * tail)


def message_space(spec: KRRSpec | SummationSpec) -> NDArray[np.int64]:
    """Symbols a discrete randomizer can emit, in ascending order."""
    if isinstance(spec, KRRSpec):
        return np.arange(1, spec.k + 1, dtype=np.int64)
    return np.arange(0, spec.k + 1, dtype=np.int64)


def encode_fixed_point(x: float, k: int, rng: np.random.Generator) -> int:
    """Randomized rounding of x onto the grid {0, 1/k, ..., 1}, returned as the integer level."""
    _check_unit_interval(x)
    if k < 1:
        raise InputDomainError(f"Precision k must be >= 1, got {k}.")
    scaled = x * k
    floor = math.floor(scaled)
    fraction = scaled - floor
    if fraction == 0.0:
        return int(floor)
    return int(floor) + int(rng.random() < fraction)


def encode_fixed_point_many(
    xs: ArrayLike, k: int, rng: np.random.Generator
) -> NDArray[np.int64]:
    values = np.asarray(xs, dtype=np.float64)
    if not np.all((values >= 0.0) & (values <= 1.0)):
        raise InputDomainError("Fixed-point inputs must lie in [0, 1].")
    if k < 1:
        raise InputDomainError(f"Precision k must be >= 1, got {k}.")
    scaled = values * k
    floor = np.floor(scaled)
    fraction = scaled - floor
    return (floor + (rng.random(values.shape) < fraction)).astype(np.int64)


def fixed_point_expectation(x: float, k: int) -> float:
    """Exact mean of encode_fixed_point(x, k) / k."""
    _check_unit_interval(x)
    scaled = x * k
    floor = math.floor(scaled)
    return (floor + (scaled - floor)) / k


def randomize(spec: RandomizerSpec, x: float, rng: np.random.Generator) -> Message:
    """Draw one message from mu_x."""
    check_input(spec, x)
    if isinstance(spec, KRRSpec):
        gamma = krr_gamma(spec.k, spec.epsilon0)
        if rng.random() < gamma:
            return int(rng.integers(1, spec.k + 1))
        return int(x)
    if isinstance(spec, SummationSpec):
        level = encode_fixed_point(x, spec.k, rng)
        if rng.random() < spec.gamma:
            return int(rng.integers(0, spec.k + 1))
        return level
    if isinstance(spec, LaplaceSpec):
        return float(x + rng.laplace(0.0, 1.0 / spec.epsilon0))
    return float(x + rng.normal(0.0, spec.sigma))


def randomize_many(
    spec: RandomizerSpec, xs: ArrayLike, rng: np.random.Generator
) -> NDArray[np.int64] | NDArray[np.float64]:
    """Randomize every party's input independently; one vectorized draw per step."""
    values = np.asarray(xs, dtype=np.float64)
    _check_inputs_many(spec, values)
    if isinstance(spec, KRRSpec):
        use_blanket = rng.random(values.shape) < krr_gamma(spec.k, spec.epsilon0)
        blanket = rng.integers(1, spec.k + 1, size=values.shape)
        return np.where(use_blanket, blanket, values.astype(np.int64))
    if isinstance(spec, SummationSpec):
        levels = encode_fixed_point_many(values, spec.k, rng)
        use_blanket = rng.random(values.shape) < spec.gamma
        blanket = rng.integers(0, spec.k + 1, size=values.shape)
        return np.where(use_blanket, blanket, levels)
    if isinstance(spec, LaplaceSpec):
        return values + rng.laplace(0.0, 1.0 / spec.epsilon0, size=values.shape)
    return values + rng.normal(0.0, spec.sigma, size=values.shape)


def density(spec: RandomizerSpec, x: float, y: Message) -> float:
    """Probability mass (discrete kinds) or Lebesgue density (continuous kinds) of y under mu_x."""
    check_input(spec, x)
    check_message(spec, y)
    return float(density_many(spec, x, np.asarray([y]))[0])


def density_many(spec: RandomizerSpec, x: float, ys: ArrayLike) -> NDArray[np.float64]:
    """Vectorized density over messages for a fixed input; messages are not range checked."""
    values = np.asarray(ys, dtype=np.float64)
    if isinstance(spec, KRRSpec):
        gamma = krr_gamma(spec.k, spec.epsilon0)
        return np.where(values == x, 1.0 - gamma + gamma / spec.k, gamma / spec.k)
    if isinstance(spec, SummationSpec):
        pmf = output_pmf(spec, x)
        indices = values.astype(np.int64)
        return pmf[indices]
    if isinstance(spec, LaplaceSpec):
        return stats.laplace.pdf(values, loc=x, scale=1.0 / spec.epsilon0)
    return stats.norm.pdf(values, loc=x, scale=spec.sigma)


def output_pmf(spec: KRRSpec | SummationSpec, x: float) -> NDArray[np.float64]:
    """Full output distribution of a discrete randomizer, aligned with message_space(spec)."""
    check_input(spec, x)
    if isinstance(spec, KRRSpec):
        gamma = krr_gamma(spec.k, spec.epsilon0)
        pmf = np.full(spec.k, gamma / spec.k)
        pmf[int(x) - 1] += 1.0 - gamma
        return pmf
    gamma = spec.gamma
    scaled = x * spec.k
    floor = math.floor(scaled)
    fraction = scaled - floor
    pmf = np.full(spec.k + 1, gamma / (spec.k + 1))
    pmf[floor] += (1.0 - gamma) * (1.0 - fraction)
    if fraction > 0.0:
        pmf[floor + 1] += (1.0 - gamma) * fraction
    return pmf


def _check_unit_interval(x: float) -> None:
    if not math.isfinite(x) or not 0.0 <= x <= 1.0:
        raise InputDomainError(f"Input {x!r} must lie in [0, 1].")


def check_input(spec: RandomizerSpec, x: float) -> None:
    if isinstance(spec, KRRSpec):
        if not float(x).is_integer() or not 1 <= int(x) <= spec.k:
            raise InputDomainError(f"Input {x!r} must be a symbol in 1..{spec.k}.")
        return
    _check_unit_interval(float(x))


def _check_inputs_many(spec: RandomizerSpec, values: NDArray[np.float64]) -> None:
    if isinstance(spec, KRRSpec):
        valid = (values == np.floor(values)) & (values >= 1) & (values <= spec.k)
        domain = f"symbols in 1..{spec.k}"
    else:
        valid = (values >= 0.0) & (values <= 1.0)
        domain = "values in [0, 1]"
    if not np.all(valid):
        raise InputDomainError(f"Inputs must be {domain}; got {values[~valid][:5].tolist()}.")


def check_message(spec: RandomizerSpec, y: Message) -> None:
    if isinstance(spec, KRRSpec | SummationSpec):
        low = 1 if isinstance(spec, KRRSpec) else 0
        if not float(y).is_integer() or not low <= int(y) <= spec.k:
            raise InputDomainError(f"Message {y!r} must be a symbol in {low}..{spec.k}.")
        return
    if not math.isfinite(float(y)):
        raise InputDomainError(f"Message {y!r} must be a finite real.")
