"""Blanket decomposition mu_x = (1 - gamma) nu_x + gamma omega and amplification profiles."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from shuffle_privacy.application.errors import PreconditionError
from shuffle_privacy.application.randomizers import (
    check_input,
    check_message,
    density,
    density_many,
    krr_gamma,
)
from shuffle_privacy.domain.blanket import BlanketProfile, ProfileSource
from shuffle_privacy.domain.randomizer import (
    GaussianSpec,
    KRRSpec,
    LaplaceSpec,
    Message,
    RandomizerSpec,
    SummationSpec,
)

_NU_ROUNDING_FLOOR = -1e-12
_GAMMA_SLACK = 1e-12


def laplace_gamma(epsilon0: float) -> float:
    """Total variation similarity e^(-eps0/2) of the Laplace mechanism on [0, 1]."""
    if epsilon0 < 0:
        raise PreconditionError(f"epsilon0 must be >= 0, got {epsilon0}.")
    return math.exp(-epsilon0 / 2.0)


def gaussian_gamma(sigma: float) -> float:
    """2 P[N(0, sigma^2) <= -1/2]."""
    return 2.0 * float(stats.norm.cdf(-0.5 / sigma))


def gamma(spec: RandomizerSpec) -> float:
    """Weight of the input-independent component of the randomizer's output."""
    if isinstance(spec, KRRSpec):
        return krr_gamma(spec.k, spec.epsilon0)
    if isinstance(spec, LaplaceSpec):
        return laplace_gamma(spec.epsilon0)
    if isinstance(spec, GaussianSpec):
        return gaussian_gamma(spec.sigma)
    return spec.gamma


def gamma_lower_bound(epsilon0: float) -> float:
    """Worst-case gamma e^(-eps0) over all eps0-LDP randomizers."""
    if epsilon0 < 0:
        raise PreconditionError(f"epsilon0 must be >= 0, got {epsilon0}.")
    return math.exp(-epsilon0)


def blanket_density(spec: RandomizerSpec, y: Message) -> float:
    check_message(spec, y)
    return float(blanket_density_many(spec, np.asarray([y]))[0])


def blanket_density_many(spec: RandomizerSpec, ys: ArrayLike) -> NDArray[np.float64]:
    """Blanket density omega at every message in ys."""
    values = np.asarray(ys, dtype=np.float64)
    if isinstance(spec, KRRSpec):
        return np.full(values.shape, 1.0 / spec.k)
    if isinstance(spec, SummationSpec):
        return np.full(values.shape, 1.0 / (spec.k + 1))
    return np.exp(_log_blanket_density(spec, values))


def blanket_sample(spec: RandomizerSpec, rng: np.random.Generator) -> Message:
    sample = blanket_sample_many(spec, 1, rng)[0]
    if isinstance(spec, KRRSpec | SummationSpec):
        return int(sample)
    return float(sample)


def blanket_sample_many(
    spec: RandomizerSpec, size: int, rng: np.random.Generator
) -> NDArray[np.int64] | NDArray[np.float64]:
    """Draw size independent messages from omega."""
    if isinstance(spec, KRRSpec):
        return rng.integers(1, spec.k + 1, size=size)
    if isinstance(spec, SummationSpec):
        return rng.integers(0, spec.k + 1, size=size)
    if isinstance(spec, LaplaceSpec):
        return 0.5 + rng.laplace(0.0, 1.0 / spec.epsilon0, size=size)
    # omega restricted to y >= 1/2 is N(0, sigma^2) conditioned on that half-line.
    upper_half = stats.truncnorm.ppf(
        rng.random(size), a=0.5 / spec.sigma, b=np.inf, loc=0.0, scale=spec.sigma
    )
    flip = rng.random(size) < 0.5
    return np.where(flip, 1.0 - upper_half, upper_half)


def nu_density(spec: RandomizerSpec, x: float, y: Message) -> float:
    """Input-dependent component (mu_x - gamma omega) / (1 - gamma); zero when gamma = 1."""
    weight = gamma(spec)
    if weight >= 1.0:
        return 0.0
    value = (density(spec, x, y) - weight * blanket_density(spec, y)) / (1.0 - weight)
    if _NU_ROUNDING_FLOOR < value < 0.0:
        return 0.0
    return value


def amplification_rv_sample(
    spec: RandomizerSpec, epsilon: float, x: float, x_prime: float, rng: np.random.Generator
) -> float:
    """One draw of L = (mu_x(W) - e^eps mu_x'(W)) / omega(W) with W drawn from omega."""
    return float(amplification_rv_samples(spec, epsilon, x, x_prime, 1, rng)[0])


def amplification_rv_samples(
    spec: RandomizerSpec,
    epsilon: float,
    x: float,
    x_prime: float,
    size: int,
    rng: np.random.Generator,
) -> NDArray[np.float64]:
    if epsilon < 0:
        raise PreconditionError(f"epsilon must be >= 0, got {epsilon}.")
    check_input(spec, x)
    check_input(spec, x_prime)
    messages = blanket_sample_many(spec, size, rng)
    if isinstance(spec, KRRSpec | SummationSpec):
        omega = blanket_density_many(spec, messages)
        numerator = density_many(spec, x, messages) - math.exp(epsilon) * density_many(
            spec, x_prime, messages
        )
        return numerator / omega
    # Ratios in log space so far-tail draws do not become 0/0.
    log_omega = _log_blanket_density(spec, messages)
    ratio_x = np.exp(_log_density(spec, x, messages) - log_omega)
    ratio_x_prime = np.exp(_log_density(spec, x_prime, messages) - log_omega)
    return ratio_x - math.exp(epsilon) * ratio_x_prime


def profile_generic(epsilon0: float, epsilon: float, gamma: float | None = None) -> BlanketProfile:
    """Range and second-moment bound of L for any eps0-LDP randomizer with blanket weight gamma."""
    if epsilon0 < 0 or epsilon < 0:
        raise PreconditionError("epsilon0 and epsilon must be >= 0.")
    floor = gamma_lower_bound(epsilon0)
    weight = floor if gamma is None else gamma
    if not floor * (1.0 - _GAMMA_SLACK) <= weight <= 1.0:
        raise PreconditionError(
            f"gamma must lie in [e^-eps0, 1] = [{floor:.6g}, 1], got {weight:.6g}."
        )
    b_minus = weight * (math.exp(-epsilon0) - math.exp(epsilon + epsilon0))
    b_plus = weight * (math.exp(epsilon0) - math.exp(epsilon - epsilon0))
    c2 = weight * math.exp(epsilon0) * (math.exp(2 * epsilon) + 1.0)
    c2 -= 2.0 * weight**2 * math.exp(epsilon - 2 * epsilon0)
    return BlanketProfile(
        gamma=weight,
        a=math.expm1(epsilon),
        b_minus=b_minus,
        b_plus=b_plus,
        c2=c2,
        epsilon=epsilon,
        source=ProfileSource.GENERIC,
    )


def profile_krr(k: int, epsilon0: float, epsilon: float) -> BlanketProfile:
    """Exact range and second moment of L for k-ary randomized response."""
    if k < 2:
        raise PreconditionError(f"k must be >= 2, got {k}.")
    if epsilon0 < 0 or epsilon < 0:
        raise PreconditionError("epsilon0 and epsilon must be >= 0.")
    weight = krr_gamma(k, epsilon0)
    centre = -weight * math.expm1(epsilon)
    blanket_free = (1.0 - weight) * k
    return BlanketProfile(
        gamma=weight,
        a=math.expm1(epsilon),
        b_minus=centre - blanket_free * math.exp(epsilon),
        b_plus=centre + blanket_free,
        c2=weight * (2.0 - weight) * math.expm1(epsilon) ** 2
        + (1.0 - weight) ** 2 * k * (1.0 + math.exp(2 * epsilon)),
        epsilon=epsilon,
        source=ProfileSource.KRR,
    )


def profile_laplace(epsilon0: float, epsilon: float) -> BlanketProfile:
    """Range and second-moment bound of L for the Laplace mechanism on [0, 1]."""
    if epsilon0 <= 0:
        raise PreconditionError(f"Laplace epsilon0 must be > 0, got {epsilon0}.")
    if epsilon < 0:
        raise PreconditionError(f"epsilon must be >= 0, got {epsilon}.")
    half = epsilon0 / 2.0
    c2 = (math.exp(2 * epsilon) + 1.0) / 3.0 * (
        2.0 * math.exp(half) + math.exp(-epsilon0)
    ) - 2.0 * math.exp(epsilon) * (2.0 * math.exp(-half) - math.exp(-epsilon0))
    return BlanketProfile(
        gamma=laplace_gamma(epsilon0),
        a=math.expm1(epsilon),
        b_minus=-math.exp(-half) * math.expm1(epsilon + epsilon0),
        b_plus=-math.exp(half) * math.expm1(epsilon - epsilon0),
        c2=c2,
        epsilon=epsilon,
        source=ProfileSource.LAPLACE,
    )


def _log_density(spec: RandomizerSpec, x: float, ys: NDArray[np.float64]) -> NDArray[np.float64]:
    if isinstance(spec, LaplaceSpec):
        return stats.laplace.logpdf(ys, loc=x, scale=1.0 / spec.epsilon0)
    if isinstance(spec, GaussianSpec):
        return stats.norm.logpdf(ys, loc=x, scale=spec.sigma)
    return np.log(density_many(spec, x, ys))


def _log_blanket_density(spec: RandomizerSpec, ys: NDArray[np.float64]) -> NDArray[np.float64]:
    if isinstance(spec, LaplaceSpec):
        return stats.laplace.logpdf(ys, loc=0.5, scale=1.0 / spec.epsilon0)
    if isinstance(spec, GaussianSpec):
        lower_envelope = np.minimum(_log_density(spec, 0.0, ys), _log_density(spec, 1.0, ys))
        return lower_envelope - math.log(gaussian_gamma(spec.sigma))
    return np.log(blanket_density_many(spec, ys))
