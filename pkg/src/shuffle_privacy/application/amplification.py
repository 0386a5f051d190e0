"""Privacy amplification bounds delta(epsilon) for the shuffled mechanism."""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import special, stats

from shuffle_privacy.application.blanket import profile_generic, profile_krr, profile_laplace
from shuffle_privacy.application.errors import BoundValidityError, PreconditionError
from shuffle_privacy.application.settings import DEFAULT_MIXTURE, MixtureSettings
from shuffle_privacy.domain.blanket import BlanketProfile
from shuffle_privacy.domain.privacy import AmplificationMethod, BoundKind, MechanismFamily

PerMBound = Callable[[NDArray[np.int64]], NDArray[np.float64]]

HOEFFDING_CONSTANT = 1.0 - math.exp(-2.0)
EFMRTT_MAX_EPSILON0 = 0.5
EFMRTT_MIN_PARTIES = 1000
EFMRTT_MAX_DELTA = 0.01
_CHUNK = 1_000_000


def hoeffding_clipped_expectation(
    m: int, a: float, b: float, b_plus: float | None = None
) -> float:
    """Bound on E[L_1 + ... + L_m]_+ for i.i.d. L_i with mean -a and range width b.

    With b_plus given the trivial bound m * b_plus caps the result.
    """
    return float(hoeffding_clipped_expectation_many(np.asarray([m]), a, b, b_plus)[0])


def hoeffding_clipped_expectation_many(
    ms: ArrayLike, a: float, b: float, b_plus: float | None = None
) -> NDArray[np.float64]:
    counts = np.asarray(ms, dtype=np.float64)
    if a <= 0:
        raise PreconditionError(f"a must be > 0 (epsilon > 0), got {a}.")
    if b < 0:
        raise PreconditionError(f"Range width b must be >= 0, got {b}.")
    if b == 0 or (b_plus is not None and b_plus <= 0):
        return np.zeros(counts.shape)
    values = b * b / (4.0 * a) * np.exp(-2.0 * counts * a * a / (b * b))
    if b_plus is not None:
        values = np.minimum(values, counts * b_plus)
    return values


def bennett_clipped_expectation(
    m: int, a: float, b_plus: float, c2: float, *, cap: bool = True
) -> float:
    """Bound on E[L_1 + ... + L_m]_+ from Bennett's inequality.

    Uses the mean -a, the upper end b_plus of the range and the second-moment bound c2.
    """
    return float(bennett_clipped_expectation_many(np.asarray([m]), a, b_plus, c2, cap=cap)[0])


def bennett_clipped_expectation_many(
    ms: ArrayLike, a: float, b_plus: float, c2: float, *, cap: bool = True
) -> NDArray[np.float64]:
    counts = np.asarray(ms, dtype=np.float64)
    if a <= 0:
        raise PreconditionError(f"a must be > 0 (epsilon > 0), got {a}.")
    if c2 <= 0:
        raise PreconditionError(f"Second-moment bound c2 must be > 0, got {c2}.")
    if b_plus <= 0:
        return np.zeros(counts.shape)
    u = a * b_plus / c2
    log_u = math.log1p(u)
    phi = (1.0 + u) * log_u - u
    values = b_plus / (a * counts * log_u) * np.exp(-(counts * c2 / (b_plus * b_plus)) * phi)
    if cap:
        values = np.minimum(values, counts * b_plus)
    return values


def delta_mixture(
    n: int,
    gamma: float,
    per_m: PerMBound,
    *,
    tail_envelope: Callable[[int], float] | None = None,
    settings: MixtureSettings = DEFAULT_MIXTURE,
) -> float:
    """(1 / gamma n) sum_m Binom(n, gamma)(m) per_m(m), clamped to [0, 1].

    Above settings.exact_sum_limit parties only the window of +-window_sigmas standard
    deviations around n gamma is summed; tails are charged mass times tail_envelope, a
    nonincreasing function dominating per_m from its argument onwards (per_m itself when
    omitted).
    """
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}.")
    if not 0 < gamma <= 1:
        raise PreconditionError(f"gamma must lie in (0, 1], got {gamma}.")
    envelope = tail_envelope or (lambda m: float(per_m(np.asarray([m], dtype=np.int64))[0]))

    if n <= settings.exact_sum_limit:
        lo, hi = 1, n
    else:
        spread = settings.window_sigmas * math.sqrt(n * gamma * (1.0 - gamma))
        lo = max(1, math.floor(n * gamma - spread))
        hi = min(n, math.ceil(n * gamma + spread))

    log_terms: list[float] = []
    for start in range(lo, hi + 1, _CHUNK):
        ms = np.arange(start, min(hi, start + _CHUNK - 1) + 1, dtype=np.int64)
        values = per_m(ms)
        positive = values > 0
        if np.any(positive):
            log_weights = stats.binom.logpmf(ms[positive], n, gamma)
            log_terms.append(float(special.logsumexp(log_weights + np.log(values[positive]))))
    if lo > 1:
        left = envelope(1)
        if left > 0:
            log_terms.append(float(stats.binom.logcdf(lo - 1, n, gamma)) + math.log(left))
    if hi < n:
        right = envelope(hi + 1)
        if right > 0:
            log_terms.append(float(stats.binom.logsf(hi, n, gamma)) + math.log(right))

    if not log_terms:
        return 0.0
    log_delta = float(special.logsumexp(log_terms)) - math.log(gamma * n)
    return _clamp_unit(math.exp(min(log_delta, 0.0)))


def delta_hoeffding_closed(n: int, profile: BlanketProfile) -> float:
    """Closed form of the Hoeffding mixture without the m * b_plus cap."""
    if profile.a <= 0:
        raise PreconditionError("Profile a must be > 0 (epsilon > 0).")
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}.")
    if profile.b_plus <= 0:
        return 0.0
    a, b, gamma = profile.a, profile.b, profile.gamma
    s = 2.0 * a * a / (b * b)
    if gamma >= 1.0:
        log_base = -s
        blanket_only = 1.0
    else:
        log_base = math.log1p(gamma * math.expm1(-s))
        # Drops the m = 0 term (1 - gamma)^n of the binomial identity.
        blanket_only = -math.expm1(n * (math.log1p(-gamma) - log_base))
    if blanket_only <= 0.0:
        return 0.0
    log_delta = (
        math.log(b * b / (4.0 * a))
        - math.log(gamma * n)
        + n * log_base
        + math.log(blanket_only)
    )
    return _clamp_unit(math.exp(min(log_delta, 0.0)))


def delta_hoeffding_mixture(
    n: int, profile: BlanketProfile, *, settings: MixtureSettings = DEFAULT_MIXTURE
) -> float:
    if profile.a <= 0:
        raise PreconditionError("Profile a must be > 0 (epsilon > 0).")
    if profile.b_plus <= 0:
        return 0.0
    return delta_mixture(
        n,
        profile.gamma,
        lambda ms: hoeffding_clipped_expectation_many(ms, profile.a, profile.b, profile.b_plus),
        tail_envelope=lambda m: hoeffding_clipped_expectation(m, profile.a, profile.b),
        settings=settings,
    )


def delta_bennett_mixture(
    n: int, profile: BlanketProfile, *, settings: MixtureSettings = DEFAULT_MIXTURE
) -> float:
    if profile.a <= 0:
        raise PreconditionError("Profile a must be > 0 (epsilon > 0).")
    if profile.b_plus <= 0:
        return 0.0
    return delta_mixture(
        n,
        profile.gamma,
        lambda ms: bennett_clipped_expectation_many(ms, profile.a, profile.b_plus, profile.c2),
        tail_envelope=lambda m: bennett_clipped_expectation(
            m, profile.a, profile.b_plus, profile.c2, cap=False
        ),
        settings=settings,
    )


def delta_theorem_simplified(epsilon: float, epsilon0: float, n: int) -> float:
    """Closed-form generic bound with C = 1 - e^-2, evaluated in log space."""
    if epsilon <= 0 or epsilon0 <= 0:
        raise PreconditionError("epsilon and epsilon0 must be > 0.")
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}.")
    log_sum = math.log(math.exp(epsilon) + 1.0)
    # log(e^eps0 - e^-eps0)
    log_spread = epsilon0 + math.log(-math.expm1(-2.0 * epsilon0))
    log_prefactor = 2.0 * (log_sum + log_spread) - math.log(4.0 * n) - math.log(math.expm1(epsilon))
    log_t = 2.0 * (math.log(math.expm1(epsilon)) - log_sum - log_spread)
    rate = min(math.exp(-epsilon0), math.exp(log_t))
    return _clamp_unit(math.exp(min(log_prefactor - HOEFFDING_CONSTANT * n * rate, 0.0)))


def efmrtt_epsilon(epsilon0: float, n: int, delta: float) -> float:
    """Baseline amplification 12 eps0 sqrt(ln(1/delta) / n)."""
    check_efmrtt_validity(epsilon0, n, delta)
    return 12.0 * epsilon0 * math.sqrt(math.log(1.0 / delta) / n)


def efmrtt_delta(epsilon: float, epsilon0: float, n: int) -> float:
    """Inverse of efmrtt_epsilon in delta; 1 where the baseline certifies nothing."""
    check_efmrtt_validity(epsilon0, n)
    if epsilon0 == 0:
        return 0.0
    delta = math.exp(-n * (epsilon / (12.0 * epsilon0)) ** 2)
    return delta if delta < EFMRTT_MAX_DELTA else 1.0


def mechanism_profile(
    mechanism: MechanismFamily, epsilon0: float, epsilon: float, k: int | None = None
) -> BlanketProfile:
    """Blanket profile of L for one mechanism family at (eps0, eps)."""
    if mechanism is MechanismFamily.KRR:
        if k is None:
            raise PreconditionError("Randomized response bounds need the domain size k.")
        return profile_krr(k, epsilon0, epsilon)
    if mechanism is MechanismFamily.LAPLACE:
        return profile_laplace(epsilon0, epsilon)
    return profile_generic(epsilon0, epsilon)


def shuffled_delta(
    method: AmplificationMethod,
    epsilon: float,
    epsilon0: float,
    n: int,
    k: int | None = None,
    *,
    settings: MixtureSettings = DEFAULT_MIXTURE,
) -> float:
    """delta certified by one bound variant for the n-party shuffled mechanism at epsilon."""
    if epsilon <= 0:
        return 1.0
    if method.kind is BoundKind.EFMRTT:
        return efmrtt_delta(epsilon, epsilon0, n)
    if epsilon0 == 0:
        return 0.0
    if method.kind is BoundKind.THEOREM_SIMPLIFIED:
        return delta_theorem_simplified(epsilon, epsilon0, n)
    profile = mechanism_profile(method.mechanism, epsilon0, epsilon, k)
    if method.kind is BoundKind.HOEFFDING_CLOSED:
        return delta_hoeffding_closed(n, profile)
    if method.kind is BoundKind.HOEFFDING_MIXTURE:
        return delta_hoeffding_mixture(n, profile, settings=settings)
    return delta_bennett_mixture(n, profile, settings=settings)


def check_efmrtt_validity(epsilon0: float, n: int, delta: float | None = None) -> None:
    """Raise BoundValidityError naming the first violated hypothesis of the baseline bound."""
    if not 0 <= epsilon0 < EFMRTT_MAX_EPSILON0:
        raise BoundValidityError(
            f"The baseline bound requires ε₀ < 1/2, got {epsilon0}.", condition="ε₀ < 1/2"
        )
    if n < EFMRTT_MIN_PARTIES:
        raise BoundValidityError(
            f"The baseline bound requires n ≥ 1000, got {n}.", condition="n ≥ 1000"
        )
    if delta is not None and not 0 < delta < EFMRTT_MAX_DELTA:
        raise BoundValidityError(
            f"The baseline bound requires δ < 1/100, got {delta}.", condition="δ < 1/100"
        )


def _clamp_unit(value: float) -> float:
    return min(1.0, max(0.0, value))
