"""Numeric calibration of epsilon (given eps0) or eps0 (given epsilon) by bisection."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

from shuffle_privacy.application.amplification import (
    EFMRTT_MAX_EPSILON0,
    check_efmrtt_validity,
    efmrtt_delta,
    efmrtt_epsilon,
    shuffled_delta,
)
from shuffle_privacy.application.errors import InfeasibleParametersError, PreconditionError
from shuffle_privacy.application.settings import (
    DEFAULT_BISECTION,
    DEFAULT_MIXTURE,
    BisectionSettings,
    MixtureSettings,
)
from shuffle_privacy.domain.privacy import (
    AmplificationMethod,
    BoundKind,
    CalibrationResult,
    CertifiedBy,
    PrivacyBudget,
)

LOGGER = logging.getLogger(__name__)


def calibrate_epsilon(
    method: AmplificationMethod,
    *,
    epsilon0: float,
    n: int,
    delta: float,
    k: int | None = None,
    settings: BisectionSettings = DEFAULT_BISECTION,
    mixture: MixtureSettings = DEFAULT_MIXTURE,
) -> CalibrationResult:
    """Smallest epsilon whose bound is at most delta, clamped to eps0.

    The shuffled mechanism is always eps0-DP by post-processing, so eps0 is returned with
    certified_by=clamp when the bound cannot certify anything smaller.
    """
    _check_delta(delta)
    if epsilon0 < 0:
        raise PreconditionError(f"epsilon0 must be >= 0, got {epsilon0}.")

    if method.kind is BoundKind.EFMRTT:
        value = efmrtt_epsilon(epsilon0, n, delta)
        # Rounding can leave efmrtt_delta(value) a few ulps above delta.
        while value < epsilon0 and efmrtt_delta(value, epsilon0, n) > delta:
            value = math.nextafter(value, math.inf)
        if value >= epsilon0:
            return _clamped(method, n, epsilon0, delta, settings)
        return _completed(method, n, CalibrationResult(value, CertifiedBy.AMPLIFICATION, 0.0, 0))

    def bound(epsilon: float) -> float:
        return shuffled_delta(method, epsilon, epsilon0, n, k, settings=mixture)

    if epsilon0 <= settings.lower or bound(epsilon0) > delta:
        return _clamped(method, n, epsilon0, delta, settings)
    if bound(settings.lower) <= delta:
        result = CalibrationResult(settings.lower, CertifiedBy.AMPLIFICATION, 0.0, 0)
        return _completed(method, n, result)

    value, width, iterations = _bisect(
        lambda epsilon: bound(epsilon) <= delta,
        feasible=epsilon0,
        infeasible=settings.lower,
        settings=settings,
    )
    result = CalibrationResult(value, CertifiedBy.AMPLIFICATION, width, iterations)
    return _completed(method, n, result)


def calibrate_epsilon0(
    method: AmplificationMethod,
    *,
    budget: PrivacyBudget,
    n: int,
    k: int | None = None,
    settings: BisectionSettings = DEFAULT_BISECTION,
    mixture: MixtureSettings = DEFAULT_MIXTURE,
) -> CalibrationResult:
    """Largest eps0 whose shuffled n-party mechanism the method certifies (eps, delta)-DP.

    eps0 = budget.epsilon is always admissible (certified_by=clamp), so the result never
    falls below the target.
    """
    _check_delta(budget.delta)
    target = budget.epsilon

    if method.kind is BoundKind.EFMRTT:
        check_efmrtt_validity(0.0, n, budget.delta)
        # Inverse of 12 eps0 sqrt(ln(1/delta)/n), kept strictly inside the validity region.
        candidate = target / (12.0 * math.sqrt(math.log(1.0 / budget.delta) / n))
        candidate = min(candidate, math.nextafter(EFMRTT_MAX_EPSILON0, 0.0))
        while candidate > target and efmrtt_delta(target, candidate, n) > budget.delta:
            candidate = math.nextafter(candidate, 0.0)
        if candidate <= target:
            return _clamped(method, n, target, budget.delta, settings)
        return _completed(
            method, n, CalibrationResult(candidate, CertifiedBy.AMPLIFICATION, 0.0, 0)
        )

    def bound(epsilon0: float) -> float:
        return shuffled_delta(method, target, epsilon0, n, k, settings=mixture)

    upper = max(settings.epsilon0_upper, target)
    if bound(upper) <= budget.delta:
        return _completed(method, n, CalibrationResult(upper, CertifiedBy.AMPLIFICATION, 0.0, 0))
    if bound(target) > budget.delta and not settings.clamp:
        raise InfeasibleParametersError(
            f"No eps0 >= {target} is certified by {method.name} at n={n}.",
            reason="bound exceeds delta at eps0 = epsilon",
        )

    value, width, iterations = _bisect(
        lambda epsilon0: bound(epsilon0) <= budget.delta,
        feasible=target,
        infeasible=upper,
        settings=settings,
    )
    certified_by = (
        CertifiedBy.AMPLIFICATION if bound(value) <= budget.delta else CertifiedBy.CLAMP
    )
    if certified_by is CertifiedBy.CLAMP:
        LOGGER.warning(
            "event=calibration_clamped method=%s n=%s epsilon0=%.17g delta=%.17g",
            method.name,
            n,
            value,
            budget.delta,
        )
    return _completed(method, n, CalibrationResult(value, certified_by, width, iterations))


def _bisect(
    is_feasible: Callable[[float], bool],
    *,
    feasible: float,
    infeasible: float,
    settings: BisectionSettings,
) -> tuple[float, float, int]:
    """Shrink [feasible, infeasible] (either order) and return the feasible end."""
    iterations = 0
    while abs(infeasible - feasible) > settings.tolerance and iterations < settings.max_iterations:
        midpoint = 0.5 * (feasible + infeasible)
        if midpoint in (feasible, infeasible):
            break
        if is_feasible(midpoint):
            feasible = midpoint
        else:
            infeasible = midpoint
        iterations += 1
    width = abs(infeasible - feasible)
    if width > settings.tolerance:
        LOGGER.warning(
            "event=bisection_unconverged width=%.3g iterations=%s tolerance=%.3g",
            width,
            iterations,
            settings.tolerance,
        )
    return feasible, width, iterations


def _clamped(
    method: AmplificationMethod,
    n: int,
    epsilon0: float,
    delta: float,
    settings: BisectionSettings,
) -> CalibrationResult:
    if not settings.clamp:
        raise InfeasibleParametersError(
            f"{method.name} cannot certify any epsilon below eps0={epsilon0} "
            f"at n={n}, delta={delta}.",
            reason="bound exceeds delta at epsilon = eps0",
        )
    LOGGER.warning(
        "event=calibration_clamped method=%s n=%s epsilon0=%.17g delta=%.17g",
        method.name,
        n,
        epsilon0,
        delta,
    )
    return _completed(method, n, CalibrationResult(epsilon0, CertifiedBy.CLAMP, 0.0, 0))


def _completed(method: AmplificationMethod, n: int, result: CalibrationResult) -> CalibrationResult:
    LOGGER.debug(
        "event=calibration_completed method=%s n=%s value=%.17g certified_by=%s "
        "bracket_width=%.3g iterations=%s",
        method.name,
        n,
        result.value,
        result.certified_by.value,
        result.bracket_width,
        result.iterations,
    )
    return result


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise PreconditionError(f"delta must lie in (0, 1), got {delta}.")
