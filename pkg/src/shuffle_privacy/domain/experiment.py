"""Domain records for Monte Carlo experiments."""

from __future__ import annotations

from dataclasses import dataclass
from shuffle_privacy._compat import StrEnum

from shuffle_privacy.domain.privacy import CertifiedBy
from shuffle_privacy.domain.summation import SummationParams


class InputDistribution(StrEnum):
    """Generators for per-party inputs in [0, 1]."""

    CONSTANT = "constant"
    GRID = "grid"
    UNIFORM = "uniform"
    TWO_POINT = "two-point"


@dataclass(frozen=True)
class InputGenerator:
    """Input distribution descriptor; value is used by CONSTANT only."""

    distribution: InputDistribution
    value: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError("Constant input value must lie in [0, 1].")


@dataclass(frozen=True)
class ExperimentReport:
    """Aggregated squared error and bias of repeated protocol runs."""

    trials: int
    empirical_mse: float
    empirical_bias: float
    bias_stderr: float
    theoretical_bound: float
    seed: int
    params: SummationParams


@dataclass(frozen=True)
class LMoments:
    """Sample statistics of the privacy amplification variable."""

    samples: int
    mean: float
    second_moment: float
    min_seen: float
    max_seen: float
    mean_stderr: float
    second_moment_stderr: float


@dataclass(frozen=True)
class SweepRow:
    """One calibrated (n, method) cell as written to CSV."""

    n: int
    epsilon0: float
    epsilon: float
    delta: float
    method: str
    gamma: float
    certified_by: CertifiedBy

    def as_row(self) -> tuple[int | float | str, ...]:
        return (
            self.n,
            self.epsilon0,
            self.epsilon,
            self.delta,
            self.method,
            self.gamma,
            self.certified_by.value,
        )


SWEEP_COLUMNS = ("n", "epsilon0", "epsilon", "delta", "method", "gamma", "certified_by")
