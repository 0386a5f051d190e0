"""Numeric tunables for bisection, mixture sums, the oracle and the simulator."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class BisectionSettings:
    """Bracket and stopping rule for calibration by bisection."""

    lower: float = 1e-6
    epsilon0_upper: float = 20.0
    tolerance: float = 1e-12
    max_iterations: int = 200
    clamp: bool = True

    def __post_init__(self) -> None:
        if self.lower <= 0:
            raise ValueError("lower must be > 0")
        if self.epsilon0_upper <= self.lower:
            raise ValueError("epsilon0_upper must be > lower")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class MixtureSettings:
    """Evaluation strategy for binomial mixtures over the blanket count m."""

    exact_sum_limit: int = 10**7
    window_sigmas: float = 12.0

    def __post_init__(self) -> None:
        if self.exact_sum_limit < 1:
            raise ValueError("exact_sum_limit must be >= 1")
        if self.window_sigmas <= 0:
            raise ValueError("window_sigmas must be > 0")


@dataclass(frozen=True)
class OracleSettings:
    """Caps for exact enumeration."""

    max_parties: int = 10
    max_histograms: int = 2_000_000
    max_blanket_samples: int = 10**4

    def __post_init__(self) -> None:
        if self.max_parties < 1:
            raise ValueError("max_parties must be >= 1")
        if self.max_histograms < 1:
            raise ValueError("max_histograms must be >= 1")
        if self.max_blanket_samples < 1:
            raise ValueError("max_blanket_samples must be >= 1")


@dataclass(frozen=True)
class SimulationSettings:
    """Concurrency of Monte Carlo trials."""

    max_workers: int = 1

    def __post_init__(self) -> None:
        if self.max_workers < 1:
            raise ValueError("max_workers must be >= 1")


DEFAULT_BISECTION = BisectionSettings()
DEFAULT_MIXTURE = MixtureSettings()
DEFAULT_ORACLE = OracleSettings()
DEFAULT_SIMULATION = SimulationSettings()
