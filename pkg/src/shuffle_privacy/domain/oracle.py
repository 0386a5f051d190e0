"""Domain record for one cell of the exact-oracle soundness sweep."""

from __future__ import annotations

from dataclasses import dataclass

SANDWICH_SLACK = 1e-12


@dataclass(frozen=True)
class OracleCell:
    """True divergence next to the bounds that must dominate it."""

    n: int
    k: int
    epsilon0: float
    epsilon: float
    exact: float
    mixture_exact: float
    hoeffding: float
    bennett: float

    @property
    def holds(self) -> bool:
        """exact <= mixture_exact <= {hoeffding, bennett} <= 1 up to SANDWICH_SLACK."""
        return (
            self.exact <= self.mixture_exact + SANDWICH_SLACK
            and self.mixture_exact <= self.hoeffding + SANDWICH_SLACK
            and self.mixture_exact <= self.bennett + SANDWICH_SLACK
            and max(self.hoeffding, self.bennett) <= 1.0
        )
