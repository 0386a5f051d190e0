"""Domain contract for privacy amplification variable profiles."""

from __future__ import annotations

import math
from shuffle_privacy._compat import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

_RELATIVE_SLACK = 1e-9


class ProfileSource(StrEnum):
    """Randomizer family the range and second-moment bounds were derived for."""

    GENERIC = "generic"
    KRR = "krr"
    LAPLACE = "laplace"


class BlanketProfile(BaseModel):
    """Mean, range and second moment of the amplification variable L at one epsilon.

    The mean of L is exactly -a = 1 - e^epsilon; b_minus <= L <= b_plus and E[L^2] <= c2.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(gt=0, le=1, allow_inf_nan=False)
    a: float = Field(ge=0, allow_inf_nan=False)
    b_minus: float = Field(allow_inf_nan=False)
    b_plus: float = Field(allow_inf_nan=False)
    c2: float = Field(ge=0, allow_inf_nan=False)
    epsilon: float = Field(ge=0, allow_inf_nan=False)
    source: ProfileSource

    @property
    def b(self) -> float:
        """Width of the range of L."""
        return self.b_plus - self.b_minus

    @property
    def mean(self) -> float:
        return -self.a

    @model_validator(mode="after")
    def validate_moments(self) -> BlanketProfile:
        mean = -self.a
        slack = _RELATIVE_SLACK * max(1.0, abs(self.b_minus), abs(self.b_plus))
        if not self.b_minus - slack <= mean <= self.b_plus + slack:
            raise ValueError(
                f"Mean {mean:.6g} lies outside range [{self.b_minus:.6g}, {self.b_plus:.6g}]."
            )
        if self.c2 < self.a**2 - _RELATIVE_SLACK * max(1.0, self.a**2):
            raise ValueError(
                f"Second moment bound {self.c2:.6g} is below squared mean {self.a**2:.6g}."
            )
        if not math.isclose(self.a, math.expm1(self.epsilon), rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("Profile field a must equal e^epsilon - 1.")
        return self
