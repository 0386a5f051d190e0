"""Domain contracts for local randomizer specifications."""

from __future__ import annotations

from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

Message = int | float


class KRRSpec(BaseModel):
    """k-ary randomized response on symbols 1..k with local budget epsilon0."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["krr"] = "krr"
    k: int = Field(ge=2)
    epsilon0: float = Field(ge=0, allow_inf_nan=False)


class LaplaceSpec(BaseModel):
    """Laplace mechanism x + Lap(1/epsilon0) on inputs in [0, 1]."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["laplace"] = "laplace"
    epsilon0: float = Field(gt=0, allow_inf_nan=False)


class GaussianSpec(BaseModel):
    """Gaussian mechanism x + N(0, sigma^2) on inputs in [0, 1]."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["gaussian"] = "gaussian"
    sigma: float = Field(gt=0, allow_inf_nan=False)


class SummationSpec(BaseModel):
    """Fixed-point summation randomizer over messages 0..k.

    c = 0 disables the blanket entirely (non-private baseline).
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["summation"] = "summation"
    c: float = Field(ge=0, allow_inf_nan=False)
    k: int = Field(ge=1)
    n: int = Field(ge=1)

    @property
    def gamma(self) -> float:
        return self.c * (self.k + 1) / self.n

    @model_validator(mode="after")
    def validate_blanket_probability(self) -> SummationSpec:
        if self.gamma >= 1:
            raise ValueError(
                f"Blanket probability c(k+1)/n must be < 1, got {self.gamma:.6g}."
            )
        return self


RandomizerSpec = Annotated[
    KRRSpec | LaplaceSpec | GaussianSpec | SummationSpec,
    Field(discriminator="kind"),
]
