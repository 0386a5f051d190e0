"""Domain contract for summation protocol parameters."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from shuffle_privacy.domain.randomizer import SummationSpec


class SummationParams(BaseModel):
    """Public parameters (c, k, n) shared by the randomizer and the analyzer."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    c: float = Field(ge=0, allow_inf_nan=False)
    k: int = Field(ge=1)
    n: int = Field(ge=2)

    @property
    def gamma(self) -> float:
        """Probability that one party replies from the uniform blanket."""
        return self.c * (self.k + 1) / self.n

    @model_validator(mode="after")
    def validate_gamma(self) -> SummationParams:
        if self.gamma >= 1:
            raise ValueError(
                f"gamma = c(k+1)/n must be < 1, got {self.gamma:.6g} "
                f"(c={self.c:.6g}, k={self.k}, n={self.n})."
            )
        return self

    def randomizer_spec(self) -> SummationSpec:
        """Local randomizer each party runs under these parameters."""
        return SummationSpec(c=self.c, k=self.k, n=self.n)
