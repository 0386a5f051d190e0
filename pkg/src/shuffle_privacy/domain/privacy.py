"""Domain contracts for privacy budgets, bound methods and calibration results."""

from __future__ import annotations

from dataclasses import dataclass
from shuffle_privacy._compat import StrEnum

from pydantic import BaseModel, ConfigDict, Field


class PrivacyBudget(BaseModel):
    """Central (epsilon, delta) guarantee of the shuffled mechanism."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    epsilon: float = Field(gt=0, allow_inf_nan=False)
    delta: float = Field(gt=0, le=1, allow_inf_nan=False)


class BoundKind(StrEnum):
    """How delta(epsilon) is bounded for the shuffled mechanism."""

    HOEFFDING_CLOSED = "hoeffding-closed"
    HOEFFDING_MIXTURE = "hoeffding-mixture"
    BENNETT_MIXTURE = "bennett-mixture"
    THEOREM_SIMPLIFIED = "theorem-simplified"
    EFMRTT = "efmrtt"


class MechanismFamily(StrEnum):
    """Which local randomizer information the bound may use."""

    GENERIC = "generic"
    KRR = "rr"
    LAPLACE = "laplace"


class CertifiedBy(StrEnum):
    """Why a calibrated value is a valid guarantee."""

    AMPLIFICATION = "amplification"
    CLAMP = "clamp"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class AmplificationMethod:
    """A bound kind applied with one mechanism's blanket profile."""

    kind: BoundKind
    mechanism: MechanismFamily

    @property
    def name(self) -> str:
        for name, method in METHODS_BY_NAME.items():
            if method == self:
                return name
        return f"{self.kind.value}/{self.mechanism.value}"

    @property
    def needs_domain_size(self) -> bool:
        return self.mechanism is MechanismFamily.KRR

    @classmethod
    def from_name(cls, name: str) -> AmplificationMethod:
        method = METHODS_BY_NAME.get(name.strip().lower())
        if method is None:
            raise ValueError(
                f"Unknown method {name!r}; expected one of {', '.join(METHODS_BY_NAME)}."
            )
        return method


METHODS_BY_NAME: dict[str, AmplificationMethod] = {
    "efmrtt": AmplificationMethod(BoundKind.EFMRTT, MechanismFamily.GENERIC),
    "hoeffding-generic": AmplificationMethod(
        BoundKind.THEOREM_SIMPLIFIED, MechanismFamily.GENERIC
    ),
    "bennett-generic": AmplificationMethod(BoundKind.BENNETT_MIXTURE, MechanismFamily.GENERIC),
    "hoeffding-rr": AmplificationMethod(BoundKind.HOEFFDING_CLOSED, MechanismFamily.KRR),
    "bennett-rr": AmplificationMethod(BoundKind.BENNETT_MIXTURE, MechanismFamily.KRR),
    "hoeffding-laplace": AmplificationMethod(
        BoundKind.HOEFFDING_CLOSED, MechanismFamily.LAPLACE
    ),
    "bennett-laplace": AmplificationMethod(BoundKind.BENNETT_MIXTURE, MechanismFamily.LAPLACE),
}


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of solving a bound for epsilon or epsilon0."""

    value: float
    certified_by: CertifiedBy
    bracket_width: float
    iterations: int
