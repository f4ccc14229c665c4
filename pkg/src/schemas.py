# --------------------------------------------------
# src/schemas.py
# --------------------------------------------------
# Modelos Pydantic de entrada/saída (JSON)
# - Validam o formato antes de construir os tipos de domínio
# - Os tipos de domínio (StepFunction, Eta, ...) ficam livres de pydantic
# --------------------------------------------------

from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.space.interval_space import StepFunction
from src.space.rbar_measures import AtomicMeasure, Eta, RandomMeasureField


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class StepFunctionModel(_Frozen):
    breakpoints: List[float] = Field(min_length=2)
    values: List[float] = Field(min_length=1)

    @model_validator(mode="after")
    def _shape(self):
        if len(self.breakpoints) != len(self.values) + 1:
            raise ValueError("breakpoints must have one more entry than values")
        return self

    def to_domain(self) -> StepFunction:
        return StepFunction(self.breakpoints, self.values)

    @classmethod
    def from_domain(cls, f: StepFunction) -> "StepFunctionModel":
        return cls(**f.to_dict())


class EtaModel(_Frozen):
    tag: Literal["finite", "+inf", "-inf"]
    r: Optional[float] = None

    @model_validator(mode="after")
    def _finite_has_r(self):
        if (self.tag == "finite") != (self.r is not None):
            raise ValueError("r is required for finite eta and forbidden at infinity")
        return self

    def to_domain(self) -> Eta:
        return Eta.from_dict(self.model_dump(exclude_none=True))


class AtomicMeasureModel(_Frozen):
    atoms: List[EtaModel]
    weights: List[Annotated[float, Field(ge=0)]]

    @model_validator(mode="after")
    def _aligned(self):
        if len(self.atoms) != len(self.weights):
            raise ValueError("atoms and weights must align")
        return self

    def to_domain(self) -> AtomicMeasure:
        return AtomicMeasure([(a.to_domain(), w) for a, w in zip(self.atoms, self.weights)])


class RandomMeasureFieldModel(_Frozen):
    breakpoints: List[float] = Field(min_length=2)
    cell_measures: List[AtomicMeasureModel] = Field(min_length=1)

    def to_domain(self) -> RandomMeasureField:
        return RandomMeasureField(self.breakpoints, [m.to_domain() for m in self.cell_measures])


# --------------------------------------------------
# Funcionais: união discriminada pelo campo "variant"
# --------------------------------------------------
class InternalModel(_Frozen):
    variant: Literal["internal"]
    g: StepFunctionModel
    p: float = Field(ge=1)


class L1FormModel(_Frozen):
    variant: Literal["l1"]
    xi: RandomMeasureFieldModel


class LpFiniteModel(_Frozen):
    variant: Literal["lp_finite"]
    xi: RandomMeasureFieldModel
    c: float = Field(ge=0)
    p: float = Field(gt=1)


class LpLinearModel(_Frozen):
    variant: Literal["lp_linear"]
    zeta: StepFunctionModel
    p: float = Field(gt=1)


FunctionalModel = Annotated[
    Union[InternalModel, L1FormModel, LpFiniteModel, LpLinearModel],
    Field(discriminator="variant"),
]
