import json

from pydantic import TypeAdapter, ValidationError

from src.errors import ContractError, StepFunctionError
from src.functionals.base import MetricFunctional
from src.functionals.internal import InternalFunctional
from src.functionals.l1_form import L1Form
from src.functionals.lp_forms import LpFinite, LpLinear
from src.schemas import (
    FunctionalModel,
    InternalModel,
    L1FormModel,
    LpFiniteModel,
    LpLinearModel,
    StepFunctionModel,
)
from src.space.interval_space import StepFunction

_functional_adapter = TypeAdapter(FunctionalModel)


def functional_to_json(h: MetricFunctional) -> str:
    return json.dumps(h.to_dict(), sort_keys=True)


def functional_from_dict(data: dict) -> MetricFunctional:
    try:
        model = _functional_adapter.validate_python(data)
    except ValidationError as exc:
        raise ContractError(f"invalid functional: {exc.errors()[0]['msg']}", invariant="functional schema") from exc
    if isinstance(model, InternalModel):
        return InternalFunctional(model.g.to_domain(), model.p)
    if isinstance(model, L1FormModel):
        return L1Form(model.xi.to_domain())
    if isinstance(model, LpFiniteModel):
        return LpFinite(model.xi.to_domain(), model.c, model.p)
    assert isinstance(model, LpLinearModel)
    return LpLinear(model.zeta.to_domain(), model.p)


def functional_from_json(text: str) -> MetricFunctional:
    return functional_from_dict(json.loads(text))


def step_function_to_json(f: StepFunction) -> str:
    # json do stdlib escreve floats com repr: ida e volta exata
    return json.dumps(f.to_dict())


def step_function_from_json(text: str) -> StepFunction:
    try:
        model = StepFunctionModel.model_validate_json(text)
    except ValidationError as exc:
        raise StepFunctionError(f"invalid step function JSON: {exc.errors()[0]['msg']}") from exc
    return model.to_domain()
