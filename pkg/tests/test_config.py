import pytest
from pydantic import ValidationError

from src.config import Settings
from src.errors import BudgetError, ContractError, HorolabError, ReportIOError, UnknownExperimentError
from src.utils.fingerprint import body_hash, canonical_json


# 1) Variáveis HOROLAB_* sobrescrevem os padrões
def test_settings_read_prefixed_environment(monkeypatch):
    monkeypatch.setenv("HOROLAB_MAX_BREAKPOINTS", "1024")
    monkeypatch.setenv("HOROLAB_LOG_LEVEL", "debug")
    fresh = Settings()
    assert fresh.MAX_BREAKPOINTS == 1024
    assert fresh.LOG_LEVEL == "debug"
    assert fresh.CERTIFICATE_MAX_DEPTH == 4


# 2) Valores fora do intervalo são rejeitados
def test_settings_validate_ranges(monkeypatch):
    monkeypatch.setenv("HOROLAB_ZERO_TAU_RATIO", "1.5")
    with pytest.raises(ValidationError):
        Settings()


# 3) Cada classe de erro carrega código de saída e invariante
@pytest.mark.parametrize(
    "error, code",
    [(ContractError, 5), (BudgetError, 3), (ReportIOError, 4), (UnknownExperimentError, 2)],
)
def test_error_records(error, code):
    record = error("boom").to_record()
    assert record["error"] == error.__name__
    assert record["exit_code"] == code
    assert record["detail"] == "boom"


def test_error_invariant_override():
    exc = ContractError("x", invariant="weights >= 0")
    assert isinstance(exc, HorolabError)
    assert exc.to_record()["invariant"] == "weights >= 0"
    assert ContractError("y").invariant == "contract"


# 4) Fingerprint não depende da ordem das chaves
def test_fingerprint_ignores_key_order():
    assert body_hash({"a": 1, "b": [1.5, 2]}) == body_hash({"b": [1.5, 2], "a": 1})
    assert canonical_json({"b": 1, "a": 2}) == '{"a": 2, "b": 1}'
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})
