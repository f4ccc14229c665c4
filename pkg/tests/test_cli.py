import json

import pytest
from click.testing import CliRunner

from src.main import cli
from src.repositories.report_repository import load_report


@pytest.fixture
def runner():
    return CliRunner()


def _last_record(stderr: str) -> dict:
    return json.loads(stderr.strip().splitlines()[-1])


# 1) Catálogo em ordem estável
def test_list_experiments(runner):
    result = runner.invoke(cli, ["list"])
    assert result.exit_code == 0
    names = [e["name"] for e in json.loads(result.stdout)]
    assert names == ["examples", "converse", "lp-witness", "ergodic", "alspach"]


# 2) Certificado exaustivo na profundidade 3: 70 candidatos
def test_alspach_depth_three(runner):
    result = runner.invoke(cli, ["alspach", "--depth", "3", "--random-pairs", "20"])
    assert result.exit_code == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["passed"] is True
    certificate = body["result"]["certificate"]
    assert certificate["candidate_count"] == 70
    assert certificate["certified"] is True


# 3) Esperança condicional trivial: τ = E g = ½
def test_ergodic_condexp(runner):
    result = runner.invoke(cli, ["ergodic", "--operator", "condexp:0", "--p", "2", "--n-max", "64"])
    assert result.exit_code == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["result"]["escape"]["upper_bound"] == pytest.approx(0.5, abs=1e-4)
    assert body["result"]["degenerate_direction"] is False


# 4) Exemplo de picos
def test_examples_spike(runner):
    result = runner.invoke(cli, ["examples", "--which", "spike", "--n-max", "64"])
    assert result.exit_code == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["experiment"] == "examples"
    assert set(body["result"]) == {"spike", "tightness"}
    assert all(c["passed"] for c in body["checks"])


# 5) Profundidade acima do orçamento exaustivo
def test_alspach_budget_error(runner):
    result = runner.invoke(cli, ["alspach", "--depth", "6"])
    assert result.exit_code == 3
    record = _last_record(result.stderr)
    assert record["error"] == "BudgetError"
    assert record["exit_code"] == 3


# 6) Configuração inválida
def test_invalid_n_max_is_usage_error(runner):
    result = runner.invoke(cli, ["examples", "--n-max", "1"])
    assert result.exit_code == 2
    record = _last_record(result.stderr)
    assert record["error"] == "ValidationError"
    assert record["invariant"] == "n_max"


def test_unknown_command_is_usage_error(runner):
    result = runner.invoke(cli, ["bogus"])
    assert result.exit_code == 2


# 7) Operador mal formado viola o contrato
@pytest.mark.parametrize("operator", ["rotate:1", "scale:2", "condexp:x"])
def test_bad_operator_is_contract_error(runner, operator):
    result = runner.invoke(cli, ["ergodic", "--operator", operator, "--n-max", "16"])
    assert result.exit_code == 5
    assert _last_record(result.stderr)["error"] == "ContractError"


def test_bad_mixture_is_contract_error(runner):
    result = runner.invoke(cli, ["converse", "--mixture", '{"atoms": [{"tag": "finite", "r": 0}], "weights": [0.5]}'])
    assert result.exit_code == 5
    assert _last_record(result.stderr)["invariant"] == "mixture is probability"


def test_bad_step_function_is_contract_error(runner):
    result = runner.invoke(cli, ["examples", "--which", "escape", "--g", "not json", "--n-max", "8"])
    assert result.exit_code == 5
    assert _last_record(result.stderr)["error"] == "StepFunctionError"


# 8) --out grava JSON + CSV determinísticos
def test_out_writes_deterministic_reports(runner, tmp_path):
    prefix = tmp_path / "rademacher"
    args = ["examples", "--which", "rademacher", "--n-max", "16", "--out", str(prefix)]
    first = runner.invoke(cli, args)
    assert first.exit_code == 0, first.stderr
    assert first.stdout == ""
    json_bytes = (tmp_path / "rademacher.json").read_bytes()
    csv_bytes = (tmp_path / "rademacher.csv").read_bytes()
    second = runner.invoke(cli, args)
    assert second.exit_code == 0
    assert (tmp_path / "rademacher.json").read_bytes() == json_bytes
    assert (tmp_path / "rademacher.csv").read_bytes() == csv_bytes

    body = load_report(prefix)
    assert body["experiment"] == "examples"
    assert body["config"]["which"] == "rademacher"
    assert csv_bytes.decode().splitlines()[0] == "experiment,n,test_id,h_n,h_limit,abs_err"


def test_format_json_skips_csv(runner, tmp_path):
    prefix = tmp_path / "converse"
    result = runner.invoke(cli, ["converse", "--n-max", "32", "--format", "json", "--out", str(prefix)])
    assert result.exit_code == 0, result.stderr
    assert (tmp_path / "converse.json").exists()
    assert not (tmp_path / "converse.csv").exists()


def test_lp_witness_runs_with_default_zeta(runner):
    result = runner.invoke(cli, ["lp-witness", "--p", "3", "--n-max", "64"])
    assert result.exit_code == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["result"]["p"] == 3.0


def test_lp_witness_with_moving_zeta_reports_decomposition(runner):
    zeta = '{"breakpoints": [0.0, 0.5, 1.0], "values": [0.5, -0.25]}'
    result = runner.invoke(cli, ["lp-witness", "--p", "2", "--n-max", "256", "--zeta", zeta])
    assert result.exit_code == 0, result.stderr
    body = json.loads(result.stdout)
    assert body["passed"] is True
    assert body["result"]["alignment"] == 15
    assert {r["n"] for r in body["result"]["decomposition"]} == {2, 4, 8, 16, 32, 64, 128, 256}
