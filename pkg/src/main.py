# --------------------------------------------------
# main.py
# --------------------------------------------------
# Ponto de entrada da CLI `horolab`
#
# - Um grupo click com um subcomando por experimento
# - Cada subcomando monta um RunConfig e chama runner.run
# - Erros de invariante (HorolabError) viram um registro JSON em stderr
#   e o código de saída da classe (2 uso, 3 resolução, 4 IO, 5 contrato)
# - Sem --out, o relatório JSON vai para stdout
# --------------------------------------------------

import logging
import sys
from typing import Any, Callable, Optional

import click
from pydantic import ValidationError

from src.errors import HorolabError
from src.runner import EXAMPLE_IDS, RunConfig, list_experiments, render, run
from src.utils.fingerprint import canonical_json
from src.utils.logging_config import configure_logging

log = logging.getLogger("horolab.main")

USAGE_EXIT = 2


def _fail(record: dict, code: int) -> None:
    click.echo(canonical_json(record), err=True)
    sys.exit(code)


def _execute(experiment: str, **options: Any) -> None:
    """Valida a configuração, roda e traduz o resultado em saída + código."""
    try:
        config = RunConfig(experiment=experiment, **{k: v for k, v in options.items() if v is not None})
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "config"
        _fail({"error": "ValidationError", "invariant": field, "detail": first["msg"], "exit_code": USAGE_EXIT}, USAGE_EXIT)
    try:
        result = run(config)
    except HorolabError as exc:
        log.error("run failed experiment=%s error=%s", experiment, exc.detail)
        _fail(exc.to_record(), exc.exit_code)
    if config.out is None:
        click.echo(render(result))
    else:
        for path in result.written:
            click.echo(path, err=True)
    if result.exit_code:
        _fail({"failures": [f.model_dump(mode="json") for f in result.failures]}, result.exit_code)


def common_options(func: Callable) -> Callable:
    """--p --n-max --tol --seed --format --out, compartilhadas por todos os experimentos."""
    options = [
        click.option("--p", "p", type=float, default=None, help="Expoente do espaço L_p."),
        click.option("--n-max", "n_max", type=int, default=None, help="Maior n do cronograma dobrado."),
        click.option("--tol", type=float, default=None, help="Tolerância dos checks exatos."),
        click.option("--seed", type=int, default=None, help="Semente dos sorteios."),
        click.option("--format", "format", type=click.Choice(["csv", "json", "both"]), default=None),
        click.option("--out", type=click.Path(dir_okay=False), default=None, help="Prefixo dos arquivos de saída."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.option("--log-level", default=None, help="Sobrescreve HOROLAB_LOG_LEVEL.")
def cli(log_level: Optional[str]) -> None:
    """Laboratório de funcionais métricos em L_p([0,1])."""
    configure_logging(log_level)


@cli.command("list")
def list_command() -> None:
    """Catálogo de experimentos (ordem estável)."""
    click.echo(canonical_json([e.model_dump() for e in list_experiments()], indent=2))


@cli.command("examples")
@click.option("--which", type=click.Choice([*EXAMPLE_IDS, "all"]), default="all")
@click.option("--g", "g", default=None, help="Âncora g (JSON de StepFunction) do exemplo de fuga.")
@common_options
def examples_command(**options: Any) -> None:
    _execute("examples", **options)


@cli.command("converse")
@click.option("--mixture", default=None, help="Mistura atômica (JSON) a realizar.")
@common_options
def converse_command(**options: Any) -> None:
    _execute("converse", **options)


@cli.command("lp-witness")
@click.option("--zeta", "g", default=None, help="Densidade dual ζ (JSON de StepFunction).")
@common_options
def lp_witness_command(**options: Any) -> None:
    _execute("lp-witness", **options)


@cli.command("ergodic")
@click.option("--operator", default=None, help="scale:λ | identity | doubling | exchange:m:π | condexp:d | mix:w@op+w@(mix:...)")
@click.option("--g", "g", default=None, help="Termo afim g (JSON de StepFunction).")
@common_options
def ergodic_command(**options: Any) -> None:
    _execute("ergodic", **options)


@cli.command("alspach")
@click.option("--depth", type=int, default=None, help="Nível diádico dos candidatos 2·1_A.")
@click.option("--random-pairs", "random_pairs", type=int, default=None)
@click.option("--sample", type=int, default=None, help="Sorteia candidatos (obrigatório acima da profundidade 4).")
@common_options
def alspach_command(**options: Any) -> None:
    _execute("alspach", **options)


def main() -> None:
    cli()


if __name__ == "__main__":
    main()
