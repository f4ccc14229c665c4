#scripts/make_step_function.py
# Gera o JSON de uma StepFunction para usar em --g / --zeta da CLI
#
#   python scripts/make_step_function.py rademacher 3
#   python scripts/make_step_function.py dyadic 0.75 0.25
#   python scripts/make_step_function.py k-point 4 --seed 7

import sys
from pathlib import Path

import click
import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from src.experiments.alspach import random_k_point  # noqa: E402
from src.functionals.codec import step_function_to_json  # noqa: E402
from src.space.interval_space import dyadic_step, rademacher  # noqa: E402


@click.group()
def cli():
    pass


@cli.command("rademacher")
@click.argument("n", type=int)
def rademacher_command(n):
    click.echo(step_function_to_json(rademacher(n)))


@cli.command("dyadic")
@click.argument("values", type=float, nargs=-1, required=True)
def dyadic_command(values):
    # um valor por célula diádica (2^m valores)
    click.echo(step_function_to_json(dyadic_step(values)))


@cli.command("k-point")
@click.argument("level", type=int)
@click.option("--seed", type=int, default=0)
def k_point_command(level, seed):
    click.echo(step_function_to_json(random_k_point(np.random.default_rng(seed), level).f))


if __name__ == "__main__":
    cli()
