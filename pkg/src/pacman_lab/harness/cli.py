"""Command-line entry points.

    pacman-lab run --config experiment.cfg
    pacman-lab plan --domain domain.lp --seed 3 [--maxstamp 8] [--dump out.lp]
    pacman-lab serve --port 8000
    pacman-lab curves results/dir
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from .. import planner
from .config import load_config
from .experiment import run_experiment


@click.group()
def main():
    """Planner-actor-critic laboratory."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--output", default=None, help="override the config's output directory")
def run(config_path, output):
    """Run a configured experiment and write its result files."""
    config = load_config(config_path)
    out_dir = output or config.output
    if out_dir is None:
        raise click.UsageError("set output in the config or pass --output")
    curve = run_experiment(config, output=out_dir)
    tail = curve.mean[-min(50, len(curve.mean)):].mean()
    click.echo(f"wrote {out_dir}; mean return over final episodes: {tail:.3f}")


@main.command()
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--maxstamp", default=16, show_default=True, type=int)
@click.option("--dump", default=None, type=click.Path(), help="write the grounded timestamped problem")
def plan(domain_path, seed, maxstamp, dump):
    """One-shot planner run on a domain file with init/goal clauses; action
    availability is sampled from a uniform policy."""
    with open(domain_path, "r", encoding="utf-8") as fh:
        description, initial, goal = planner.parse_planning_file(fh.read())
    states = planner.reachable_states(description, initial)
    sampling = tuple(s for s in states if not s.satisfies(goal))
    problem = planner.PlanningProblem(
        initial, goal, description,
        planner.UniformPolicy(description.action_signature), sampling,
    )
    result = planner.solve(problem, maxstamp, np.random.default_rng(seed), dump=dump)
    if result is None:
        click.echo(f"no plan within maxstamp {maxstamp}")
        sys.exit(1)
    for step in result.steps:
        click.echo(f"{step.timestamp}: {step.action or '(skip)'}")
    terminal = ", ".join(f"{f}={v}" for f, v in sorted(result.terminal.assignment.items()))
    click.echo(f"terminal: {terminal}")
    if dump:
        click.echo(f"dump written to {dump}")


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(port, host):
    """Serve the trainer session API (websocket stream + feedback endpoint)."""
    import uvicorn

    from ..trainer_service import create_app

    uvicorn.run(create_app(), host=host, port=port)


@main.command()
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
def curves(directory):
    """Print the plot-ready aggregate curve of an experiment directory."""
    path = os.path.join(directory, "aggregate.csv")
    if not os.path.exists(path):
        raise click.UsageError(f"{directory} has no aggregate.csv")
    with open(path, "r", encoding="utf-8") as fh:
        click.echo(fh.read(), nl=False)


if __name__ == "__main__":
    main()
