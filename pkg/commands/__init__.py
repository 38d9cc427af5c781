"""
One module per CLI subcommand, registered on the click group by
``app.create_app``.

Every command runs in two phases: ``prepare`` turns the config into
library inputs (any failure is a config error, exit 2) and ``compute``
runs the numerics and stages artifacts (any library failure is a
numerical failure, exit 3). Artifacts are written only after both
phases succeed.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from tube_hardy.config import ExperimentConfig, load_config
from tube_hardy.errors import CommandFailure, ConfigInvalid, NumericalFailure, TubeHardyError
from tube_hardy.fourier_laplace import tube_point
from utils import Artifacts, render_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Experiment:
    name: str
    config: ExperimentConfig
    out_dir: Path
    seed: int
    tol: float


EXPERIMENT_OPTIONS = (
    click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True, help="Experiment config (JSON)."),
    click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Output directory."),
    click.option("--seed", type=int, default=None, help="Seed override for random sampling."),
    click.option("--tol", type=float, default=None, help="Tolerance override (split residual, checks)."),
)


def experiment_options(command: Callable) -> Callable:
    """--config/--out/--seed/--tol, shared by every subcommand"""
    for option in reversed(EXPERIMENT_OPTIONS):
        command = option(command)
    return command


def _experiment(name: str, config_path: str, out_dir: Optional[str], seed: Optional[int], tol: Optional[float]) -> Experiment:
    config = load_config(config_path)
    if tol is not None and not tol > 0:
        raise ConfigInvalid(f"--tol must be positive, got {tol}")
    out = Path(out_dir or config.out or Path(config_path).resolve().parent / "out")
    return Experiment(
        name=name,
        config=config,
        out_dir=out,
        seed=config.seed if seed is None else seed,
        tol=config.tol if tol is None else tol,
    )


def _fail(error: CommandFailure) -> None:
    logger.error(f"{error.module}: {error.message}")
    click.echo(render_json(error.to_dict(), strict=False), nl=False)
    click.get_current_context().exit(error.exit_code)


def execute(
    name: str,
    options: Dict[str, Any],
    prepare: Callable[[Experiment], Any],
    compute: Callable[[Any, Artifacts], Dict[str, Any]],
) -> Dict[str, Any]:
    try:
        experiment = _experiment(name, **options)
        inputs = prepare(experiment)
    except CommandFailure as e:
        _fail(e)
    except TubeHardyError as e:
        _fail(ConfigInvalid.wrap(e))
    except (KeyError, TypeError, ValueError) as e:
        _fail(ConfigInvalid(f"Invalid {name} block: {e!r}"))

    artifacts = Artifacts(experiment.out_dir)
    try:
        report = compute(inputs, artifacts)
        text = artifacts.json(f"{name}.json", report)
    except CommandFailure as e:
        _fail(e)
    except TubeHardyError as e:
        _fail(NumericalFailure.wrap(e))
    except ValueError as e:
        _fail(NumericalFailure(f"{name} produced an unwritable report: {e}"))

    artifacts.commit()
    logger.info(f"{name}: wrote {', '.join(artifacts.names)} to {experiment.out_dir}")
    click.echo(text, nl=False)
    return report


def tube_points(cone, specs) -> list:
    return [tube_point(cone, spec.x, spec.y) for spec in specs]


def point_columns(prefix: str, point) -> Dict[str, float]:
    columns = {f"{prefix}_x_{a}": v for a, v in enumerate(point.x)}
    columns.update({f"{prefix}_y_{a}": v for a, v in enumerate(point.y)})
    return columns
