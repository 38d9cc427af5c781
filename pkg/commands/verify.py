import logging
from dataclasses import dataclass
from typing import Any, Dict, List

import click

from tube_hardy.config import VerifyBlock
from tube_hardy.errors import ConfigInvalid
from tube_hardy.verify import PROPERTIES, run_suite
from utils import Artifacts

from . import Experiment, execute, experiment_options

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerifyInputs:
    seed: int
    names: List[str]
    cases: int


def prepare(experiment: Experiment) -> VerifyInputs:
    block = experiment.config.verify or VerifyBlock()
    names = list(PROPERTIES) if block.properties is None else block.properties
    unknown = [name for name in names if name not in PROPERTIES]
    if unknown:
        raise ConfigInvalid(
            f"Unknown properties: {', '.join(unknown)}",
            details={"available": list(PROPERTIES)},
        )
    return VerifyInputs(seed=experiment.seed, names=names, cases=block.cases)


def compute(inputs: VerifyInputs, artifacts: Artifacts) -> Dict[str, Any]:
    results = run_suite(inputs.seed, inputs.names, inputs.cases)
    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.warning(f"{len(failed)} of {len(results)} properties failed: {', '.join(failed)}")
    else:
        logger.info(f"All {len(results)} properties passed")
    return {
        "seed": inputs.seed,
        "passed": not failed,
        "failed": failed,
        "properties": [result.to_dict() for result in results],
    }


@click.command("verify")
@experiment_options
@click.pass_context
def verify_command(ctx, **options):
    """Run the invariant suite; exit 3 if any property fails."""
    report = execute("verify", options, prepare, compute)
    if not report["passed"]:
        ctx.exit(3)
