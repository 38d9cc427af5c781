import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import click
import pandas as pd

from tube_hardy.carleson import (
    DiscreteMeasure,
    carleson_report,
    measure_from_json,
    measure_from_list,
    spectral_embedding_check,
    testing_ratio,
)
from tube_hardy.densities import from_spec
from tube_hardy.fourier_laplace import SpectralDensity, TubePoint
from tube_hardy.kernels import KernelParams
from utils import Artifacts

from . import Experiment, execute, experiment_options, point_columns, tube_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CarlesonInputs:
    params: KernelParams
    measure: DiscreteMeasure
    frame: List[TubePoint]
    test_points: Optional[List[TubePoint]]
    densities: List[SpectralDensity]
    constant: Optional[float]


def prepare(experiment: Experiment) -> CarlesonInputs:
    config = experiment.config
    block = config.block("carleson")
    weight = config.build_weight()
    cone = weight.cone
    if block.measure.file is not None:
        measure = measure_from_json(block.measure.file, cone)
    else:
        measure = measure_from_list(cone, [point.model_dump() for point in block.measure.points])
    return CarlesonInputs(
        params=KernelParams(weight=weight, target=config.target),
        measure=measure,
        frame=tube_points(cone, block.frame),
        test_points=None if block.test_points is None else tube_points(cone, block.test_points),
        densities=[from_spec(spec.as_dict(), cone) for spec in block.densities],
        constant=block.constant,
    )


def compute(inputs: CarlesonInputs, artifacts: Artifacts) -> Dict[str, Any]:
    params, measure = inputs.params, inputs.measure
    report = carleson_report(params, measure, inputs.frame, inputs.test_points).to_dict()

    test_points = inputs.frame if inputs.test_points is None else inputs.test_points
    rows = [
        {"index": index, **point_columns("w", w), "ratio": testing_ratio(params, measure, w)}
        for index, w in enumerate(test_points)
    ]
    artifacts.csv("kernel_tests.csv", pd.DataFrame(rows))

    if inputs.densities:
        constant = inputs.constant if inputs.constant is not None else report["embedding_lower_bound"]
        check = spectral_embedding_check(params, measure, inputs.densities, constant)
        report["spectral_check"] = {"constant": constant, **check.to_dict()}
    logger.info(
        f"Carleson test over {measure.size} point masses: kernel sup {report['kernel_test_sup']:.6g}, "
        f"frame bound {report['embedding_lower_bound']:.6g}"
    )
    return report


@click.command("carleson")
@experiment_options
def carleson_command(**options):
    """Kernel-test and frame lower bounds for a discrete measure."""
    execute("carleson", options, prepare, compute)
