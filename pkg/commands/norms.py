import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import click
import numpy as np

from tube_hardy.cone_geometry import require_interior
from tube_hardy.densities import from_spec
from tube_hardy.fourier_laplace import (
    HSFunction,
    TubePoint,
    derivative_constant,
    derivative_norm,
    evaluate,
    h2_sup_norm,
    hs_function,
    hs_norm,
    multi_index,
    translate_norm,
)
from tube_hardy.kernels import KernelParams, point_evaluation_bound
from utils import Artifacts

from . import Experiment, execute, experiment_options, tube_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormsInputs:
    function: HSFunction
    alphas: List[Tuple[int, ...]]
    heights: List[np.ndarray]
    points: List[TubePoint]


def prepare(experiment: Experiment) -> NormsInputs:
    config = experiment.config
    block = config.block("norms")
    weight = config.build_weight()
    cone = weight.cone
    density = from_spec(block.density.as_dict(), cone)
    heights = [np.asarray(y, dtype=float) for y in block.heights]
    for y in heights:
        require_interior(cone, y)
    return NormsInputs(
        function=hs_function(density, weight, target=config.target),
        alphas=[multi_index(alpha, cone.dim) for alpha in block.alphas],
        heights=heights,
        points=tube_points(cone, block.points),
    )


def compute(inputs: NormsInputs, artifacts: Artifacts) -> Dict[str, Any]:
    function = inputs.function
    norm = hs_norm(function)

    derivatives = []
    for alpha in inputs.alphas:
        entry: Dict[str, Any] = {"alpha": list(alpha), "norm": derivative_norm(function, alpha)}
        if sum(alpha) <= function.order:
            entry["constant"] = derivative_constant(function, alpha)
            entry["bound"] = entry["constant"] * norm
        derivatives.append(entry)

    translates = [
        {
            "y": y.tolist(),
            "spectral": translate_norm(function, y),
            "physical": translate_norm(function, y, physical=True),
        }
        for y in inputs.heights
    ]

    params = KernelParams(weight=function.weight, target=function.target)
    values = [
        {
            **point.to_dict(),
            "value": evaluate(function, point),
            "bound": point_evaluation_bound(params, function, point),
        }
        for point in inputs.points
    ]

    logger.info(f"Computed norms of {function.density.description} at order {function.order}")
    return {
        "density": function.density.description,
        "order": function.order,
        "hs_norm": norm,
        "h2_sup_norm": h2_sup_norm(function),
        "derivatives": derivatives,
        "translates": translates,
        "values": values,
    }


@click.command("norms")
@experiment_options
def norms_command(**options):
    """Hardy-Sobolev, H² and derivative norms of a catalogue density."""
    execute("norms", options, prepare, compute)
