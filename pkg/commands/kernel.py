import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Tuple

import click
import numpy as np
import pandas as pd

from tube_hardy.cone_geometry import ConeKind
from tube_hardy.cone_quadrature import rule_to_json
from tube_hardy.fourier_laplace import TubePoint, multi_index
from tube_hardy.kernels import (
    KernelParams,
    gram_matrix,
    kernel_derivative,
    kernel_halfplane_closed,
    local_uniform_constant,
)
from utils import Artifacts

from . import Experiment, execute, experiment_options, point_columns, tube_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelInputs:
    params: KernelParams
    points: List[TubePoint]
    derivatives: List[Tuple[Tuple[int, ...], Tuple[int, ...]]]


def prepare(experiment: Experiment) -> KernelInputs:
    config = experiment.config
    block = config.block("kernel")
    weight = config.build_weight()
    cone = weight.cone
    derivatives = []
    for pair in block.derivatives:
        if len(pair) != 2:
            raise ValueError(f"derivative entries are [alpha, beta] pairs, got {pair}")
        derivatives.append((multi_index(pair[0], cone.dim), multi_index(pair[1], cone.dim)))
    return KernelInputs(
        params=KernelParams(weight=weight, target=config.target),
        points=tube_points(cone, block.points),
        derivatives=derivatives,
    )


def _is_half_plane(params: KernelParams) -> bool:
    return params.cone.kind is ConeKind.ORTHANT and params.cone.dim == 1 and params.weight.order == 0


def compute(inputs: KernelInputs, artifacts: Artifacts) -> Dict[str, Any]:
    params, points = inputs.params, inputs.points
    gram = gram_matrix(params, points)

    rows = []
    closed_errors = []
    for j, z in enumerate(points):
        for l, w in enumerate(points):
            # G_{lj} = K(z_j, z_l)
            value = gram[l, j]
            rows.append({"j": j, "l": l, **point_columns("z", z), **point_columns("w", w), "re": value.real, "im": value.imag})
            if _is_half_plane(params):
                exact = kernel_halfplane_closed(complex(z.x[0], z.y[0]), complex(w.x[0], w.y[0]))
                closed_errors.append(abs(value - exact) / abs(exact))
    artifacts.csv("kernel.csv", pd.DataFrame(rows))

    # rule behind the diagonal entry K(z_0, z_0)
    rule = params.rule(2 * np.asarray(points[0].imag), np.zeros(params.cone.dim))
    artifacts.text("kernel_rule.json", rule_to_json(rule))

    derivatives = []
    for alpha, beta in inputs.derivatives:
        values = [kernel_derivative(params, alpha, beta, z, z) for z in points]
        derivatives.append({"alpha": list(alpha), "beta": list(beta), "diagonal": values})

    eigenvalues = np.linalg.eigvalsh(gram)
    report = {
        "points": len(points),
        "diagonal": [float(gram[j, j].real) for j in range(len(points))],
        "gram_min_eigenvalue": float(eigenvalues[0]),
        "gram_max_eigenvalue": float(eigenvalues[-1]),
        "local_uniform_constant": local_uniform_constant(params, points),
        "derivatives": derivatives,
        "rule_nodes": rule.size,
        "rule_est_rel_error": rule.est_rel_error,
    }
    if closed_errors:
        report["closed_form_max_rel_err"] = max(closed_errors)
    logger.info(f"Evaluated {len(rows)} kernel values")
    return report


@click.command("kernel")
@experiment_options
def kernel_command(**options):
    """Kernel values K(z_j, z_l) over the configured points."""
    execute("kernel", options, prepare, compute)
