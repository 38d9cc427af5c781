import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List

import click
import numpy as np
import pandas as pd

from tube_hardy.boundary_decomposition import (
    BinSet,
    BoundaryGrid,
    analyze_grid,
    boundary_limit_error,
    grid_from_csv,
    grid_from_dict,
    grid_from_json,
    norm_identity_report,
    split_spectrum,
)
from tube_hardy.cone_geometry import require_interior
from tube_hardy.gauge_weight import Weight
from utils import Artifacts

from . import Experiment, execute, experiment_options

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DecomposeInputs:
    grid: BoundaryGrid
    weight: Weight
    tol: float
    heights: List[np.ndarray]
    bins_csv: bool


def prepare(experiment: Experiment) -> DecomposeInputs:
    config = experiment.config
    block = config.block("decompose")
    weight = config.build_weight()
    if block.grid is not None:
        grid = grid_from_dict(block.grid.model_dump(exclude_none=True))
    elif Path(block.grid_file).suffix == ".csv":
        grid = grid_from_csv(block.grid_file, block.period)
    else:
        grid = grid_from_json(block.grid_file)

    heights = []
    for height in block.heights:
        y = np.asarray(height, dtype=float)
        require_interior(weight.cone, y)
        heights.append(y)
    return DecomposeInputs(grid=grid, weight=weight, tol=experiment.tol, heights=heights, bins_csv=block.bins_csv)


def _bin_rows(part: str, bins: BinSet) -> List[Dict[str, Any]]:
    rows = []
    for k, xi, b in zip(bins.bins, bins.frequencies, bins.coefficients):
        row: Dict[str, Any] = {f"bin_{a}": int(v) for a, v in enumerate(k)}
        row.update({f"xi_{a}": float(v) for a, v in enumerate(xi)})
        row.update({"re": b.real, "im": b.imag, "part": part})
        rows.append(row)
    return rows


def compute(inputs: DecomposeInputs, artifacts: Artifacts) -> Dict[str, Any]:
    cone = inputs.weight.cone
    split = split_spectrum(analyze_grid(inputs.grid), cone, inputs.tol)
    identity = norm_identity_report(inputs.grid, cone, inputs.weight, inputs.tol)

    limits = []
    for y in inputs.heights:
        limits.append({
            "y": y.tolist(),
            "plus": boundary_limit_error(split, inputs.grid, y, side=1),
            "minus": boundary_limit_error(split, inputs.grid, -y, side=-1),
        })

    if inputs.bins_csv:
        rows = _bin_rows("plus", split.plus) + _bin_rows("minus", split.minus) + _bin_rows("residual", split.residual)
        artifacts.csv("bins.csv", pd.DataFrame(rows))

    report = identity.to_dict()
    report.update({
        "relative_defect": identity.relative_defect,
        "total_energy": split.total_energy,
        "plus_bins": int(split.plus.bins.shape[0]),
        "minus_bins": int(split.minus.bins.shape[0]),
        "boundary_limit_errors": limits,
    })
    logger.info(f"Decomposed a {inputs.grid.dim}D grid with N={inputs.grid.points_per_axis}, defect {identity.defect:.3e}")
    return report


@click.command("decompose")
@experiment_options
def decompose_command(**options):
    """Split periodic boundary data into T_Ω and T_{-Ω} parts."""
    execute("decompose", options, prepare, compute)
