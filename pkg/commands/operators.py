import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List

import click
import numpy as np

from tube_hardy.densities import from_spec
from tube_hardy.fourier_laplace import HSFunction, TubePoint, hs_function
from tube_hardy.kernels import KernelParams
from tube_hardy.operators import (
    Symbol,
    TranslationMap,
    contraction_norms,
    multiplier_adjoint_check,
    multiplier_pointwise_check,
    symbol_apply,
    symbol_from_spec,
    translation_map,
    wco_adjoint_check,
    wco_necessary_ratio,
)
from utils import Artifacts

from . import Experiment, execute, experiment_options, tube_points

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OperatorInputs:
    params: KernelParams
    symbol: Symbol
    translation: TranslationMap
    tests: List[HSFunction]
    points: List[TubePoint]


def prepare(experiment: Experiment) -> OperatorInputs:
    config = experiment.config
    block = config.block("operators")
    weight = config.build_weight()
    cone = weight.cone
    shift = np.asarray(block.translation.re, dtype=float) + 1j * np.asarray(block.translation.im, dtype=float)
    return OperatorInputs(
        params=KernelParams(weight=weight, target=config.target),
        symbol=symbol_from_spec(block.symbol.model_dump(exclude_none=True), cone),
        translation=translation_map(cone, shift),
        tests=[hs_function(from_spec(spec.as_dict(), cone), weight, target=config.target) for spec in block.densities],
        points=tube_points(cone, block.points),
    )


def compute(inputs: OperatorInputs, artifacts: Artifacts) -> Dict[str, Any]:
    symbol, translation = inputs.symbol, inputs.translation
    constants = [symbol_apply(test, symbol)[1] for test in inputs.tests]
    # constants bound ‖ψF‖²/‖F‖²
    norm_bound = math.sqrt(max(constants))

    points = []
    for w in inputs.points:
        points.append({
            **w.to_dict(),
            "adjoint_error": wco_adjoint_check(symbol, translation, w, inputs.tests),
            "multiplier_adjoint_error": max(multiplier_adjoint_check(test, symbol, w) for test in inputs.tests),
            "necessary_ratio": wco_necessary_ratio(inputs.params, symbol, translation, w),
        })

    contraction = []
    for test in inputs.tests:
        image_norm, norm = contraction_norms(test, translation)
        contraction.append({"density": test.density.description, "norm": norm, "composed_norm": image_norm})

    pointwise = multiplier_pointwise_check(symbol, norm_bound, inputs.points)
    logger.info(f"Checked {symbol.to_dict()['kind']} symbol with b={translation.to_dict()} at {len(points)} points")
    return {
        "symbol": symbol.to_dict(),
        "translation": translation.to_dict(),
        "multiplier_constants": constants,
        "pointwise": pointwise.to_dict(),
        "points": points,
        "max_adjoint_error": max(p["adjoint_error"] for p in points),
        "max_necessary_ratio": max(p["necessary_ratio"] for p in points),
        "contraction": contraction,
    }


@click.command("operators")
@experiment_options
def operators_command(**options):
    """Adjoint identities and kernel ratios for a multiplier/translation pair."""
    execute("operators", options, prepare, compute)
