"""
Discrete Carleson-measure testing.

For μ = Σ_m μ_m δ_{z_m} the embedding J_μ: H → L²(μ) is tested two ways:

    kernel test          Σ_m μ_m |K(z_m, w)|² / K(w, w)
    frame compression    largest λ with M v = λ G v on span{K_{w_j}}

Both are lower bounds for ‖J_μ‖²; no sufficiency is claimed.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .cone_geometry import Cone
from .errors import GramIllConditioned, MeasureInvalid, ParameterMismatch
from .fourier_laplace import HSFunction, SpectralDensity, TubePoint, evaluate, hs_function, hs_norm, tube_point
from .kernels import KernelParams, gram_matrix, kernel_diag, kernel_matrix

logger = logging.getLogger(__name__)

REGULARISATION = 1e-12
MAX_CONDITION = 1e12
VIOLATION_SLACK = 1e-10


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    points: Tuple[TubePoint, ...]
    masses: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.points)

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return discrete_measure(self.points, self.masses * factor)

    def __add__(self, other: "DiscreteMeasure") -> "DiscreteMeasure":
        return discrete_measure(self.points + other.points, np.concatenate([self.masses, other.masses]))

    def to_list(self) -> List[Dict[str, Any]]:
        return [{**point.to_dict(), "mass": float(mass)} for point, mass in zip(self.points, self.masses)]


def discrete_measure(points: Sequence[TubePoint], masses: Sequence[float]) -> DiscreteMeasure:
    values = np.asarray(masses, dtype=float).reshape(-1).copy()
    if values.shape[0] != len(points):
        raise MeasureInvalid(f"{len(points)} points but {values.shape[0]} masses")
    if not np.all(np.isfinite(values) & (values > 0)):
        raise MeasureInvalid("Point masses must be positive", details={"masses": values.tolist()})
    values.setflags(write=False)
    return DiscreteMeasure(points=tuple(points), masses=values)


def measure_from_list(cone: Cone, items: Sequence[Mapping[str, Any]]) -> DiscreteMeasure:
    """[{"x": [..], "y": [..], "mass": m}, ...]; every point must lie in T_Ω"""
    try:
        points = [tube_point(cone, item["x"], item["y"]) for item in items]
        masses = [float(item["mass"]) for item in items]
    except (KeyError, TypeError) as e:
        raise MeasureInvalid(f"Measure entries need x, y and mass: {e}")
    return discrete_measure(points, masses)


def measure_from_json(path: Union[str, Path], cone: Cone) -> DiscreteMeasure:
    with open(path) as handle:
        return measure_from_list(cone, json.load(handle))


def _kernel_columns(params: KernelParams, measure: DiscreteMeasure, frame: Sequence[TubePoint]) -> np.ndarray:
    """E_{mj} = K(z_m, w_j)"""
    return kernel_matrix(params, measure.points, frame)


def testing_ratio(params: KernelParams, measure: DiscreteMeasure, w: TubePoint) -> float:
    """Σ_m μ_m |K_w(z_m)|² / K(w, w)"""
    values = kernel_matrix(params, measure.points, [w])[:, 0]
    return float(np.sum(measure.masses * np.abs(values) ** 2) / kernel_diag(params, w))


def embedding_matrices(
    params: KernelParams,
    measure: DiscreteMeasure,
    frame: Sequence[TubePoint],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    M_{jl} = Σ_m μ_m K_{w_j}(z_m)·conj(K_{w_l}(z_m)) and the frame Gram
    matrix G_{jl} = K(w_l, w_j).
    """
    if not frame:
        raise MeasureInvalid("Frame must contain at least one point")
    columns = _kernel_columns(params, measure, frame)
    compressed = columns.T @ (measure.masses[:, None] * np.conj(columns))
    return compressed, gram_matrix(params, frame)


def embedding_estimate(params: KernelParams, measure: DiscreteMeasure, frame: Sequence[TubePoint]) -> float:
    """Norm of T_μ compressed to span{K_{w_j}}: a lower bound for ‖J_μ‖²"""
    compressed, gram = embedding_matrices(params, measure, frame)
    size = gram.shape[0]
    epsilon = REGULARISATION * float(np.trace(gram).real) / size
    regularised = gram + epsilon * np.eye(size)

    condition = float(np.linalg.cond(regularised))
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise GramIllConditioned(
            f"Frame Gram matrix has condition number {condition:.3e}; shrink or spread the frame",
            details={"condition": condition, "frame_size": size},
        )
    if condition > 1e8:
        logger.warning(f"Frame Gram matrix is poorly conditioned (cond={condition:.3e})")

    eigenvalues = linalg.eigh(compressed, regularised, eigvals_only=True)
    return max(float(eigenvalues[-1]), 0.0)


def carleson_form(measure: DiscreteMeasure, first: HSFunction, second: HSFunction) -> complex:
    """B_μ(F, G) = Σ_m μ_m F(z_m)·conj(G(z_m))"""
    if first.weight != second.weight:
        raise ParameterMismatch("Carleson form needs functions in the same space")
    total = 0j
    for z, mass in zip(measure.points, measure.masses):
        total += mass * evaluate(first, z) * np.conj(evaluate(second, z))
    return complex(total)


@dataclass(frozen=True)
class EmbeddingCheck:
    lhs: Tuple[float, ...]
    rhs: Tuple[float, ...]
    ratios: Tuple[float, ...]
    violations: Tuple[int, ...]

    @property
    def max_ratio(self) -> float:
        return max(self.ratios, default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lhs": list(self.lhs),
            "rhs": list(self.rhs),
            "ratios": list(self.ratios),
            "max_ratio": self.max_ratio,
            "violations": list(self.violations),
        }


def spectral_embedding_check(
    params: KernelParams,
    measure: DiscreteMeasure,
    densities: Sequence[SpectralDensity],
    constant: float,
) -> EmbeddingCheck:
    """Σ μ_m |𝓛f(z_m)|² against C·‖f‖² for each density"""
    if not constant > 0:
        raise MeasureInvalid(f"Candidate constant must be positive, got {constant}")
    lhs, rhs, ratios, violations = [], [], [], []
    for index, density in enumerate(densities):
        function = hs_function(density, params.weight, target=params.target)
        mass = float(sum(m * abs(evaluate(function, z)) ** 2 for z, m in zip(measure.points, measure.masses)))
        bound = constant * hs_norm(function) ** 2
        ratio = mass / bound if bound > 0 else 0.0
        if mass > bound * (1 + VIOLATION_SLACK):
            violations.append(index)
        lhs.append(mass)
        rhs.append(bound)
        ratios.append(ratio)
    if violations:
        logger.info(f"Embedding inequality with C={constant:.6g} fails for densities {violations}")
    return EmbeddingCheck(tuple(lhs), tuple(rhs), tuple(ratios), tuple(violations))


@dataclass(frozen=True)
class CarlesonReport:
    kernel_test_sup: float
    embedding_lower_bound: float
    frame_size: int
    measure_size: int
    test_points: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel_test_sup": self.kernel_test_sup,
            "embedding_lower_bound": self.embedding_lower_bound,
            "frame_size": self.frame_size,
            "measure_size": self.measure_size,
            "test_points": self.test_points,
        }


def carleson_report(
    params: KernelParams,
    measure: DiscreteMeasure,
    frame: Sequence[TubePoint],
    test_points: Optional[Sequence[TubePoint]] = None,
) -> CarlesonReport:
    """Kernel-test sup over test_points (the frame by default) and the frame lower bound"""
    test_points = list(frame) if test_points is None else list(test_points)
    kernel_sup = max((testing_ratio(params, measure, w) for w in test_points), default=0.0)
    bound = embedding_estimate(params, measure, frame)
    logger.debug(f"Carleson report: kernel test {kernel_sup:.6g}, frame bound {bound:.6g}")
    return CarlesonReport(
        kernel_test_sup=kernel_sup,
        embedding_lower_bound=bound,
        frame_size=len(frame),
        measure_size=measure.size,
        test_points=len(test_points),
    )
