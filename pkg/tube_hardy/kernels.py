"""
Reproducing kernel of the Hardy-Sobolev space:

    K(z, w) = ∫_{Ω*} e^{i⟨z - w̄, ξ⟩} / w_n(ξ) dξ,   K_w = 𝓛k_w,  k_w(ξ) = e^{-i⟨w̄,ξ⟩}/w_n(ξ).

Each evaluation pair gets a rule for decay interior_depth(Im z + Im w) and
oscillation |Re z - Re w|, shared through the quadrature rule cache.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cone_geometry import Cone, require_interior
from .cone_quadrature import QuadratureRule, integrate, rule_for
from .errors import DimensionMismatch, NonFiniteIntegrand, NotInHalfPlane, ParameterMismatch
from .fourier_laplace import (
    Envelope,
    HSFunction,
    SpectralDensity,
    TubePoint,
    density_rule,
    evaluate,
    hs_function,
    hs_norm,
    multi_index,
)
from .gauge_weight import Weight

logger = logging.getLogger(__name__)

REL_ERR_FLOOR = 1e-300
# complex entries per broadcast block in kernel_matrix
MATRIX_CHUNK = 2 ** 22


@dataclass(frozen=True)
class KernelParams:
    weight: Weight
    target: Optional[float] = None

    @property
    def cone(self) -> Cone:
        return self.weight.cone

    def rule(self, y_sum: np.ndarray, x_diff: Optional[np.ndarray] = None, degree: int = 0) -> QuadratureRule:
        """Rule for decay interior_depth(y_sum) and oscillation |x_diff|"""
        return rule_for(
            self.cone,
            y_sum,
            x=x_diff,
            degree=degree,
            target=self.target,
            pole_distance=self.weight.pole_distance,
        )


def _check(params: KernelParams, *points: TubePoint) -> None:
    for point in points:
        if point.dim != params.cone.dim:
            raise DimensionMismatch(f"Tube point has dimension {point.dim}, cone has {params.cone.dim}")
        require_interior(params.cone, point.imag)


def _kernel_integral(params: KernelParams, z: TubePoint, w: TubePoint, factor=None, degree: int = 0) -> complex:
    shift = z.as_complex() - np.conj(w.as_complex())
    rule = params.rule(shift.imag, shift.real, degree)
    weight = params.weight

    def integrand(xi: np.ndarray) -> np.ndarray:
        values = np.exp(1j * (xi @ shift)) / weight(xi)
        if factor is not None:
            values = values * factor(xi)
        return values

    return integrate(rule, integrand)


def kernel_eval(params: KernelParams, z: TubePoint, w: TubePoint) -> complex:
    _check(params, z, w)
    return _kernel_integral(params, z, w)


def kernel_diag(params: KernelParams, z: TubePoint) -> float:
    """K(z, z) = ∫ e^{-2⟨y,ξ⟩}/w_n(ξ) dξ > 0"""
    _check(params, z)
    twice = 2 * z.imag
    rule = params.rule(twice, np.zeros(params.cone.dim))
    weight = params.weight
    value = integrate(rule, lambda xi: np.exp(-(xi @ twice)) / weight(xi))
    return float(value.real)


def kernel_halfplane_closed(z: complex, w: complex) -> complex:
    """Upper half-plane, n = 0: K(z, w) = i/(z - w̄)"""
    z, w = complex(z), complex(w)
    if not (z.imag > 0 and w.imag > 0):
        raise NotInHalfPlane(
            "Closed form needs Im z > 0 and Im w > 0",
            details={"z": [z.real, z.imag], "w": [w.real, w.imag]},
        )
    return 1j / (z - w.conjugate())


def kernel_derivative(params: KernelParams, alpha: Any, beta: Any, z: TubePoint, w: TubePoint) -> complex:
    """∂_z^α ∂_w̄^β K(z, w) = ∫ (iξ)^α (-iξ)^β e^{i⟨z - w̄,ξ⟩}/w_n(ξ) dξ"""
    _check(params, z, w)
    a = np.asarray(multi_index(alpha, params.cone.dim))
    b = np.asarray(multi_index(beta, params.cone.dim))

    def factor(xi: np.ndarray) -> np.ndarray:
        return np.prod((1j * xi) ** a * (-1j * xi) ** b, axis=1)

    return _kernel_integral(params, z, w, factor=factor, degree=int(a.sum() + b.sum()))


def kernel_density(params: KernelParams, w: TubePoint) -> SpectralDensity:
    """k_w(ξ) = e^{-i⟨w̄,ξ⟩}/w_n(ξ)"""
    _check(params, w)
    conj_w = np.conj(w.as_complex())
    weight = params.weight

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return np.exp(-1j * (xi @ conj_w)) / weight(xi)

    return SpectralDensity(
        evaluator=evaluator,
        envelope=Envelope(
            direction=w.y,
            frequency=float(np.linalg.norm(w.real)),
            pole_distance=weight.pole_distance,
        ),
        description=f"kernel(w={w.to_dict()})",
    )


def kernel_function(params: KernelParams, w: TubePoint) -> HSFunction:
    """K_w = 𝓛k_w, with ‖K_w‖² = K(w, w)"""
    return hs_function(kernel_density(params, w), params.weight, target=params.target)


def reproduce_check(function: HSFunction, w: TubePoint, params: Optional[KernelParams] = None) -> Tuple[complex, complex, float]:
    """
    lhs = F(w), rhs = ⟨F, K_w⟩ = ∫ f(ξ)·conj(k_w(ξ))·w_n(ξ) dξ, and their
    relative discrepancy.
    """
    params = params or KernelParams(weight=function.weight, target=function.target)
    if params.weight != function.weight:
        raise ParameterMismatch("Kernel and function live in different spaces")
    _check(params, w)

    lhs = evaluate(function, w)
    k_w = kernel_density(params, w)
    weight = params.weight
    density = function.density

    if density.is_atomic:
        freqs, coeffs = density.atoms
        rhs = complex(np.sum(coeffs * np.conj(k_w(freqs)) * weight(freqs))) if freqs.size else 0j
    else:
        # the rule F itself uses at w
        rule = density_rule(
            function.cone, [density], y=w.imag, x=w.real, target=function.target, rule=function.rule
        )
        rhs = integrate(rule, lambda xi: density(xi) * np.conj(k_w(xi)) * weight(xi))

    rel_err = abs(lhs - rhs) / max(abs(lhs), REL_ERR_FLOOR)
    return lhs, rhs, float(rel_err)


def kernel_matrix(params: KernelParams, rows: Sequence[TubePoint], cols: Sequence[TubePoint]) -> np.ndarray:
    """
    E_{ml} = K(rows_m, cols_l) for all pairs at once.

    Pairs are grouped by their (cached) quadrature rule and each group is
    one broadcast product of the rule weights against e^{i⟨ξ, z - w̄⟩}.
    """
    _check(params, *rows, *cols)
    dim = params.cone.dim
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)), dtype=complex)
    z = np.array([point.as_complex() for point in rows]).reshape(len(rows), dim)
    w = np.array([point.as_complex() for point in cols]).reshape(len(cols), dim)
    shifts = (z[:, None, :] - np.conj(w)[None, :, :]).reshape(-1, dim)

    groups: Dict[int, Tuple[QuadratureRule, List[int]]] = {}
    for index, shift in enumerate(shifts):
        rule = params.rule(shift.imag, shift.real)
        groups.setdefault(id(rule), (rule, []))[1].append(index)

    values = np.empty(shifts.shape[0], dtype=complex)
    for rule, indices in groups.values():
        scaled = rule.weights / params.weight(rule.nodes)
        step = max(1, MATRIX_CHUNK // rule.size)
        for start in range(0, len(indices), step):
            chunk = indices[start:start + step]
            values[chunk] = scaled @ np.exp(1j * (rule.nodes @ shifts[chunk].T))

    finite = np.isfinite(values)
    if not np.all(finite):
        raise NonFiniteIntegrand(
            "Kernel matrix has non-finite entries",
            details={"count": int(np.sum(~finite))},
        )
    logger.debug(f"Kernel matrix {len(rows)}x{len(cols)} over {len(groups)} quadrature rules")
    return values.reshape(len(rows), len(cols))


def gram_matrix(params: KernelParams, points: Sequence[TubePoint]) -> np.ndarray:
    """G_{jl} = K(w_l, w_j) = ⟨K_{w_j}, K_{w_l}⟩, Hermitian by construction"""
    upper = np.triu(kernel_matrix(params, points, points).T, 1)
    diagonal = np.array([kernel_diag(params, point) for point in points])
    return upper + upper.conj().T + np.diag(diagonal).astype(complex)


def point_evaluation_bound(params: KernelParams, function: HSFunction, z: TubePoint) -> float:
    """|F(z)| ≤ K(z,z)^{1/2}·‖F‖"""
    if params.weight != function.weight:
        raise ParameterMismatch("Kernel and function live in different spaces")
    return math.sqrt(kernel_diag(params, z)) * hs_norm(function)


def local_uniform_constant(params: KernelParams, points: Sequence[TubePoint]) -> float:
    """C_K = sqrt(max K(z,z)) over a compact set of points"""
    if not points:
        return 0.0
    return math.sqrt(max(kernel_diag(params, point) for point in points))
