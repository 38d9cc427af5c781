"""
Multipliers and weighted composition operators with exact spectral actions.

    ModulationSymbol   ψ(z) = e^{i⟨z,η₀⟩}, η₀ ∈ Ω*      f(ξ) ↦ f(ξ-η₀)·1[ξ-η₀ ∈ Ω*]
    ConstantSymbol     ψ(z) = c                          f ↦ c·f
    TranslationMap     φ(z) = z + b, Im b ∈ closure(Ω)   f(ξ) ↦ e^{i⟨b,ξ⟩}·f(ξ)

W_{ψ,φ}F = ψ·(F∘φ) then has density (ψ-action)(e^{i⟨b,ξ⟩}f), and the kernel
identity W*K_w = conj(ψ(w))·K_{φ(w)} can be checked through point
evaluation.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from .cone_geometry import Cone, contains_dual, contains_primal
from .errors import DimensionMismatch, NotSelfMap, ParameterMismatch, SymbolOutsideDualCone
from .fourier_laplace import (
    HSFunction,
    SpectralDensity,
    TubePoint,
    atomic_density,
    density_rule,
    evaluate,
    hs_function,
    hs_norm,
)
from .kernels import KernelParams, kernel_diag, reproduce_check

logger = logging.getLogger(__name__)

POINTWISE_SLACK = 1e-10
REL_ERR_FLOOR = 1e-300


def _complex_vector(value: Any, dim: int, name: str) -> np.ndarray:
    if isinstance(value, TubePoint):
        return value.as_complex()
    array = np.asarray(value, dtype=complex).reshape(-1)
    if array.shape != (dim,):
        raise DimensionMismatch(f"{name} must have length {dim}, got shape {array.shape}")
    return array


@dataclass(frozen=True, eq=False)
class ModulationSymbol:
    cone: Cone
    eta: np.ndarray = field(repr=False)

    def __call__(self, z: Any) -> complex:
        point = _complex_vector(z, self.cone.dim, "z")
        return complex(np.exp(1j * (point @ self.eta)))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "modulation", "eta": self.eta.tolist()}


@dataclass(frozen=True)
class ConstantSymbol:
    cone: Cone
    value: complex = 1.0

    def __call__(self, z: Any) -> complex:
        _complex_vector(z, self.cone.dim, "z")
        return complex(self.value)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": "constant", "value": [self.value.real, self.value.imag]}


Symbol = Union[ModulationSymbol, ConstantSymbol]


@dataclass(frozen=True, eq=False)
class TranslationMap:
    cone: Cone
    shift: np.ndarray = field(repr=False)

    def __call__(self, z: TubePoint) -> TubePoint:
        image = z.as_complex() + self.shift
        return TubePoint(x=tuple(image.real.tolist()), y=tuple(image.imag.tolist()))

    def to_dict(self) -> Dict[str, Any]:
        return {"re": self.shift.real.tolist(), "im": self.shift.imag.tolist()}


def modulation_symbol(cone: Cone, eta: Any) -> ModulationSymbol:
    vector = np.asarray(eta, dtype=float).reshape(-1)
    if vector.shape != (cone.dim,):
        raise DimensionMismatch(f"η₀ must have length {cone.dim}")
    if not contains_dual(cone, vector):
        raise SymbolOutsideDualCone(
            "Modulation frequency must lie in the dual cone",
            details={"eta": vector.tolist()},
        )
    vector = vector.copy()
    vector.setflags(write=False)
    return ModulationSymbol(cone=cone, eta=vector)


def constant_symbol(cone: Cone, value: complex = 1.0) -> ConstantSymbol:
    return ConstantSymbol(cone=cone, value=complex(value))


def translation_map(cone: Cone, shift: Any) -> TranslationMap:
    vector = np.asarray(shift, dtype=complex).reshape(-1)
    if vector.shape != (cone.dim,):
        raise DimensionMismatch(f"Translation b must have length {cone.dim}")
    if not contains_primal(cone, vector.imag):
        raise NotSelfMap(
            "Im b must lie in the closed cone for z ↦ z + b to map T_Ω into itself",
            details={"im_b": vector.imag.tolist()},
        )
    vector = vector.copy()
    vector.setflags(write=False)
    return TranslationMap(cone=cone, shift=vector)


def symbol_from_spec(spec: Mapping[str, Any], cone: Cone) -> Symbol:
    kind = spec.get("kind", "constant")
    if kind == "modulation":
        return modulation_symbol(cone, spec["eta"])
    if kind == "constant":
        value = spec.get("value", 1.0)
        if isinstance(value, (list, tuple)):
            value = complex(value[0], value[1])
        return constant_symbol(cone, value)
    raise ParameterMismatch(f"Unknown symbol kind {kind!r}; expected modulation or constant")


def _check_space(function: HSFunction, cone: Cone) -> None:
    if function.cone != cone:
        raise ParameterMismatch("Operator and function are defined over different cones")


# spectral actions

def _shift_density(density: SpectralDensity, cone: Cone, eta: np.ndarray) -> SpectralDensity:
    label = f"shift({density.description}, η₀={eta.tolist()})"
    if density.is_atomic:
        freqs, coeffs = density.atoms
        return atomic_density(freqs + eta if freqs.size else freqs, coeffs, description=label)

    envelope = density.envelope
    growth = math.exp(float(np.dot(envelope.direction, eta))) if envelope.direction is not None else 1.0
    lift = float(np.max(np.abs(eta))) if eta.size else 0.0

    def evaluator(xi: np.ndarray) -> np.ndarray:
        moved = xi - eta
        inside = np.asarray(contains_dual(cone, moved), dtype=bool)
        values = np.zeros(xi.shape[0], dtype=complex)
        if np.any(inside):
            values[inside] = density(moved[inside])
        return values

    breakpoints = (tuple(eta.tolist()),) + tuple(tuple((np.asarray(b) + eta).tolist()) for b in density.breakpoints)
    return SpectralDensity(
        evaluator=evaluator,
        envelope=replace(
            envelope,
            amplitude=envelope.amplitude * growth * (1 + lift) ** envelope.degree,
            support_radius=None if envelope.support_radius is None else envelope.support_radius + lift,
        ),
        description=label,
        breakpoints=breakpoints,
    )


def _scale_density(density: SpectralDensity, value: complex) -> SpectralDensity:
    label = f"{value}·{density.description}"
    if density.is_atomic:
        freqs, coeffs = density.atoms
        return atomic_density(freqs, coeffs * value, description=label)
    return SpectralDensity(
        evaluator=lambda xi: value * density(xi),
        envelope=replace(density.envelope, amplitude=density.envelope.amplitude * abs(value)),
        description=label,
        breakpoints=density.breakpoints,
    )


def _translate_density(density: SpectralDensity, cone: Cone, shift: np.ndarray) -> SpectralDensity:
    label = f"compose({density.description}, b={shift.tolist()})"
    if density.is_atomic:
        freqs, coeffs = density.atoms
        phases = np.exp(1j * (freqs @ shift)) if freqs.size else np.ones(0)
        return atomic_density(freqs, coeffs * phases, description=label)

    envelope = density.envelope
    base = np.zeros(cone.dim) if envelope.direction is None else np.asarray(envelope.direction)
    direction = base + shift.imag

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return np.exp(1j * (xi @ shift)) * density(xi)

    return SpectralDensity(
        evaluator=evaluator,
        envelope=replace(
            envelope,
            direction=tuple(float(v) for v in direction),
            frequency=envelope.frequency + float(np.linalg.norm(shift.real)),
        ),
        description=label,
        breakpoints=density.breakpoints,
    )


def _shift_constant(function: HSFunction, eta: np.ndarray) -> float:
    """max over rule nodes ∪ {0} of w_n(ξ+η₀)/w_n(ξ)"""
    density = function.density
    if density.is_atomic:
        nodes = density.atoms[0]
    else:
        nodes = density_rule(
            function.cone,
            [density, density],
            extra_degree=2 * function.order,
            target=function.target,
            phase_free=True,
        ).nodes
    points = np.vstack([np.zeros((1, function.cone.dim)), nodes]) if nodes.size else np.zeros((1, function.cone.dim))
    weight = function.weight
    return float(np.max(weight(points + eta) / weight(points)))


def modulation_apply(function: HSFunction, symbol: ModulationSymbol) -> Tuple[HSFunction, float]:
    """ψF for ψ = e^{i⟨z,η₀⟩}, with the empirical weight-shift constant C"""
    _check_space(function, symbol.cone)
    constant = _shift_constant(function, symbol.eta)
    image = _shift_density(function.density, function.cone, symbol.eta)
    logger.debug(f"Modulation by η₀={symbol.eta.tolist()}, weight-shift constant {constant:.6g}")
    return hs_function(image, function.weight, target=function.target), constant


def symbol_apply(function: HSFunction, symbol: Symbol) -> Tuple[HSFunction, float]:
    """ψF for either symbol family; constant symbols report |c|²"""
    if isinstance(symbol, ModulationSymbol):
        return modulation_apply(function, symbol)
    _check_space(function, symbol.cone)
    image = _scale_density(function.density, symbol.value)
    return hs_function(image, function.weight, target=function.target), abs(symbol.value) ** 2


def composition_apply(function: HSFunction, translation: TranslationMap) -> HSFunction:
    """F∘φ for φ(z) = z + b; a contraction since |e^{i⟨b,ξ⟩}| ≤ 1 on Ω*"""
    _check_space(function, translation.cone)
    image = _translate_density(function.density, function.cone, translation.shift)
    return hs_function(image, function.weight, target=function.target)


def weighted_composition_apply(
    function: HSFunction,
    symbol: Symbol,
    translation: TranslationMap,
) -> Tuple[HSFunction, float]:
    """W_{ψ,φ}F = ψ·(F∘φ) and the multiplier constant of ψ"""
    return symbol_apply(composition_apply(function, translation), symbol)


@dataclass(frozen=True)
class PointwiseReport:
    moduli: Tuple[float, ...]
    flagged: Tuple[int, ...]
    norm_bound: float

    @property
    def max_modulus(self) -> float:
        return max(self.moduli, default=0.0)

    @property
    def passed(self) -> bool:
        return not self.flagged

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_modulus": self.max_modulus,
            "norm_bound": self.norm_bound,
            "flagged": list(self.flagged),
            "samples": len(self.moduli),
        }


def multiplier_pointwise_check(symbol: Any, norm_bound: float, samples: Sequence[TubePoint]) -> PointwiseReport:
    """Flags samples with |ψ(w)| > norm_bound"""
    moduli = tuple(float(abs(symbol(w))) for w in samples)
    flagged = tuple(i for i, modulus in enumerate(moduli) if modulus > norm_bound + POINTWISE_SLACK)
    return PointwiseReport(moduli=moduli, flagged=flagged, norm_bound=float(norm_bound))


def wco_adjoint_check(
    symbol: Symbol,
    translation: TranslationMap,
    w: TubePoint,
    tests: Sequence[HSFunction],
) -> float:
    """
    max over tests of |⟨WF, K_w⟩ - ψ(w)·⟨F, K_{φ(w)}⟩| / |⟨WF, K_w⟩|, the
    left side by point evaluation of WF at w and the right side by the
    reproducing integral at φ(w).
    """
    if symbol.cone != translation.cone:
        raise ParameterMismatch("Symbol and self-map are defined over different cones")
    worst = 0.0
    for function in tests:
        _check_space(function, symbol.cone)
        if function.weight != tests[0].weight:
            raise ParameterMismatch("Adjoint check needs all test functions in the same space")
        image, _ = weighted_composition_apply(function, symbol, translation)
        lhs = evaluate(image, w)
        _, reproduced, _ = reproduce_check(function, translation(w))
        rhs = symbol(w) * reproduced
        error = abs(lhs - rhs) / max(abs(lhs), abs(rhs), REL_ERR_FLOOR)
        worst = max(worst, float(error))
    return worst


def multiplier_adjoint_check(function: HSFunction, symbol: Symbol, w: TubePoint) -> float:
    """⟨M_ψF, K_w⟩ = ψ(w)F(w): the b = 0 case of the weighted-composition identity"""
    return wco_adjoint_check(symbol, translation_map(symbol.cone, np.zeros(symbol.cone.dim)), w, [function])


def wco_necessary_ratio(params: KernelParams, symbol: Any, translation: TranslationMap, w: TubePoint) -> float:
    """|ψ(w)|²·K(φ(w), φ(w)) / K(w, w), a lower bound for ‖W_{ψ,φ}‖²"""
    image = translation(w)
    return float(abs(symbol(w)) ** 2 * kernel_diag(params, image) / kernel_diag(params, w))


def contraction_norms(function: HSFunction, translation: TranslationMap) -> Tuple[float, float]:
    """(‖F∘φ‖, ‖F‖)"""
    return hs_norm(composition_apply(function, translation)), hs_norm(function)
