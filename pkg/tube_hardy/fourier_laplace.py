"""
Fourier-Laplace realisation of the Hardy-Sobolev space.

An element F = 𝓛f is carried by its spectral density f on Ω*:

    F(z) = ∫_{Ω*} e^{i⟨z,ξ⟩} f(ξ) dξ,     ‖F‖² = ∫_{Ω*} |f(ξ)|² w_n(ξ) dξ.

All norms and inner products live on the spectral side. Physical-space
L²(R^d) norms of boundary translates carry the factor (2π)^{d/2} and are
only returned when asked for explicitly.

Densities come in two variants: continuous ones (a vectorised evaluator
plus a declared envelope) and atomic ones (finitely many frequencies with
coefficients, i.e. a discrete spectral measure with unit-mass bins).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .cone_geometry import Cone, contains_dual, interior_depth, require_interior
from .cone_quadrature import QuadratureRule, integrate, rule_for
from .errors import (
    DegreeTooHigh,
    DimensionMismatch,
    NonFiniteIntegrand,
    ParameterMismatch,
    RuleMismatch,
)
from .gauge_weight import Weight

logger = logging.getLogger(__name__)

DECAY_SLACK = 1e-12

Evaluator = Callable[[np.ndarray], np.ndarray]
MultiIndex = Tuple[int, ...]


@dataclass(frozen=True)
class TubePoint:
    x: Tuple[float, ...]
    y: Tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.x)

    @property
    def real(self) -> np.ndarray:
        return np.asarray(self.x, dtype=float)

    @property
    def imag(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)

    def as_complex(self) -> np.ndarray:
        return self.real + 1j * self.imag

    def to_dict(self):
        return {"x": list(self.x), "y": list(self.y)}


def _vector(values: Any, dim: int, name: str) -> Tuple[float, ...]:
    array = np.asarray(values, dtype=float)
    if array.ndim == 0 and dim == 1:
        array = array.reshape(1)
    if array.shape != (dim,):
        raise DimensionMismatch(f"{name} must have length {dim}, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DimensionMismatch(f"{name} has non-finite entries")
    return tuple(float(v) for v in array)


def tube_point(cone: Cone, x: Any, y: Any) -> TubePoint:
    """Validated point x + iy of T_Ω"""
    point = TubePoint(x=_vector(x, cone.dim, "x"), y=_vector(y, cone.dim, "y"))
    require_interior(cone, point.imag)
    return point


def tube_point_from_complex(cone: Cone, z: Any) -> TubePoint:
    values = np.asarray(z, dtype=complex).reshape(-1)
    return tube_point(cone, values.real, values.imag)


@dataclass(frozen=True)
class Envelope:
    """
    Declared bound |f(ξ)| ≤ amplitude·e^{-decay·|ξ| - ⟨direction,ξ⟩}(1+|ξ|)^degree.

    ``support_radius`` marks densities vanishing outside |ξ|_∞ ≤ r,
    ``frequency`` bounds the phase oscillation of f and ``pole_distance``
    is the distance from the real axis to the nearest complex singularity
    of f along a unit ray (finite for kernel densities 1/w_n).
    """
    amplitude: float = 1.0
    decay: float = 0.0
    degree: int = 0
    direction: Optional[Tuple[float, ...]] = None
    support_radius: Optional[float] = None
    frequency: float = 0.0
    pole_distance: float = math.inf


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    evaluator: Optional[Evaluator] = field(repr=False)
    envelope: Envelope
    description: str = ""
    breakpoints: Tuple[Tuple[float, ...], ...] = ()
    atoms: Optional[Tuple[np.ndarray, np.ndarray]] = field(default=None, repr=False)

    @property
    def is_atomic(self) -> bool:
        return self.atoms is not None

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        if self.evaluator is None:
            raise ParameterMismatch(f"Atomic density '{self.description}' has no pointwise values")
        return self.evaluator(xi)


def atomic_density(frequencies: Any, coefficients: Any, description: str = "atomic") -> SpectralDensity:
    freqs = np.atleast_2d(np.asarray(frequencies, dtype=float)).copy()
    coeffs = np.asarray(coefficients, dtype=complex).reshape(-1).copy()
    if freqs.shape[0] != coeffs.shape[0]:
        raise ParameterMismatch(
            f"{freqs.shape[0]} frequencies but {coeffs.shape[0]} coefficients in atomic density"
        )
    freqs.setflags(write=False)
    coeffs.setflags(write=False)
    radius = float(np.max(np.abs(freqs))) if freqs.size else 0.0
    envelope = Envelope(
        amplitude=float(np.sum(np.abs(coeffs))),
        support_radius=radius,
    )
    return SpectralDensity(evaluator=None, envelope=envelope, description=description, atoms=(freqs, coeffs))


def trigonometric_sum(frequencies: np.ndarray, coefficients: np.ndarray, z: np.ndarray) -> complex:
    """Σ_k b_k e^{i⟨z,ξ_k⟩}"""
    if frequencies.shape[0] == 0:
        return 0j
    phases = np.exp(1j * (frequencies @ np.asarray(z, dtype=complex)))
    return complex(np.sum(coefficients * phases))


@dataclass(frozen=True, eq=False)
class HSFunction:
    density: SpectralDensity
    weight: Weight
    target: Optional[float] = None
    rule: Optional[QuadratureRule] = field(default=None, repr=False)

    @property
    def cone(self) -> Cone:
        return self.weight.cone

    @property
    def order(self) -> int:
        return self.weight.order


def hs_function(
    density: SpectralDensity,
    weight: Weight,
    target: Optional[float] = None,
    rule: Optional[QuadratureRule] = None,
) -> HSFunction:
    if density.is_atomic:
        freqs, _ = density.atoms
        if freqs.size and freqs.shape[1] != weight.cone.dim:
            raise DimensionMismatch(
                f"Atomic frequencies have dimension {freqs.shape[1]}, cone has {weight.cone.dim}"
            )
        if freqs.size and not np.all(contains_dual(weight.cone, freqs)):
            raise ParameterMismatch("Atomic density has frequencies outside the dual cone")
    if rule is not None and rule.cone != weight.cone:
        raise ParameterMismatch("Quadrature rule was built for another cone")
    return HSFunction(density=density, weight=weight, target=target, rule=rule)


def with_order(function: HSFunction, order: int) -> HSFunction:
    """The same density viewed in H^m (inclusion H^n ⊂ H^m for m ≤ n)"""
    return replace(function, weight=function.weight.with_order(order))


# polynomials

@dataclass(frozen=True)
class Polynomial:
    """Σ_α c_α ζ^α in d variables"""
    dim: int
    terms: Tuple[Tuple[MultiIndex, complex], ...]

    @property
    def degree(self) -> int:
        return max((sum(alpha) for alpha, coeff in self.terms if coeff != 0), default=0)

    def __call__(self, zeta: np.ndarray) -> np.ndarray:
        values = np.atleast_2d(np.asarray(zeta, dtype=complex))
        total = np.zeros(values.shape[0], dtype=complex)
        for alpha, coeff in self.terms:
            total = total + coeff * np.prod(values ** np.asarray(alpha), axis=1)
        return total


def multi_index(alpha: Any, dim: int) -> MultiIndex:
    values = tuple(int(a) for a in np.ravel(alpha))
    if len(values) != dim or any(a < 0 for a in values):
        raise ParameterMismatch(f"Multi-index {alpha!r} is not a non-negative {dim}-tuple")
    return values


def polynomial(terms: Mapping[Any, complex], dim: int) -> Polynomial:
    cleaned = tuple(sorted(
        ((multi_index(alpha, dim), complex(coeff)) for alpha, coeff in terms.items()),
        key=lambda term: term[0],
    ))
    return Polynomial(dim=dim, terms=cleaned)


def monomial(alpha: Any, dim: int) -> Polynomial:
    return Polynomial(dim=dim, terms=((multi_index(alpha, dim), 1 + 0j),))


# quadrature plumbing

def density_rule(
    cone: Cone,
    densities: Sequence[SpectralDensity],
    *,
    y: Optional[np.ndarray] = None,
    x: Optional[np.ndarray] = None,
    extra_degree: int = 0,
    pole_distance: float = math.inf,
    target: Optional[float] = None,
    rule: Optional[QuadratureRule] = None,
    phase_free: bool = False,
) -> QuadratureRule:
    """
    Rule for ∫ e^{i⟨x,ξ⟩-⟨y,ξ⟩}·Π f_i(ξ)·(polynomial of degree extra_degree).
    ``phase_free`` drops the density oscillation (integrands like |f|²).
    """
    decay_vector = np.zeros(cone.dim) if y is None else np.asarray(y, dtype=float)
    extra_decay = 0.0
    degree = extra_degree
    frequency = 0.0
    truncation: Optional[float] = None
    breakpoints: List[Tuple[float, ...]] = []
    for density in densities:
        envelope = density.envelope
        if envelope.direction is not None:
            decay_vector = decay_vector + np.asarray(envelope.direction)
        extra_decay += envelope.decay
        degree += envelope.degree
        if not phase_free:
            frequency += envelope.frequency
        pole_distance = min(pole_distance, envelope.pole_distance)
        if envelope.support_radius is not None:
            truncation = envelope.support_radius if truncation is None else min(truncation, envelope.support_radius)
        breakpoints.extend(density.breakpoints)

    available = max(interior_depth(cone, decay_vector), 0.0) + extra_decay
    if rule is not None:
        if rule.decay_scale > available * (1 + DECAY_SLACK):
            raise RuleMismatch(
                f"Rule built for decay {rule.decay_scale:.6g}, integrand only decays at {available:.6g}",
                details={"rule_decay": rule.decay_scale, "available": available},
            )
        return rule

    if available <= 0 and truncation is None:
        raise NonFiniteIntegrand(
            "Integrand has neither exponential decay nor compact support",
            details={"densities": [d.description for d in densities]},
        )
    return rule_for(
        cone,
        decay_vector,
        x=x,
        degree=degree,
        target=target,
        extra_decay=extra_decay,
        extra_frequency=frequency,
        pole_distance=pole_distance,
        breakpoints=tuple(breakpoints),
        truncation=truncation,
    )


def _monomial_values(xi: np.ndarray, alpha: MultiIndex, factor: complex) -> np.ndarray:
    return np.prod((factor * xi) ** np.asarray(alpha), axis=1)


def _check_point(function: HSFunction, z: TubePoint) -> None:
    if z.dim != function.cone.dim:
        raise DimensionMismatch(f"Tube point has dimension {z.dim}, cone has {function.cone.dim}")
    require_interior(function.cone, z.imag)


# operations

def evaluate(function: HSFunction, z: TubePoint) -> complex:
    """F(z) = ∫ e^{i⟨z,ξ⟩} f(ξ) dξ"""
    return evaluate_derivative(function, (0,) * function.cone.dim, z)


def evaluate_derivative(function: HSFunction, alpha: Any, z: TubePoint) -> complex:
    """∂^α F(z) = ∫ (iξ)^α e^{i⟨z,ξ⟩} f(ξ) dξ"""
    _check_point(function, z)
    index = multi_index(alpha, function.cone.dim)
    density = function.density

    if density.is_atomic:
        freqs, coeffs = density.atoms
        if not freqs.size:
            return 0j
        return trigonometric_sum(freqs, coeffs * _monomial_values(freqs, index, 1j), z.as_complex())

    if function.rule is not None and sum(index) > function.rule.order_budget:
        raise RuleMismatch(
            f"Derivative order {sum(index)} exceeds the rule's budget {function.rule.order_budget}"
        )
    rule = density_rule(
        function.cone,
        [density],
        y=z.imag,
        x=z.real,
        extra_degree=sum(index),
        target=function.target,
        rule=function.rule,
    )
    point = z.as_complex()

    def integrand(xi: np.ndarray) -> np.ndarray:
        return np.exp(1j * (xi @ point)) * density(xi) * _monomial_values(xi, index, 1j)

    return integrate(rule, integrand)


def _weighted_square_norm(
    function: HSFunction,
    multiplier: Optional[Polynomial] = None,
    use_weight: bool = True,
    y: Optional[np.ndarray] = None,
) -> float:
    """∫ |P(iξ) f(ξ)|² e^{-2⟨y,ξ⟩} w(ξ) dξ with the pieces switched on as requested"""
    weight = function.weight
    density = function.density

    def factor(xi: np.ndarray) -> np.ndarray:
        value = np.ones(xi.shape[0])
        if multiplier is not None:
            value = value * np.abs(multiplier(1j * xi)) ** 2
        if y is not None:
            value = value * np.exp(-2 * (xi @ y))
        if use_weight:
            value = value * weight(xi)
        return value

    if density.is_atomic:
        freqs, coeffs = density.atoms
        if not freqs.size:
            return 0.0
        return float(np.sum(np.abs(coeffs) ** 2 * factor(freqs)))

    extra = 2 * weight.order if use_weight else 0
    if multiplier is not None:
        extra += 2 * multiplier.degree
    rule = density_rule(
        function.cone,
        [density, density],
        y=None if y is None else 2 * np.asarray(y),
        extra_degree=extra,
        target=function.target,
        phase_free=True,
    )
    value = integrate(rule, lambda xi: np.abs(density(xi)) ** 2 * factor(xi))
    return max(value.real, 0.0)


def hs_norm(function: HSFunction) -> float:
    """‖F‖ = ‖f‖_{L²(Ω*, w_n)}"""
    return math.sqrt(_weighted_square_norm(function))


def h2_sup_norm(function: HSFunction) -> float:
    """sup_y ‖F_y‖ on the spectral side, i.e. ‖f‖_{L²(Ω*)} since e^{-2⟨y,ξ⟩} ≤ 1"""
    return math.sqrt(_weighted_square_norm(function, use_weight=False))


def inner_product(first: HSFunction, second: HSFunction) -> complex:
    """⟨𝓛f, 𝓛g⟩ = ∫ f ḡ w_n dξ"""
    if first.weight != second.weight:
        raise ParameterMismatch("Inner product needs functions in the same space")
    f, g = first.density, second.density
    weight = first.weight

    if f.is_atomic or g.is_atomic:
        if not (f.is_atomic and g.is_atomic):
            raise ParameterMismatch("Inner product between atomic and continuous densities is undefined")
        total = 0j
        g_freqs, g_coeffs = g.atoms
        lookup = {tuple(np.round(k, 12)): c for k, c in zip(g_freqs, g_coeffs)}
        f_freqs, f_coeffs = f.atoms
        for k, c in zip(f_freqs, f_coeffs):
            other = lookup.get(tuple(np.round(k, 12)))
            if other is not None:
                total += c * np.conj(other) * weight(k[None, :])[0]
        return complex(total)

    rule = density_rule(first.cone, [f, g], extra_degree=2 * weight.order, target=first.target)
    return integrate(rule, lambda xi: f(xi) * np.conj(g(xi)) * weight(xi))


def translate_density(function: HSFunction, y: Any) -> SpectralDensity:
    """Spectrum of the boundary translate F_y: ξ ↦ e^{-⟨y,ξ⟩} f(ξ)"""
    shift = np.asarray(_vector(y, function.cone.dim, "y"))
    require_interior(function.cone, shift)
    density = function.density
    label = f"translate({density.description}, y={shift.tolist()})"

    if density.is_atomic:
        freqs, coeffs = density.atoms
        damping = np.exp(-(freqs @ shift)) if freqs.size else np.ones(0)
        return atomic_density(freqs, coeffs * damping, description=label)

    envelope = density.envelope
    direction = shift if envelope.direction is None else shift + np.asarray(envelope.direction)

    def evaluator(xi: np.ndarray) -> np.ndarray:
        return np.exp(-(xi @ shift)) * density(xi)

    return SpectralDensity(
        evaluator=evaluator,
        envelope=replace(envelope, direction=tuple(float(v) for v in direction)),
        description=label,
        breakpoints=density.breakpoints,
    )


def translate_norm(function: HSFunction, y: Any, physical: bool = False) -> float:
    """
    ‖F_y‖: spectral L² norm ‖e^{-⟨y,ξ⟩}f‖ by default; with ``physical`` the
    L²(R^d) norm of x ↦ F(x+iy), which carries the factor (2π)^{d/2}.
    """
    shift = np.asarray(_vector(y, function.cone.dim, "y"))
    require_interior(function.cone, shift)
    norm = math.sqrt(_weighted_square_norm(function, use_weight=False, y=shift))
    if physical:
        norm *= (2 * math.pi) ** (function.cone.dim / 2)
    return norm


def _domination_constant(function: HSFunction, multiplier: Polynomial) -> float:
    """max over rule nodes ∪ {0} of |P(iξ)| / w_n(ξ)^{1/2}"""
    density = function.density
    if density.is_atomic:
        nodes = density.atoms[0]
    else:
        nodes = density_rule(
            function.cone,
            [density, density],
            extra_degree=2 * function.order + 2 * multiplier.degree,
            target=function.target,
            phase_free=True,
        ).nodes
    points = np.vstack([np.zeros((1, function.cone.dim)), nodes]) if nodes.size else np.zeros((1, function.cone.dim))
    ratio = np.abs(multiplier(1j * points)) / np.sqrt(function.weight(points))
    return float(np.max(ratio))


def apply_poly_multiplier(function: HSFunction, multiplier: Polynomial) -> Tuple[HSFunction, float]:
    """
    P(D)F = 𝓛(P(iξ) f) as an order-0 function, with the empirical constant C_P
    of |P(iξ)| ≤ C_P w_n(ξ)^{1/2}.
    """
    if multiplier.dim != function.cone.dim:
        raise DimensionMismatch(f"Polynomial has {multiplier.dim} variables, cone has dimension {function.cone.dim}")
    if multiplier.degree > function.order:
        raise DegreeTooHigh(
            f"Polynomial of degree {multiplier.degree} is not dominated by w_{function.order}",
            details={"degree": multiplier.degree, "order": function.order},
        )
    constant = _domination_constant(function, multiplier)
    density = function.density
    label = f"P(iξ)·{density.description}"

    if density.is_atomic:
        freqs, coeffs = density.atoms
        values = multiplier(1j * freqs) if freqs.size else np.zeros(0)
        image = atomic_density(freqs, coeffs * values, description=label)
    else:
        envelope = density.envelope
        coefficient_mass = float(sum(abs(c) for _, c in multiplier.terms))

        def evaluator(xi: np.ndarray) -> np.ndarray:
            return multiplier(1j * xi) * density(xi)

        image = SpectralDensity(
            evaluator=evaluator,
            envelope=replace(
                envelope,
                amplitude=envelope.amplitude * coefficient_mass,
                degree=envelope.degree + multiplier.degree,
            ),
            description=label,
            breakpoints=density.breakpoints,
        )
    logger.debug(f"Applied polynomial multiplier of degree {multiplier.degree}, C_P={constant:.6g}")
    return hs_function(image, function.weight.with_order(0), target=function.target), constant


def derivative_norm(function: HSFunction, alpha: Any) -> float:
    """‖∂^α F‖_{H²} = ‖ξ^α f‖_{L²(Ω*)}"""
    index = multi_index(alpha, function.cone.dim)
    return math.sqrt(_weighted_square_norm(function, multiplier=monomial(index, function.cone.dim), use_weight=False))


def derivative_constant(function: HSFunction, alpha: Any) -> float:
    """C_α with ‖∂^α F‖_{H²} ≤ C_α ‖F‖_{H^n}; requires |α| ≤ n"""
    index = multi_index(alpha, function.cone.dim)
    _, constant = apply_poly_multiplier(function, monomial(index, function.cone.dim))
    return constant


def scaled(function: HSFunction, factor: complex) -> HSFunction:
    """c·F, used for linear combinations in convergence checks"""
    density = function.density
    if density.is_atomic:
        freqs, coeffs = density.atoms
        image = atomic_density(freqs, coeffs * factor, description=f"{factor}·{density.description}")
    else:
        image = SpectralDensity(
            evaluator=lambda xi: factor * density(xi),
            envelope=replace(density.envelope, amplitude=density.envelope.amplitude * abs(factor)),
            description=f"{factor}·{density.description}",
            breakpoints=density.breakpoints,
        )
    return replace(function, density=image)


def _isotropic_decay(cone: Cone, envelope: Envelope) -> float:
    """Envelope decay as a single rate a with |f| ≲ e^{-a|ξ|}"""
    decay = envelope.decay
    if envelope.direction is not None:
        decay += max(interior_depth(cone, np.asarray(envelope.direction)), 0.0)
    return decay


def difference(first: HSFunction, second: HSFunction) -> HSFunction:
    """F - G for continuous densities in the same space"""
    if first.weight != second.weight:
        raise ParameterMismatch("Difference needs functions in the same space")
    f, g = first.density, second.density
    if f.is_atomic or g.is_atomic:
        raise ParameterMismatch("Difference is only defined for continuous densities")
    a, b = f.envelope, g.envelope
    supports = (a.support_radius, b.support_radius)
    envelope = Envelope(
        amplitude=a.amplitude + b.amplitude,
        decay=min(_isotropic_decay(first.cone, a), _isotropic_decay(first.cone, b)),
        degree=max(a.degree, b.degree),
        pole_distance=min(a.pole_distance, b.pole_distance),
        support_radius=None if None in supports else max(supports),
        frequency=max(a.frequency, b.frequency),
    )
    return replace(
        first,
        density=SpectralDensity(
            evaluator=lambda xi: f(xi) - g(xi),
            envelope=envelope,
            description=f"{f.description} - {g.description}",
            breakpoints=f.breakpoints + g.breakpoints,
        ),
        rule=None,
    )
