"""
Invariant suite run by ``app.py verify``.

Each property draws its own seeded generator, computes a defect and
compares it with a threshold. A library error inside a property counts
as a failure and is reported in ``detail``.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Iterable, List, Optional

import numpy as np

from .boundary_decomposition import (
    analyze_grid,
    boundary_limit_error,
    extend,
    grid_from_modes,
    inverse_samples,
    norm_identity_report,
    split_spectrum,
    synthetic_grid,
)
from .carleson import discrete_measure, embedding_estimate, embedding_matrices, testing_ratio
from .cone_geometry import Cone, build_cone, central_direction, dual_view, sample_dual, sample_interior
from .cone_quadrature import adaptive_reference, get_limits
from .densities import exponential, indicator, poly_exponential, random_density
from .errors import TubeHardyError
from .fourier_laplace import (
    TubePoint,
    atomic_density,
    derivative_constant,
    derivative_norm,
    evaluate,
    hs_function,
    hs_norm,
    tube_point,
)
from .gauge_weight import Weight, build_gauge, build_weight
from .kernels import (
    KernelParams,
    gram_matrix,
    kernel_eval,
    kernel_halfplane_closed,
    reproduce_check,
)
from .operators import (
    composition_apply,
    constant_symbol,
    modulation_symbol,
    translation_map,
    wco_adjoint_check,
    wco_necessary_ratio,
)

logger = logging.getLogger(__name__)

REL_FLOOR = 1e-300


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    defect: float
    threshold: float
    detail: Dict[str, Any] = field(default_factory=dict)
    # excluded from to_dict
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "defect": self.defect if math.isfinite(self.defect) else None,
            "threshold": self.threshold,
            "detail": self.detail,
        }


Check = Callable[[np.random.Generator, int], PropertyResult]
PROPERTIES: Dict[str, Check] = {}
BUDGETS: Dict[str, float] = {}


def register(name: str, budget: float):
    """Add a property to the suite; ``budget`` is its wall-time allowance in seconds at cases=1"""
    def decorator(check: Check) -> Check:
        PROPERTIES[name] = check
        BUDGETS[name] = budget
        return check
    return decorator


def _result(name: str, defect: float, threshold: float, **detail) -> PropertyResult:
    defect = float(defect)
    return PropertyResult(name=name, passed=bool(defect <= threshold), defect=defect, threshold=threshold, detail=detail)


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), REL_FLOOR)


# shared fixtures

def half_line() -> Cone:
    return build_cone({"kind": "orthant", "dim": 1})


def quadrant() -> Cone:
    return build_cone({"kind": "orthant", "dim": 2})


def wedge() -> Cone:
    return build_cone({"kind": "simplicial", "dim": 2, "generators": [[1.0, 1.0], [0.0, 1.0]]})


def euclidean_weight(cone: Cone, order: int) -> Weight:
    return build_weight(order, build_gauge({"kind": "euclidean"}, cone))


def random_point(cone: Cone, rng: np.random.Generator, spread: float = 1.0, scale: float = 1.0) -> TubePoint:
    y = sample_interior(cone, rng, 1, scale=scale)[0]
    return tube_point(cone, rng.uniform(-spread, spread, size=cone.dim), y)


# Fourier-Laplace

def _axis_moments_exponential(decay: np.ndarray):
    """∫_0^∞ t^m e^{-2 v_a t} dt"""
    return lambda axis, m: math.factorial(m) / (2 * decay[axis]) ** (m + 1)


def _axis_moments_box(radius: float):
    """∫_0^r t^m dt"""
    return lambda axis, m: radius ** (m + 1) / (m + 1)


def quadrant_weighted_mass(order: int, moment: Callable[[int, int], float]) -> float:
    """
    ∫ w_n(ξ)·g(ξ) dξ over the quadrant for a product g, given its per-axis
    moments; w_n = Σ_k (ξ_1² + ξ_2²)^k is expanded binomially.
    """
    total = 0.0
    for k in range(order + 1):
        for j in range(k + 1):
            total += math.comb(k, j) * moment(0, 2 * j) * moment(1, 2 * (k - j))
    return total


def laplace_closed_form(cone: Cone, terms: Dict[tuple, complex], decay: np.ndarray, phase: np.ndarray, z: np.ndarray) -> complex:
    """
    ∫_{Ω*} P(ξ) e^{i⟨z + p + iv, ξ⟩} dξ on a polyhedral cone for deg P ≤ 1.

    With ξ = Mη over the dual rays m_j and ζ_j = ⟨z + p + iv, m_j⟩ the
    constant term is |det M| Π_j i/ζ_j; a linear term ξ_a multiplies it by
    i Σ_j m_{j,a}/ζ_j.
    """
    rays = dual_view(cone).extreme_rays
    zeta = rays @ (np.asarray(z, dtype=complex) + phase + 1j * decay)
    base = abs(np.linalg.det(rays)) * complex(np.prod(1j / zeta))
    total = 0j
    for alpha, coeff in terms.items():
        if sum(alpha) == 0:
            total += coeff * base
        else:
            axis = alpha.index(1)
            total += coeff * 1j * base * complex(np.sum(rays[:, axis] / zeta))
    return total


def _random_linear_terms(cone: Cone, rng: np.random.Generator) -> Dict[tuple, complex]:
    terms = {(0,) * cone.dim: complex(rng.normal(), rng.normal())}
    if rng.random() < 0.5:
        for axis in range(cone.dim):
            alpha = [0] * cone.dim
            alpha[axis] = 1
            terms[tuple(alpha)] = complex(rng.normal(), rng.normal())
    return terms


@register("paley_wiener_isometry", budget=10.0)
def check_isometry(rng: np.random.Generator, cases: int) -> PropertyResult:
    errors = []
    cone = half_line()
    for order in (0, 1, 2):
        weight = euclidean_weight(cone, order)
        densities = [random_density(cone, rng) for _ in range(3 * cases)]
        densities.append(indicator(cone, rng.uniform(0.5, 2.0)))
        for density in densities:
            value = hs_norm(hs_function(density, weight)) ** 2
            reference = adaptive_reference(
                cone,
                lambda xi: np.abs(density(xi)) ** 2 * weight(xi),
                tol=1e-11,
                breakpoints=density.breakpoints,
                truncation=density.envelope.support_radius,
            )
            errors.append(_rel(value, reference.real))

    # the quadrant uses closed-form moments instead of nested adaptive quadrature
    cone = quadrant()
    for order in (0, 1, 2):
        weight = euclidean_weight(cone, order)
        for _ in range(2 * cases):
            decay = rng.uniform(0.6, 1.5, size=2)
            amplitude = complex(rng.normal(), rng.normal())
            density = exponential(cone, decay, phase=rng.uniform(-1, 1, size=2), amplitude=amplitude)
            reference = abs(amplitude) ** 2 * quadrant_weighted_mass(order, _axis_moments_exponential(decay))
            errors.append(_rel(hs_norm(hs_function(density, weight)) ** 2, reference))
        radius = rng.uniform(0.5, 2.0)
        reference = quadrant_weighted_mass(order, _axis_moments_box(radius))
        errors.append(_rel(hs_norm(hs_function(indicator(cone, radius), weight)) ** 2, reference))
    return _result("paley_wiener_isometry", max(errors), 1e-7, cases=len(errors))


@register("paley_wiener_closed_form", budget=10.0)
def check_isometry_closed_form(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = half_line()
    function = hs_function(exponential(cone, [1.0]), euclidean_weight(cone, 1))
    value = hs_norm(function) ** 2
    return _result("paley_wiener_closed_form", _rel(value, 0.75), 1e-8, value=value, expected=0.75)


@register("quadrature_oracle", budget=30.0)
def check_quadrature_oracle(rng: np.random.Generator, cases: int) -> PropertyResult:
    """
    Half-line cases are checked against adaptive quadrature, the 2D cones
    against the exact Laplace transform of a degree-one polynomial times an
    exponential.
    """
    target = get_limits().target
    cones = (half_line(), quadrant(), wedge(), build_cone({"kind": "lorentz", "dim": 2}))
    errors = []
    for index in range(50 * cases):
        cone = cones[index % len(cones)]
        weight = euclidean_weight(cone, int(rng.integers(0, 3)))
        z = random_point(cone, rng, spread=1.0)
        point = z.as_complex()
        if cone.dim == 1:
            density = random_density(cone, rng)
            reference = adaptive_reference(cone, lambda xi: np.exp(1j * (xi @ point)) * density(xi), tol=1e-11)
        else:
            decay = central_direction(cone) * rng.uniform(0.6, 1.5)
            phase = rng.uniform(-1, 1, size=cone.dim)
            terms = _random_linear_terms(cone, rng)
            density = poly_exponential(cone, decay, terms, phase)
            reference = laplace_closed_form(cone, terms, decay, phase, point)
        value = evaluate(hs_function(density, weight), z)
        errors.append(_rel(value, reference))
    return _result("quadrature_oracle", max(errors), 10 * target, cases=len(errors), target=target)


@register("derivative_estimates", budget=10.0)
def check_derivative_estimates(rng: np.random.Generator, cases: int) -> PropertyResult:
    worst = -math.inf
    checked = 0
    for index in range(20 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        order = int(rng.integers(1, 3))
        function = hs_function(random_density(cone, rng), euclidean_weight(cone, order))
        norm = hs_norm(function)
        for alpha in _multi_indices(cone.dim, order):
            lhs = derivative_norm(function, alpha)
            rhs = derivative_constant(function, alpha) * norm
            worst = max(worst, (lhs - rhs) / max(rhs, REL_FLOOR))
            checked += 1

    cone = half_line()
    function = hs_function(exponential(cone, [1.0]), euclidean_weight(cone, 1))
    closed = derivative_norm(function, (1,))
    return _result(
        "derivative_estimates",
        max(worst, 0.0, _rel(closed, 0.5) - 1e-8),
        1e-9,
        checked=checked,
        closed_form=closed,
    )


def _multi_indices(dim: int, order: int) -> Iterable[tuple]:
    for total in range(order + 1):
        if dim == 1:
            yield (total,)
        else:
            for first in range(total + 1):
                yield (first, total - first)


# kernels

@register("reproducing_property", budget=30.0)
def check_reproducing(rng: np.random.Generator, cases: int) -> PropertyResult:
    errors = []
    for index in range(100 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        weight = euclidean_weight(cone, int(rng.integers(0, 3)))
        function = hs_function(random_density(cone, rng), weight)
        _, _, rel_err = reproduce_check(function, random_point(cone, rng))
        errors.append(rel_err)

    cone = half_line()
    function = hs_function(exponential(cone, [1.0]), euclidean_weight(cone, 0))
    lhs, rhs, _ = reproduce_check(function, tube_point(cone, [0.0], [1.0]))
    closed = max(_rel(lhs, 0.5), _rel(rhs, 0.5))
    return _result(
        "reproducing_property",
        max(max(errors), closed * 100),
        1e-6,
        pairs=len(errors),
        closed_form_error=closed,
    )


@register("kernel_closed_form", budget=10.0)
def check_kernel_closed_form(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = half_line()
    params = KernelParams(euclidean_weight(cone, 0))
    errors = []
    for _ in range(100 * cases):
        z, w = random_point(cone, rng, 3.0, 2.0), random_point(cone, rng, 3.0, 2.0)
        exact = kernel_halfplane_closed(complex(z.x[0], z.y[0]), complex(w.x[0], w.y[0]))
        errors.append(_rel(kernel_eval(params, z, w), exact))
    return _result("kernel_closed_form", max(errors), 1e-8, pairs=len(errors))


@register("kernel_symmetry", budget=10.0)
def check_kernel_symmetry(rng: np.random.Generator, cases: int) -> PropertyResult:
    hermitian, translation = [], []
    for index in range(200 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        params = KernelParams(euclidean_weight(cone, index % 3))
        z, w = random_point(cone, rng), random_point(cone, rng)
        forward = kernel_eval(params, z, w)
        hermitian.append(_rel(np.conj(kernel_eval(params, w, z)), forward))
        shift = rng.uniform(-2, 2, size=cone.dim)
        moved_z = TubePoint(x=tuple((z.real + shift).tolist()), y=z.y)
        moved_w = TubePoint(x=tuple((w.real + shift).tolist()), y=w.y)
        translation.append(_rel(kernel_eval(params, moved_z, moved_w), forward))
    return _result(
        "kernel_symmetry",
        max(max(hermitian), max(translation)),
        1e-12,
        hermitian=max(hermitian),
        translation=max(translation),
    )


@register("gram_psd", budget=10.0)
def check_gram_psd(rng: np.random.Generator, cases: int) -> PropertyResult:
    worst = 0.0
    for index in range(4 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        params = KernelParams(euclidean_weight(cone, index % 3))
        gram = gram_matrix(params, [random_point(cone, rng, 2.0) for _ in range(8)])
        smallest = float(np.linalg.eigvalsh(gram)[0])
        worst = max(worst, -smallest / float(np.trace(gram).real))
    return _result("gram_psd", worst, 1e-9, sets=4 * cases)


# boundary decomposition

def two_cosine(points: int = 16):
    return grid_from_modes(1, points, 2 * np.pi, [((1,), 1.0), ((-1,), 1.0)])


@register("decomposition_identity", budget=20.0)
def check_decomposition(rng: np.random.Generator, cases: int) -> PropertyResult:
    defects, additivity = [], []
    for index in range(50 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        sizes = (16, 32, 64, 128, 256) if cone.dim == 1 else (8, 16, 32)
        size = int(rng.choice(sizes))
        grid = synthetic_grid(cone, rng, points_per_axis=size, period=float(rng.uniform(1.0, 8.0)))
        gauge = {"kind": "euclidean"} if index % 4 < 2 else {"kind": "linear", "direction": list(central_direction(cone))}
        weight = build_weight(int(rng.integers(0, 3)), build_gauge(gauge, cone))
        report = norm_identity_report(grid, cone, weight)
        defects.append(report.relative_defect)

        plus, minus = inverse_samples(split_spectrum(analyze_grid(grid), cone))
        scale = max(float(np.max(np.abs(grid.samples))), REL_FLOOR)
        additivity.append(float(np.max(np.abs(grid.samples - plus - minus))) / scale)

    cone = half_line()
    closed = []
    for order, expected in ((0, (2.0, 1.0, 1.0)), (1, (4.0, 2.0, 2.0))):
        report = norm_identity_report(two_cosine(), cone, euclidean_weight(cone, order))
        values = (report.boundary_norm_sq, report.plus_norm_sq, report.minus_norm_sq)
        closed.append(max(abs(v - e) for v, e in zip(values, expected)) + report.defect)

    return _result(
        "decomposition_identity",
        max(max(defects) / 1e-10, max(additivity) / 1e-12, max(closed) / 1e-12),
        1.0,
        norm_defect=max(defects),
        additivity=max(additivity),
        closed_form=max(closed),
    )


@register("boundary_convergence", budget=5.0)
def check_boundary_convergence(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = half_line()
    grid = two_cosine()
    split = split_spectrum(analyze_grid(grid), cone)
    energy = norm_identity_report(grid, cone, euclidean_weight(cone, 0)).boundary_norm_sq
    increases = 0.0
    final = 0.0
    for grid_case in [grid] + [synthetic_grid(cone, rng, 32, bandwidth=2) for _ in range(cases)]:
        case_split = split if grid_case is grid else split_spectrum(analyze_grid(grid_case), cone)
        errors = [boundary_limit_error(case_split, grid_case, [2.0 ** -k]) for k in range(11)]
        increases = max(increases, max(b - a for a, b in zip(errors, errors[1:])))
        if grid_case is grid:
            final = errors[-1] / energy
    return _result(
        "boundary_convergence",
        max(increases / 1e-15, final / 1e-6),
        1.0,
        final_relative=final,
        max_increase=increases,
    )


@register("extension_consistency", budget=20.0)
def check_extension(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = quadrant()
    weight = euclidean_weight(cone, 1)
    errors = []
    for _ in range(5 * cases):
        grid = synthetic_grid(cone, rng, 16, period=2 * np.pi)
        split = split_spectrum(analyze_grid(grid), cone)
        plus, _ = extend(split)
        function = hs_function(atomic_density(split.plus.frequencies, split.plus.coefficients), weight)
        for _ in range(4):
            z = random_point(cone, rng, 2.0)
            errors.append(_rel(plus(z.as_complex()), evaluate(function, z)))
    return _result("extension_consistency", max(errors), 1e-13, evaluations=len(errors))


# carleson

@register("carleson_point_mass", budget=30.0)
def check_point_mass(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = half_line()
    params = KernelParams(euclidean_weight(cone, 0))
    i = tube_point(cone, [0.0], [1.0])
    estimate = embedding_estimate(params, discrete_measure([i], [1.0]), [i])
    return _result("carleson_point_mass", _rel(estimate, 0.5), 1e-8, estimate=estimate)


@register("carleson_necessity", budget=30.0)
def check_carleson_necessity(rng: np.random.Generator, cases: int) -> PropertyResult:
    worst = -math.inf
    additivity = 0.0
    for index in range(10 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        params = KernelParams(euclidean_weight(cone, index % 2))
        first = discrete_measure([random_point(cone, rng, 2.0) for _ in range(3)], rng.uniform(0.1, 2.0, 3))
        second = discrete_measure([random_point(cone, rng, 2.0) for _ in range(2)], rng.uniform(0.1, 2.0, 2))
        measure = first + second
        frame = [random_point(cone, rng, 2.0, 1.5) for _ in range(3)]

        bound = embedding_estimate(params, measure, frame)
        kernel_sup = max(testing_ratio(params, measure, w) for w in frame)
        worst = max(worst, (kernel_sup - bound) / max(bound, REL_FLOOR))

        joint, _ = embedding_matrices(params, measure, frame)
        split_a, _ = embedding_matrices(params, first, frame)
        split_b, _ = embedding_matrices(params, second, frame)
        additivity = max(additivity, float(np.max(np.abs(joint - split_a - split_b)) / np.max(np.abs(joint))))
    return _result(
        "carleson_necessity",
        max(worst / 1e-8, additivity / 1e-13, 0.0),
        1.0,
        ordering=worst,
        additivity=additivity,
    )


# operators

@register("operator_adjoint", budget=20.0)
def check_operator_adjoint(rng: np.random.Generator, cases: int) -> PropertyResult:
    worst = 0.0
    checked = 0
    for cone in (half_line(), quadrant()):
        axis = central_direction(cone)
        symbols = [
            constant_symbol(cone, 1.0),
            constant_symbol(cone, 0.5 + 0.5j),
            modulation_symbol(cone, 0.5 * sample_dual(cone, rng, 1)[0]),
        ]
        translations = [
            translation_map(cone, np.zeros(cone.dim)),
            translation_map(cone, 1j * axis),
            translation_map(cone, 0.3 + 0.5j * axis),
        ]
        for order in (0, 1, 2):
            weight = euclidean_weight(cone, order)
            for symbol in symbols:
                for translation in translations:
                    tests = [hs_function(random_density(cone, rng), weight) for _ in range(cases)]
                    worst = max(worst, wco_adjoint_check(symbol, translation, random_point(cone, rng), tests))
                    checked += len(tests)
    return _result("operator_adjoint", worst, 1e-7, checked=checked)


@register("operator_necessary_ratio", budget=20.0)
def check_necessary_ratio(rng: np.random.Generator, cases: int) -> PropertyResult:
    cone = half_line()
    params = KernelParams(euclidean_weight(cone, 0))
    i = tube_point(cone, [0.0], [1.0])
    ratio = wco_necessary_ratio(params, constant_symbol(cone, 1.0), translation_map(cone, [1j]), i)

    worst = -math.inf
    translation = translation_map(quadrant(), 0.5j * central_direction(quadrant()))
    quadrant_params = KernelParams(euclidean_weight(quadrant(), 1))
    for _ in range(10 * cases):
        w = random_point(quadrant(), rng, 2.0)
        worst = max(worst, wco_necessary_ratio(quadrant_params, constant_symbol(quadrant(), 1.0), translation, w) - 1.0)
    return _result(
        "operator_necessary_ratio",
        max(_rel(ratio, 0.5) / 1e-8, worst / 1e-8, 0.0),
        1.0,
        ratio=ratio,
        sup_excess=worst,
    )


@register("composition_contraction", budget=20.0)
def check_contraction(rng: np.random.Generator, cases: int) -> PropertyResult:
    worst = -math.inf
    for index in range(50 * cases):
        cone = half_line() if index % 2 == 0 else quadrant()
        function = hs_function(random_density(cone, rng), euclidean_weight(cone, index % 3))
        shift = rng.uniform(-1, 1, cone.dim) + 1j * sample_interior(cone, rng, 1, 0.5)[0]
        image = composition_apply(function, translation_map(cone, shift))
        norm = hs_norm(function)
        worst = max(worst, (hs_norm(image) - norm) / max(norm, REL_FLOOR))
    return _result("composition_contraction", max(worst, 0.0), 1e-9, excess=worst)


def run_suite(seed: int = 0, names: Optional[Iterable[str]] = None, cases: int = 1) -> List[PropertyResult]:
    selected = list(PROPERTIES) if names is None else list(names)
    unknown = [name for name in selected if name not in PROPERTIES]
    if unknown:
        raise KeyError(f"Unknown properties: {', '.join(unknown)}")

    results = []
    order = list(PROPERTIES)
    for name in selected:
        rng = np.random.default_rng([seed, order.index(name)])
        started = time.perf_counter()
        try:
            result = PROPERTIES[name](rng, cases)
        except TubeHardyError as e:
            result = PropertyResult(name=name, passed=False, defect=math.inf, threshold=0.0, detail=e.to_dict())
        elapsed = time.perf_counter() - started
        status = "passed" if result.passed else "FAILED"
        logger.info(f"{name}: {status} (defect {result.defect:.3e}, threshold {result.threshold:.1e}, {elapsed:.1f}s)")
        budget = BUDGETS[name] * cases
        if elapsed > budget:
            logger.warning(f"{name}: took {elapsed:.1f}s, budget is {budget:.0f}s")
        results.append(replace(result, elapsed=elapsed))
    return results
