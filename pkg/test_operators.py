import math

import numpy as np
import pytest

from conftest import euclidean
from tube_hardy.cone_geometry import central_direction, sample_dual, sample_interior
from tube_hardy.densities import exponential, random_density
from tube_hardy.errors import NotSelfMap, ParameterMismatch, SymbolOutsideDualCone
from tube_hardy.fourier_laplace import evaluate, hs_function, hs_norm, tube_point
from tube_hardy.kernels import KernelParams
from tube_hardy.operators import (
    composition_apply,
    constant_symbol,
    contraction_norms,
    modulation_apply,
    modulation_symbol,
    multiplier_adjoint_check,
    multiplier_pointwise_check,
    symbol_apply,
    symbol_from_spec,
    translation_map,
    wco_adjoint_check,
    wco_necessary_ratio,
)


def test_zero_modulation_is_the_identity(half_line, exp1):
    image, constant = modulation_apply(exp1, modulation_symbol(half_line, [0.0]))
    assert constant == pytest.approx(1.0)
    assert hs_norm(image) == pytest.approx(hs_norm(exp1), rel=1e-10)


def test_modulation_shifts_the_spectrum(half_line, exp0):
    image, constant = modulation_apply(exp0, modulation_symbol(half_line, [1.0]))
    xi = np.array([[0.5], [1.0], [2.0]])
    assert np.allclose(image.density(xi), [0.0, 1.0, math.exp(-1)])
    assert constant == pytest.approx(1.0)
    assert hs_norm(image) == pytest.approx(math.sqrt(0.5), rel=1e-8)


def test_modulation_in_sobolev_space(half_line, exp1):
    image, constant = modulation_apply(exp1, modulation_symbol(half_line, [1.0]))
    assert hs_norm(image) ** 2 == pytest.approx(7 / 4, rel=1e-8)
    assert hs_norm(image) <= math.sqrt(constant) * hs_norm(exp1) * (1 + 1e-10)


def test_modulation_multiplies_point_values(quadrant, rng):
    weight = euclidean(quadrant, 0)
    symbol = modulation_symbol(quadrant, [0.5, 0.25])
    function = hs_function(exponential(quadrant, [1.0, 1.5]), weight)
    image, _ = modulation_apply(function, symbol)
    z = tube_point(quadrant, [0.3, -0.2], [0.7, 1.1])
    assert evaluate(image, z) == pytest.approx(symbol(z) * evaluate(function, z), rel=1e-7)


def test_modulation_frequency_must_be_in_the_dual_cone(quadrant):
    with pytest.raises(SymbolOutsideDualCone):
        modulation_symbol(quadrant, [1.0, -1.0])


def test_constant_symbol(half_line, exp0):
    image, constant = symbol_apply(exp0, constant_symbol(half_line, 2j))
    assert constant == pytest.approx(4.0)
    assert hs_norm(image) == pytest.approx(2 * hs_norm(exp0), rel=1e-10)


def test_symbol_from_spec(half_line):
    assert symbol_from_spec({"kind": "constant", "value": [0.0, 1.0]}, half_line).value == 1j
    assert symbol_from_spec({"kind": "modulation", "eta": [2.0]}, half_line).eta.tolist() == [2.0]
    with pytest.raises(ParameterMismatch):
        symbol_from_spec({"kind": "blaschke"}, half_line)


def test_pointwise_check(half_line):
    samples = [tube_point(half_line, x, y) for x, y in [(0.0, 1.0), (1.0, 0.1), (-3.0, 2.0)]]
    report = multiplier_pointwise_check(modulation_symbol(half_line, [1.0]), 1.0, samples)
    assert report.passed
    assert report.max_modulus == pytest.approx(math.exp(-0.1))
    assert multiplier_pointwise_check(constant_symbol(half_line, 1.0), 1.0, samples).passed
    flagged = multiplier_pointwise_check(constant_symbol(half_line, 2.0), 1.0, samples)
    assert flagged.flagged == (0, 1, 2)
    assert flagged.to_dict()["samples"] == 3


def test_translation_must_map_the_tube_into_itself(quadrant):
    with pytest.raises(NotSelfMap):
        translation_map(quadrant, [0.0 + 1j, 0.0 - 0.5j])
    real_shift = translation_map(quadrant, [1.0, -2.0])
    z = tube_point(quadrant, [0.0, 0.0], [1.0, 1.0])
    assert real_shift(z).x == (1.0, -2.0)


def test_zero_translation_is_the_identity(half_line, exp0):
    image = composition_apply(exp0, translation_map(half_line, [0.0]))
    z = tube_point(half_line, 0.4, 0.6)
    assert evaluate(image, z) == pytest.approx(evaluate(exp0, z), rel=1e-12)


def test_vertical_translation(half_line, exp0):
    image = composition_apply(exp0, translation_map(half_line, [1j]))
    xi = np.array([[0.0], [1.0]])
    assert np.allclose(image.density(xi), np.exp(-2 * xi[:, 0]))
    assert hs_norm(image) ** 2 == pytest.approx(0.25, rel=1e-8)
    composed, norm = contraction_norms(exp0, translation_map(half_line, [1j]))
    assert composed <= norm


def test_composition_is_evaluation_at_the_image(quadrant, rng):
    weight = euclidean(quadrant, 1)
    function = hs_function(random_density(quadrant, rng), weight)
    translation = translation_map(quadrant, [0.3 + 0.2j, -0.4 + 0.5j])
    image = composition_apply(function, translation)
    for _ in range(5):
        z = tube_point(quadrant, rng.uniform(-1, 1, 2), rng.uniform(0.3, 1.5, 2))
        assert evaluate(image, z) == pytest.approx(evaluate(function, translation(z)), rel=1e-7)


def test_adjoint_identity_for_the_identity_operator(half_line, exp0):
    w = tube_point(half_line, 0.0, 1.0)
    error = wco_adjoint_check(constant_symbol(half_line), translation_map(half_line, [0.0]), w, [exp0])
    assert error <= 1e-10


def test_adjoint_identity_for_a_vertical_translation(half_line, exp0):
    w = tube_point(half_line, 0.0, 1.0)
    translation = translation_map(half_line, [1j])
    image = composition_apply(exp0, translation)
    assert evaluate(image, w) == pytest.approx(1 / 3, rel=1e-8)
    assert wco_adjoint_check(constant_symbol(half_line), translation, w, [exp0]) <= 1e-8


def test_adjoint_identity_for_a_modulation(half_line, exp0):
    w = tube_point(half_line, 0.0, 1.0)
    symbol = modulation_symbol(half_line, [1.0])
    image, _ = modulation_apply(exp0, symbol)
    assert evaluate(image, w) == pytest.approx(math.exp(-1) / 2, rel=1e-8)
    assert multiplier_adjoint_check(exp0, symbol, w) <= 1e-7


def test_adjoint_identity_on_the_wedge(wedge, rng):
    weight = euclidean(wedge, 1)
    tests = [hs_function(random_density(wedge, rng), weight) for _ in range(3)]
    symbol = modulation_symbol(wedge, [1.0, 0.5])
    translation = translation_map(wedge, [0.2 + 0.3j, -0.1 + 0.1j])
    w = tube_point(wedge, [0.1, 0.2], [1.0, 0.5])
    assert wco_adjoint_check(symbol, translation, w, tests) <= 1e-7


def test_necessary_ratio_of_a_vertical_translation(half_line, params0):
    translation = translation_map(half_line, [1j])
    identity = constant_symbol(half_line)
    for v in (0.5, 1.0, 3.0):
        w = tube_point(half_line, 0.7, v)
        assert wco_necessary_ratio(params0, identity, translation, w) == pytest.approx(v / (v + 1), rel=1e-8)


def test_necessary_ratio_examples(half_line, params0):
    w = tube_point(half_line, 0.0, 1.0)
    identity = translation_map(half_line, [0.0])
    assert wco_necessary_ratio(params0, constant_symbol(half_line), identity, w) == pytest.approx(1.0, rel=1e-12)
    modulation = modulation_symbol(half_line, [1.0])
    assert wco_necessary_ratio(params0, modulation, identity, w) == pytest.approx(math.exp(-2), rel=1e-8)


def test_operators_reject_foreign_functions(half_line, quadrant, exp0):
    with pytest.raises(ParameterMismatch):
        composition_apply(exp0, translation_map(quadrant, [0.0, 0.0]))


@pytest.mark.parametrize("cone_name, first, second", [
    ("quadrant", [0.3 + 0.2j, -0.4 + 0.5j], [-0.1 + 0.7j, 0.6 + 0.0j]),
    ("light_cone", [0.1 + 0.0j, -0.2 + 0.1j, 0.3 + 0.4j], [0.4 + 0.2j, 0.0 - 0.1j, -0.5 + 0.3j]),
])
def test_translations_form_a_semigroup(request, rng, cone_name, first, second):
    cone = request.getfixturevalue(cone_name)
    function = hs_function(random_density(cone, rng), euclidean(cone, 1))
    b1, b2 = translation_map(cone, first), translation_map(cone, second)
    both = translation_map(cone, np.asarray(first) + np.asarray(second))

    stepwise = composition_apply(composition_apply(function, b1), b2)
    direct = composition_apply(function, both)
    xi = sample_dual(cone, rng, 200)
    xi = xi[np.linalg.norm(xi, axis=1) <= 20.0]
    assert np.allclose(stepwise.density(xi), direct.density(xi), rtol=1e-13, atol=0)

    z = tube_point(cone, np.zeros(cone.dim), central_direction(cone))
    assert b2(b1(z)).as_complex() == pytest.approx(both(z).as_complex(), abs=1e-15)


def test_light_cone_composition_is_evaluation_at_the_image(light_cone, rng):
    function = hs_function(random_density(light_cone, rng), euclidean(light_cone, 0))
    translation = translation_map(light_cone, [0.2 + 0.1j, -0.1 + 0.0j, 0.0 + 0.3j])
    image = composition_apply(function, translation)
    for y in sample_interior(light_cone, rng, 3):
        z = tube_point(light_cone, rng.uniform(-1, 1, 3), y)
        assert evaluate(image, z) == pytest.approx(evaluate(function, translation(z)), rel=1e-7)
    composed, norm = contraction_norms(function, translation)
    assert composed <= norm * (1 + 1e-10)


def test_light_cone_adjoint_identity(light_cone, rng):
    weight = euclidean(light_cone, 0)
    tests = [hs_function(random_density(light_cone, rng), weight) for _ in range(2)]
    translation = translation_map(light_cone, [0.1 + 0.1j, 0.2 + 0.0j, -0.3 + 0.2j])
    w = tube_point(light_cone, [0.1, -0.2, 0.0], [0.1, 0.2, 0.9])
    assert wco_adjoint_check(constant_symbol(light_cone, 2.0 - 0.5j), translation, w, tests) <= 1e-7


def test_light_cone_necessary_ratio(light_cone):
    """K(z, z) ∝ (y_3² - |y'|²)^{-3/2} without a weight"""
    params = KernelParams(weight=euclidean(light_cone, 0))
    eta = np.array([0.2, 0.1, 0.5])
    lift = np.array([0.0, 0.1, 0.4])
    translation = translation_map(light_cone, 1j * lift)
    y = np.array([0.3, -0.1, 1.0])
    w = tube_point(light_cone, [0.4, 0.0, -0.3], y)

    def form(v):
        return v[2] ** 2 - v[0] ** 2 - v[1] ** 2

    expected = math.exp(-2 * eta @ y) * (form(y) / form(y + lift)) ** 1.5
    ratio = wco_necessary_ratio(params, modulation_symbol(light_cone, eta), translation, w)
    assert ratio == pytest.approx(expected, rel=1e-7)
