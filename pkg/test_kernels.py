import math

import numpy as np
import pytest

from conftest import euclidean
from tube_hardy.cone_quadrature import adaptive_reference
from tube_hardy.densities import random_density
from tube_hardy.errors import NotInHalfPlane, NotInInterior, ParameterMismatch
from tube_hardy.fourier_laplace import evaluate, hs_function, hs_norm, tube_point
from tube_hardy.kernels import (
    KernelParams,
    gram_matrix,
    kernel_derivative,
    kernel_diag,
    kernel_eval,
    kernel_function,
    kernel_halfplane_closed,
    kernel_matrix,
    local_uniform_constant,
    point_evaluation_bound,
    reproduce_check,
)


def test_half_plane_kernel(half_line, params0):
    z, w = tube_point(half_line, 0.0, 2.0), tube_point(half_line, 0.0, 1.0)
    assert kernel_eval(params0, z, w) == pytest.approx(1 / 3, rel=1e-8)


def test_kernel_matches_closed_form(half_line, params0, rng):
    for _ in range(5):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.3, 2))
        w = complex(rng.uniform(-2, 2), rng.uniform(0.3, 2))
        value = kernel_eval(params0, tube_point(half_line, z.real, z.imag), tube_point(half_line, w.real, w.imag))
        assert value == pytest.approx(kernel_halfplane_closed(z, w), rel=1e-7)


def test_quadrant_kernel_factorises(quadrant):
    params = KernelParams(weight=euclidean(quadrant, 0))
    z = tube_point(quadrant, [0.0, 0.0], [1.0, 1.0])
    assert kernel_eval(params, z, z) == pytest.approx(0.25, rel=1e-8)
    assert kernel_diag(params, z) == pytest.approx(0.25, rel=1e-8)


def test_kernel_is_translation_invariant(wedge, rng):
    params = KernelParams(weight=euclidean(wedge, 1))
    z = tube_point(wedge, [0.2, -0.1], [1.0, 0.5])
    w = tube_point(wedge, [-0.3, 0.4], [1.5, 1.0])
    shift = rng.uniform(-1, 1, 2)
    moved_z = tube_point(wedge, np.asarray(z.x) + shift, z.y)
    moved_w = tube_point(wedge, np.asarray(w.x) + shift, w.y)
    assert kernel_eval(params, moved_z, moved_w) == pytest.approx(kernel_eval(params, z, w), rel=1e-8)


def test_kernel_is_hermitian(quadrant):
    params = KernelParams(weight=euclidean(quadrant, 1))
    z = tube_point(quadrant, [0.3, -0.2], [0.8, 1.2])
    w = tube_point(quadrant, [-0.5, 0.1], [1.1, 0.6])
    assert kernel_eval(params, z, w) == pytest.approx(np.conj(kernel_eval(params, w, z)), rel=1e-8)


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_diagonal_homogeneity(half_line, params0, t):
    assert kernel_diag(params0, tube_point(half_line, 0.7, t)) == pytest.approx(1 / (2 * t), rel=1e-8)


def test_sobolev_diagonal_matches_reference(half_line, weight1):
    params = KernelParams(weight=weight1)
    expected = adaptive_reference(half_line, lambda xi: np.exp(-2 * xi[:, 0]) / (1 + xi[:, 0] ** 2))
    assert kernel_diag(params, tube_point(half_line, 0.0, 1.0)) == pytest.approx(expected.real, rel=1e-7)


def test_closed_form_examples():
    assert kernel_halfplane_closed(1j, 1j) == pytest.approx(0.5)
    assert kernel_halfplane_closed(1 + 1j, 1 + 1j) == pytest.approx(0.5)
    assert kernel_halfplane_closed(2j, 1j) == pytest.approx(1 / 3)
    with pytest.raises(NotInHalfPlane):
        kernel_halfplane_closed(1.0, 1j)


def test_kernel_derivatives(half_line, params0):
    z = tube_point(half_line, 0.0, 1.0)
    w = tube_point(half_line, 0.5, 2.0)
    assert kernel_derivative(params0, [0], [0], z, w) == pytest.approx(kernel_eval(params0, z, w), rel=1e-10)
    assert kernel_derivative(params0, [1], [0], z, z) == pytest.approx(0.25j, rel=1e-8)
    assert kernel_derivative(params0, [0], [1], z, w) == pytest.approx(
        np.conj(kernel_derivative(params0, [1], [0], w, z)), rel=1e-8
    )


def test_reproducing_property(half_line, exp0, exp1):
    w = tube_point(half_line, 0.0, 1.0)
    for function in (exp0, exp1):
        lhs, rhs, rel_err = reproduce_check(function, w)
        assert lhs == pytest.approx(0.5, rel=1e-8)
        assert rhs == pytest.approx(0.5, rel=1e-8)
        assert rel_err <= 1e-8


def test_reproducing_random_densities(quadrant, rng):
    weight = euclidean(quadrant, 1)
    w = tube_point(quadrant, [0.4, -0.3], [0.9, 1.3])
    for _ in range(3):
        _, _, rel_err = reproduce_check(hs_function(random_density(quadrant, rng), weight), w)
        assert rel_err <= 1e-7


def test_kernel_function_norm(half_line, params0):
    w = tube_point(half_line, 1.0, 1.0)
    assert hs_norm(kernel_function(params0, w)) ** 2 == pytest.approx(kernel_diag(params0, w), rel=1e-8)


def test_gram_matrix(half_line, params0):
    points = [tube_point(half_line, x, y) for x, y in [(0.0, 1.0), (1.0, 0.5), (-2.0, 2.0)]]
    gram = gram_matrix(params0, points)
    assert np.allclose(gram, gram.conj().T)
    assert np.min(np.linalg.eigvalsh(gram)) > 0
    for j, w in enumerate(points):
        for l, z in enumerate(points):
            closed = kernel_halfplane_closed(complex(*z.x, *z.y), complex(*w.x, *w.y))
            assert gram[j, l] == pytest.approx(closed, rel=1e-7)


def test_point_evaluation_bound(half_line, params0, exp0):
    z = tube_point(half_line, 0.5, 0.5)
    assert abs(evaluate(exp0, z)) <= point_evaluation_bound(params0, exp0, z) * (1 + 1e-10)
    assert local_uniform_constant(params0, [z]) == pytest.approx(math.sqrt(1.0), rel=1e-8)
    assert local_uniform_constant(params0, []) == 0.0


def test_kernel_rejects_points_outside_the_tube(half_line, params0):
    z = tube_point(half_line, 0.0, 1.0)
    outside = type(z)(x=(0.0,), y=(-1.0,))
    with pytest.raises(NotInInterior):
        kernel_eval(params0, z, outside)


def test_reproduce_check_needs_matching_space(half_line, exp0, weight1):
    with pytest.raises(ParameterMismatch):
        reproduce_check(exp0, tube_point(half_line, 0.0, 1.0), KernelParams(weight=weight1))


@pytest.mark.parametrize("cone_name, order, xs, ys", [
    ("quadrant", 1, [[0.0, 0.0], [0.4, -0.3], [-0.2, 0.5]], [[1.0, 1.0], [0.6, 1.4], [1.2, 0.7]]),
    ("wedge", 0, [[0.1, 0.2], [-0.3, 0.0]], [[1.0, 0.3], [1.5, 1.0]]),
    ("light_cone", 0, [[0.0, 0.0, 0.0], [0.3, -0.2, 0.1]], [[0.0, 0.0, 1.0], [0.2, -0.1, 1.2]]),
])
def test_kernel_matrix_matches_pointwise_kernel(request, cone_name, order, xs, ys):
    cone = request.getfixturevalue(cone_name)
    params = KernelParams(weight=euclidean(cone, order))
    points = [tube_point(cone, x, y) for x, y in zip(xs, ys)]
    frame = points[::-1]
    matrix = kernel_matrix(params, points, frame)
    assert matrix.shape == (len(points), len(frame))
    for m, z in enumerate(points):
        for j, w in enumerate(frame):
            assert matrix[m, j] == pytest.approx(kernel_eval(params, z, w), rel=1e-10)

    gram = gram_matrix(params, points)
    assert np.array_equal(gram, gram.conj().T)
    for j, w in enumerate(points):
        for l, z in enumerate(points):
            assert gram[j, l] == pytest.approx(kernel_eval(params, z, w), rel=1e-10)


def test_kernel_matrix_of_no_points(quadrant):
    params = KernelParams(weight=euclidean(quadrant, 0))
    assert kernel_matrix(params, [], [tube_point(quadrant, [0.0, 0.0], [1.0, 1.0])]).shape == (0, 1)


def test_light_cone_kernel_is_hermitian(light_cone):
    params = KernelParams(weight=euclidean(light_cone, 0))
    z = tube_point(light_cone, [0.3, -0.2, 0.1], [0.2, -0.1, 1.2])
    w = tube_point(light_cone, [-0.1, 0.4, 0.0], [0.0, 0.3, 0.9])
    assert kernel_eval(params, z, w) == pytest.approx(np.conj(kernel_eval(params, w, z)), rel=1e-12)


@pytest.mark.parametrize("y", [[0.0, 0.0, 1.0], [0.3, 0.0, 1.0], [0.2, -0.4, 1.5]])
def test_light_cone_diagonal(light_cone, y):
    """K(z, z) = (π/4)·(y_3² - |y'|²)^{-3/2} without a weight"""
    params = KernelParams(weight=euclidean(light_cone, 0))
    expected = math.pi / 4 * (y[2] ** 2 - y[0] ** 2 - y[1] ** 2) ** -1.5
    assert kernel_diag(params, tube_point(light_cone, [0.5, 0.0, -0.5], y)) == pytest.approx(expected, rel=1e-7)


@pytest.mark.parametrize("cone_name, order, direction", [
    ("half_line", 1, [1.0]),
    ("wedge", 1, [1.0, 0.6]),
    ("light_cone", 0, [0.2, 0.1, 1.0]),
])
def test_kernel_diagonal_decreases_along_rays(request, cone_name, order, direction):
    cone = request.getfixturevalue(cone_name)
    params = KernelParams(weight=euclidean(cone, order))
    values = [
        kernel_diag(params, tube_point(cone, np.zeros(cone.dim), t * np.asarray(direction)))
        for t in np.linspace(0.5, 4.0, 8)
    ]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))


FD_STEP = 1e-4


@pytest.mark.parametrize("alpha, beta, moved, axis", [
    ([1, 0], [0, 0], "z", 0),
    ([0, 1], [0, 0], "z", 1),
    ([0, 0], [1, 0], "w", 0),
    ([0, 0], [0, 1], "w", 1),
])
def test_kernel_derivative_matches_finite_differences(wedge, alpha, beta, moved, axis):
    params = KernelParams(weight=euclidean(wedge, 1))
    x = np.array([0.2, -0.1])
    y_z, y_w = [1.0, 0.2], [1.3, 0.3]
    step = np.zeros(2)
    step[axis] = FD_STEP

    def kernel_at(offset):
        if moved == "z":
            return kernel_eval(params, tube_point(wedge, x + offset, y_z), tube_point(wedge, x, y_w))
        return kernel_eval(params, tube_point(wedge, x, y_z), tube_point(wedge, x + offset, y_w))

    # ∂_z and ∂_w̄ act as derivatives in Re z and Re w
    central = (kernel_at(step) - kernel_at(-step)) / (2 * FD_STEP)
    exact = kernel_derivative(params, alpha, beta, tube_point(wedge, x, y_z), tube_point(wedge, x, y_w))
    assert exact == pytest.approx(central, rel=1e-6)
