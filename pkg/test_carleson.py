import json
import math

import numpy as np
import pytest

from conftest import euclidean
from tube_hardy.carleson import (
    carleson_form,
    carleson_report,
    discrete_measure,
    embedding_estimate,
    embedding_matrices,
    measure_from_json,
    measure_from_list,
    spectral_embedding_check,
    testing_ratio as kernel_test_ratio,
)
from tube_hardy.cone_geometry import sample_interior
from tube_hardy.densities import exponential, random_density
from tube_hardy.errors import GramIllConditioned, MeasureInvalid, NotInInterior
from tube_hardy.fourier_laplace import hs_function, hs_norm, tube_point
from tube_hardy.kernels import KernelParams


@pytest.fixture
def point_mass(half_line):
    """δ at z = i"""
    return discrete_measure([tube_point(half_line, 0.0, 1.0)], [1.0])


def test_point_mass_kernel_test(half_line, params0, point_mass):
    assert kernel_test_ratio(params0, point_mass, tube_point(half_line, 0.0, 1.0)) == pytest.approx(0.5, rel=1e-8)


def test_tiny_mass_gives_tiny_ratio(half_line, params0):
    measure = discrete_measure([tube_point(half_line, 0.0, 1.0)], [1e-12])
    assert kernel_test_ratio(params0, measure, tube_point(half_line, 0.0, 1.0)) == pytest.approx(0.5e-12, rel=1e-8)


def test_kernel_test_decays_along_the_boundary(half_line, params0, point_mass):
    for x0 in (0.0, 2.0, 10.0):
        expected = 2 / (4 + x0 ** 2)
        w = tube_point(half_line, x0, 1.0)
        assert kernel_test_ratio(params0, point_mass, w) == pytest.approx(expected, rel=1e-7)


def test_point_mass_embedding(half_line, params0, point_mass):
    frame = [tube_point(half_line, 0.0, 1.0)]
    compressed, gram = embedding_matrices(params0, point_mass, frame)
    assert compressed[0, 0] == pytest.approx(0.25, rel=1e-8)
    assert gram[0, 0] == pytest.approx(0.5, rel=1e-8)
    assert embedding_estimate(params0, point_mass, frame) == pytest.approx(0.5, rel=1e-8)


def test_embedding_is_linear_in_the_measure(half_line, params0, point_mass):
    frame = [tube_point(half_line, 0.0, 1.0), tube_point(half_line, 1.0, 0.5)]
    base = embedding_estimate(params0, point_mass, frame)
    assert embedding_estimate(params0, point_mass.scaled(3.0), frame) == pytest.approx(3 * base, rel=1e-10)


def test_nested_frames_are_monotone(quadrant, rng):
    params = KernelParams(weight=euclidean(quadrant, 1))
    measure = discrete_measure(
        [tube_point(quadrant, rng.uniform(-1, 1, 2), rng.uniform(0.5, 1.5, 2)) for _ in range(4)],
        rng.uniform(0.2, 1.0, 4),
    )
    frame = [tube_point(quadrant, [0.0, 0.0], [1.0, 1.0]), tube_point(quadrant, [1.0, -1.0], [0.6, 1.4]),
             tube_point(quadrant, [-1.0, 0.5], [1.5, 0.7])]
    bounds = [embedding_estimate(params, measure, frame[:size]) for size in (1, 2, 3)]
    assert bounds[0] <= bounds[1] * (1 + 1e-9)
    assert bounds[1] <= bounds[2] * (1 + 1e-9)


def test_report_orders_the_two_bounds(half_line, params0, rng):
    measure = measure_from_list(half_line, [
        {"x": [float(x)], "y": [float(y)], "mass": float(m)}
        for x, y, m in zip(rng.uniform(-2, 2, 5), rng.uniform(0.3, 2, 5), rng.uniform(0.1, 2, 5))
    ])
    frame = [tube_point(half_line, x, 1.0) for x in (-1.0, 0.0, 1.0)]
    report = carleson_report(params0, measure, frame)
    assert report.kernel_test_sup <= report.embedding_lower_bound * (1 + 1e-8)
    assert report.to_dict()["test_points"] == 3
    assert report.measure_size == 5


def test_spectral_check_extremal_case(half_line, params0, point_mass):
    check = spectral_embedding_check(params0, point_mass, [exponential(half_line, [1.0])], 0.5)
    assert check.lhs[0] == pytest.approx(0.25, rel=1e-8)
    assert check.rhs[0] == pytest.approx(0.25, rel=1e-8)
    assert check.max_ratio == pytest.approx(1.0, rel=1e-7)

    doubled = spectral_embedding_check(params0, point_mass, [exponential(half_line, [1.0])], 1.0)
    assert doubled.max_ratio == pytest.approx(0.5, rel=1e-7)
    assert not doubled.violations


def test_spectral_check_flags_violations(half_line, params0, point_mass, rng):
    densities = [random_density(half_line, rng) for _ in range(4)]
    check = spectral_embedding_check(params0, point_mass, densities, 0.05)
    assert check.violations == tuple(i for i, r in enumerate(check.ratios) if r > 1 + 1e-10)
    assert check.max_ratio <= 0.5 / 0.05 * (1 + 1e-7)


def test_carleson_form(half_line, exp0, point_mass):
    assert carleson_form(point_mass, exp0, exp0) == pytest.approx(0.25, rel=1e-8)
    assert carleson_form(point_mass, exp0, exp0).real <= 0.5 * hs_norm(exp0) ** 2 * (1 + 1e-8)


def test_measure_validation(half_line):
    z = tube_point(half_line, 0.0, 1.0)
    with pytest.raises(MeasureInvalid):
        discrete_measure([z], [0.0])
    with pytest.raises(MeasureInvalid):
        discrete_measure([z, z], [1.0])
    with pytest.raises(MeasureInvalid):
        measure_from_list(half_line, [{"x": [0.0], "y": [1.0]}])
    with pytest.raises(NotInInterior):
        measure_from_list(half_line, [{"x": [0.0], "y": [-1.0], "mass": 1.0}])


def test_measure_arithmetic(half_line, point_mass):
    other = discrete_measure([tube_point(half_line, 1.0, 2.0)], [0.5])
    combined = point_mass + other
    assert combined.size == 2
    assert combined.to_list() == [
        {"x": [0.0], "y": [1.0], "mass": 1.0},
        {"x": [1.0], "y": [2.0], "mass": 0.5},
    ]


def test_measure_from_json(tmp_path, half_line):
    path = tmp_path / "measure.json"
    path.write_text(json.dumps([{"x": [0.5], "y": [0.5], "mass": 2.0}]))
    measure = measure_from_json(path, half_line)
    assert measure.masses.tolist() == [2.0]


def test_repeated_frame_point_is_ill_conditioned(half_line, params0, point_mass):
    w = tube_point(half_line, 0.0, 1.0)
    with pytest.raises(GramIllConditioned):
        embedding_estimate(params0, point_mass, [w, w])


def test_empty_frame(params0, point_mass):
    with pytest.raises(MeasureInvalid):
        embedding_estimate(params0, point_mass, [])


def test_light_cone_point_mass(light_cone):
    """K(z, z) = (π/4)·(y_3² - |y'|²)^{-3/2} for the unweighted light-cone kernel"""
    params = KernelParams(weight=euclidean(light_cone, 0))
    z = tube_point(light_cone, [0.1, 0.0, -0.2], [0.3, 0.0, 1.0])
    expected = math.pi / 4 * 0.91 ** -1.5
    measure = discrete_measure([z], [1.0])
    assert kernel_test_ratio(params, measure, z) == pytest.approx(expected, rel=1e-7)
    assert embedding_estimate(params, measure, [z]) == pytest.approx(expected, rel=1e-7)


def test_light_cone_report_orders_the_two_bounds(light_cone, rng):
    params = KernelParams(weight=euclidean(light_cone, 0))
    measure = discrete_measure(
        [tube_point(light_cone, rng.uniform(-1, 1, 3), y) for y in sample_interior(light_cone, rng, 3)],
        rng.uniform(0.2, 1.0, 3),
    )
    frame = [tube_point(light_cone, [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
             tube_point(light_cone, [0.5, -0.5, 0.0], [0.2, 0.1, 0.8])]
    report = carleson_report(params, measure, frame)
    assert report.kernel_test_sup <= report.embedding_lower_bound * (1 + 1e-8)
    assert embedding_estimate(params, measure, frame[:1]) <= report.embedding_lower_bound * (1 + 1e-9)
