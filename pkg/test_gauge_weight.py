import math

import numpy as np
import pytest

from conftest import euclidean
from tube_hardy.cone_geometry import sample_dual
from tube_hardy.errors import DimensionMismatch, GaugeError, OutsideDualCone, OutsideSpectralSet
from tube_hardy.gauge_weight import (
    build_gauge,
    build_weight,
    gauge_eval,
    reflected_weight_eval,
    weight_eval,
)


def test_euclidean_gauge(quadrant):
    gauge = build_gauge({"kind": "euclidean"}, quadrant)
    assert gauge_eval(gauge, [3.0, 4.0]) == pytest.approx(5.0)
    assert gauge_eval(gauge, [0.0, 0.0]) == 0.0


def test_linear_gauge(quadrant):
    gauge = build_gauge({"kind": "linear", "direction": [1.0, 1.0]}, quadrant)
    assert gauge_eval(gauge, [1.0, 1.0]) == pytest.approx(2.0)
    assert gauge.to_dict() == {"kind": "linear", "direction": [1.0, 1.0]}


@pytest.mark.parametrize("spec", [{"kind": "euclidean"}, {"kind": "linear", "direction": [2.0, 0.5]}])
def test_gauge_is_homogeneous(quadrant, rng, spec):
    gauge = build_gauge(spec, quadrant)
    for t, xi in zip(rng.uniform(0, 10, size=500), sample_dual(quadrant, rng, 500)):
        t = max(t, 1e-3)
        tolerance = 1e-12 * (1 + t * np.linalg.norm(xi))
        assert abs(gauge_eval(gauge, t * xi) - t * gauge_eval(gauge, xi)) <= tolerance


def test_linear_direction_must_be_interior(quadrant):
    with pytest.raises(GaugeError):
        build_gauge({"kind": "linear", "direction": [1.0, 0.0]}, quadrant)
    with pytest.raises(DimensionMismatch):
        build_gauge({"kind": "linear", "direction": [1.0]}, quadrant)
    with pytest.raises(GaugeError):
        build_gauge({"kind": "taxicab"}, quadrant)


def test_gauge_outside_dual_cone(quadrant):
    gauge = build_gauge({"kind": "euclidean"}, quadrant)
    with pytest.raises(OutsideDualCone):
        gauge_eval(gauge, [-1.0, 1.0])


def test_weight_examples(half_line):
    assert weight_eval(euclidean(half_line, 0), [7.0]) == 1.0
    assert weight_eval(euclidean(half_line, 1), [2.0]) == pytest.approx(5.0)
    assert weight_eval(euclidean(half_line, 2), [1.0]) == pytest.approx(3.0)


@pytest.mark.parametrize("order", [0, 1, 2, 3])
def test_weight_is_equivalent_to_sobolev_power(quadrant, rng, order):
    weight = euclidean(quadrant, order)
    for xi in sample_dual(quadrant, rng, 500, scale=3.0):
        ratio = (1 + np.dot(xi, xi)) ** order / weight_eval(weight, xi)
        assert 1.0 - 1e-12 <= ratio <= 2 ** order * (1 + 1e-12)


def test_weight_grows_with_the_order(wedge, rng):
    points = sample_dual(wedge, rng, 200, scale=2.0)
    previous = euclidean(wedge, 0)(points)
    assert np.all(previous == 1.0)
    for order in range(1, 5):
        current = euclidean(wedge, order)(points)
        assert np.all(current >= previous)
        previous = current


def test_reflected_weight_is_symmetric(wedge, rng):
    weight = euclidean(wedge, 2)
    for xi in sample_dual(wedge, rng, 100):
        assert reflected_weight_eval(weight, -xi) == reflected_weight_eval(weight, xi)
        assert reflected_weight_eval(weight, xi) == pytest.approx(weight_eval(weight, xi), rel=1e-15)


def test_reflected_weight(half_line):
    weight = euclidean(half_line, 1)
    assert reflected_weight_eval(weight, [-1.0]) == pytest.approx(2.0)
    assert reflected_weight_eval(weight, [1.0]) == pytest.approx(2.0)
    assert reflected_weight_eval(weight, [0.0]) == 1.0


def test_reflected_weight_outside_both_cones(quadrant):
    with pytest.raises(OutsideSpectralSet):
        reflected_weight_eval(euclidean(quadrant, 1), [1.0, -1.0])


def test_build_weight_rejects_bad_orders(half_line):
    gauge = build_gauge({"kind": "euclidean"}, half_line)
    for order in (-1, 1.5, True):
        with pytest.raises(GaugeError):
            build_weight(order, gauge)


def test_pole_distance(half_line):
    assert euclidean(half_line, 0).pole_distance == math.inf
    assert euclidean(half_line, 1).pole_distance == pytest.approx(1.0)
