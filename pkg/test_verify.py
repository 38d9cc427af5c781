import json
import math

import numpy as np
import pytest

from conftest import euclidean
from tube_hardy.boundary_decomposition import analyze_grid, grid_from_csv, grid_from_json
from tube_hardy.carleson import measure_from_json
from tube_hardy.cone_geometry import build_cone
from tube_hardy.cone_quadrature import adaptive_reference
from tube_hardy.densities import exponential, poly_exponential
from tube_hardy.fourier_laplace import hs_function, hs_norm
from tube_hardy.verify import BUDGETS, PROPERTIES, laplace_closed_form, quadrant_weighted_mass, run_suite

FAST = ["paley_wiener_closed_form", "kernel_closed_form", "kernel_symmetry", "carleson_point_mass"]


def test_suite_registers_every_property():
    assert {
        "paley_wiener_isometry",
        "quadrature_oracle",
        "derivative_estimates",
        "reproducing_property",
        "gram_psd",
        "decomposition_identity",
        "boundary_convergence",
        "extension_consistency",
        "carleson_necessity",
        "operator_adjoint",
        "operator_necessary_ratio",
        "composition_contraction",
    } <= set(PROPERTIES)


def test_fast_properties_pass():
    results = run_suite(seed=3, names=FAST)
    assert [result.name for result in results] == FAST
    for result in results:
        assert result.passed, result.to_dict()
        assert result.defect <= result.threshold


def test_suite_is_reproducible():
    first = [r.to_dict() for r in run_suite(seed=5, names=["kernel_symmetry"])]
    second = [r.to_dict() for r in run_suite(seed=5, names=["kernel_symmetry"])]
    assert first == second


def test_unknown_property():
    with pytest.raises(KeyError):
        run_suite(names=["nope"])


def test_datagen_writes_readable_samples(runner, tmp_path):
    from data.datagen import main

    result = runner.invoke(main, ["--seed", "1", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output

    two_cosine = analyze_grid(grid_from_csv(tmp_path / "two_cosine.csv", 6.283185307179586))
    assert two_cosine.bins.energy == pytest.approx(2.0)
    assert grid_from_json(tmp_path / "quadrant_grid.json").dim == 2

    quadrant = build_cone({"kind": "orthant", "dim": 2})
    assert measure_from_json(tmp_path / "quadrant_measure.json", quadrant).size == 5
    assert len(json.loads((tmp_path / "half_line_measure.json").read_text())) == 6


@pytest.mark.parametrize("name", ["paley_wiener_isometry", "quadrature_oracle"])
def test_oracle_properties_meet_their_budgets(name):
    [result] = run_suite(seed=0, names=[name])
    assert result.passed, result.to_dict()
    assert result.elapsed <= BUDGETS[name]


def test_every_property_has_a_budget():
    assert set(BUDGETS) == set(PROPERTIES)
    assert sum(BUDGETS.values()) > 0


def test_elapsed_time_stays_out_of_reports():
    [result] = run_suite(seed=0, names=["carleson_point_mass"])
    assert result.elapsed > 0
    assert "elapsed" not in result.to_dict()


def test_quadrant_weighted_mass(quadrant):
    def moments(axis, m):
        return math.factorial(m) / 2.0 ** (m + 1)

    assert quadrant_weighted_mass(0, moments) == pytest.approx(0.25)
    assert quadrant_weighted_mass(1, moments) == pytest.approx(0.5)
    function = hs_function(exponential(quadrant, [1.0, 1.0]), euclidean(quadrant, 1))
    assert hs_norm(function) ** 2 == pytest.approx(0.5, rel=1e-8)


def test_laplace_closed_form_on_the_quadrant(quadrant):
    decay, phase = np.array([1.0, 1.0]), np.zeros(2)
    value = laplace_closed_form(quadrant, {(0, 0): 1.0}, decay, phase, np.array([1j, 1j]))
    assert value == pytest.approx(0.25)
    linear = laplace_closed_form(quadrant, {(1, 0): 1.0}, decay, phase, np.array([1j, 1j]))
    assert linear == pytest.approx(0.125)


def test_laplace_closed_form_matches_adaptive_quadrature(wedge):
    decay, phase = np.array([1.0, 0.8]), np.array([0.3, -0.2])
    terms = {(0, 0): 1.0 - 0.5j, (0, 1): 0.25 + 1j}
    z = np.array([0.4 + 1.0j, -0.3 + 0.5j])
    density = poly_exponential(wedge, decay, terms, phase)
    reference = adaptive_reference(wedge, lambda xi: np.exp(1j * (xi @ z)) * density(xi), tol=1e-11)
    assert laplace_closed_form(wedge, terms, decay, phase, z) == pytest.approx(reference, rel=1e-8)
