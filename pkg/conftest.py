import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from tube_hardy.cone_geometry import build_cone
from tube_hardy.cone_quadrature import QuadratureLimits, clear_rule_cache, set_limits
from tube_hardy.densities import exponential
from tube_hardy.fourier_laplace import hs_function
from tube_hardy.gauge_weight import build_gauge, build_weight
from tube_hardy.kernels import KernelParams

BASE_DIR = Path(__file__).resolve().parent


@pytest.fixture(autouse=True)
def default_limits():
    set_limits(QuadratureLimits())
    yield
    clear_rule_cache()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Cones

@pytest.fixture
def half_line():
    return build_cone({"kind": "orthant", "dim": 1})


@pytest.fixture
def quadrant():
    return build_cone({"kind": "orthant", "dim": 2})


@pytest.fixture
def wedge():
    """Cone between the rays (1,0) and (1,1)"""
    return build_cone({"kind": "simplicial", "dim": 2, "generators": [[1.0, 1.0], [0.0, 1.0]]})


@pytest.fixture
def light_cone():
    return build_cone({"kind": "lorentz", "dim": 3})


# Weights and functions

def euclidean(cone, order):
    return build_weight(order, build_gauge({"kind": "euclidean"}, cone))


@pytest.fixture
def weight0(half_line):
    return euclidean(half_line, 0)


@pytest.fixture
def weight1(half_line):
    return euclidean(half_line, 1)


@pytest.fixture
def params0(weight0):
    return KernelParams(weight=weight0)


@pytest.fixture
def exp_density(half_line):
    """f(ξ) = e^{-ξ}"""
    return exponential(half_line, [1.0])


@pytest.fixture
def exp0(exp_density, weight0):
    return hs_function(exp_density, weight0)


@pytest.fixture
def exp1(exp_density, weight1):
    return hs_function(exp_density, weight1)


# CLI

@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def cli(tmp_path):
    from app import create_app

    return create_app(env_file=tmp_path / "missing.env")


@pytest.fixture
def write_config(tmp_path):
    def write(payload, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(payload))
        return path

    return write
