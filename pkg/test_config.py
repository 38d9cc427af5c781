import json

import pytest

from tube_hardy.config import Settings, load_config, parse_config
from tube_hardy.errors import ConfigInvalid

HALF_LINE = {"kind": "orthant", "dim": 1}


def test_minimal_config():
    config = parse_config({"cone": HALF_LINE})
    assert config.order == 0
    assert config.tol == 1e-12
    assert config.build_weight().cone.dim == 1


def test_unknown_keys_are_rejected():
    with pytest.raises(ConfigInvalid) as info:
        parse_config({"cone": HALF_LINE, "colour": "blue"})
    assert info.value.details["errors"][0]["loc"] == ["colour"]
    assert info.value.exit_code == 2


@pytest.mark.parametrize("payload", [
    {"cone": {"kind": "orthant", "dim": 0}},
    {"cone": HALF_LINE, "gauge": {"kind": "linear"}},
    {"cone": HALF_LINE, "target": 2.0},
    {"cone": HALF_LINE, "order": -1},
    {"cone": HALF_LINE, "carleson": {"measure": {"points": [{"x": [0], "y": [1], "mass": -1}]}, "frame": [{"x": [0], "y": [1]}]}},
    {"cone": HALF_LINE, "decompose": {"grid_file": "grid.csv"}},
])
def test_invalid_configs(payload):
    with pytest.raises(ConfigInvalid):
        parse_config(payload)


def test_cone_errors_surface_as_config_errors():
    with pytest.raises(ConfigInvalid) as info:
        parse_config({"cone": {"kind": "lorentz", "dim": 5}})
    assert info.value.details["cause"]["kind"] == "UnsupportedDimension"


def test_missing_block():
    config = parse_config({"cone": HALF_LINE})
    with pytest.raises(ConfigInvalid):
        config.block("kernel")


def test_file_references_resolve_against_the_config(tmp_path):
    (tmp_path / "grid.json").write_text("{}")
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"cone": HALF_LINE, "decompose": {"grid_file": "grid.json"}}))
    config = load_config(path)
    assert config.decompose.grid_file == str(tmp_path.resolve() / "grid.json")


def test_missing_file_reference(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"cone": HALF_LINE, "decompose": {"grid_file": "nowhere.json"}}))
    with pytest.raises(ConfigInvalid) as info:
        load_config(path)
    assert info.value.details["missing"] == ["nowhere.json"]


def test_unreadable_configs(tmp_path):
    with pytest.raises(ConfigInvalid):
        load_config(tmp_path / "absent.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigInvalid):
        load_config(broken)
    listed = tmp_path / "list.json"
    listed.write_text("[]")
    with pytest.raises(ConfigInvalid):
        load_config(listed)


def test_shipped_configs_parse():
    from conftest import BASE_DIR

    paths = sorted((BASE_DIR / "configs").glob("*.json"))
    assert paths
    for path in paths:
        load_config(path)


def test_settings_from_env(monkeypatch):
    monkeypatch.setenv("TUBE_HARDY_TARGET", "1e-6")
    monkeypatch.setenv("TUBE_HARDY_LOG_LEVEL", "debug")
    settings = Settings.from_env()
    assert settings.target == 1e-6
    assert settings.log_level == "DEBUG"
    assert settings.limits().target == 1e-6


@pytest.mark.parametrize("name, value", [
    ("TUBE_HARDY_TARGET", "abc"),
    ("TUBE_HARDY_TARGET", "1.5"),
    ("TUBE_HARDY_MAX_NODES", "0"),
    ("TUBE_HARDY_LOG_LEVEL", "LOUD"),
])
def test_bad_settings(monkeypatch, name, value):
    monkeypatch.setenv(name, value)
    with pytest.raises(ConfigInvalid):
        Settings.from_env()
