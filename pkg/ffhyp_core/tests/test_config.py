"""Tests for YAML configuration loading and validation."""

import pytest
import yaml

from ffhyp_core.config import BudgetConfig, BudgetExceededError, FfhypConfig, load_config


def test_defaults():
    config = load_config()
    assert config.budgets.max_group_size == 100_000
    assert config.budgets.max_space_size == 2**24
    assert config.smooth.e_max is None
    assert config.census.seed == 0
    assert config.output.format == "json"


def test_round_trip():
    """to_dict / from_dict preserve every field."""
    config = FfhypConfig.from_dict({"budgets": {"max_group_size": 500}, "census": {"threads": 2, "seed": 9}})
    again = FfhypConfig.from_dict(config.to_dict())
    assert again.to_dict() == config.to_dict()
    assert again.budgets.max_group_size == 500
    assert again.census.threads == 2


def test_from_yaml_resolves_relative_dirs(tmp_path):
    path = tmp_path / "conf" / "ffhyp.yaml"
    path.parent.mkdir()
    path.write_text(yaml.safe_dump({"census": {"checkpoint_dir": "ckpt"}, "output": {"output_dir": "/abs/out"}}))
    config = FfhypConfig.from_yaml(path)
    assert config.census.checkpoint_dir == str((path.parent / "ckpt").resolve())
    assert config.output.output_dir == "/abs/out"


def test_from_yaml_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        FfhypConfig.from_yaml(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(ValueError):
        FfhypConfig.from_yaml(bad)


@pytest.mark.parametrize(
    "data",
    [
        {"budgets": {"max_group_size": 0}},
        {"budgets": {"table_field_size": 2**21}},
        {"smooth": {"e_max": 0}},
        {"census": {"threads": 0}},
        {"census": {"confidence": 1.5}},
        {"output": {"format": "xml"}},
    ],
)
def test_validation(data):
    with pytest.raises(ValueError):
        FfhypConfig.from_dict(data)


def test_budget_check_names_the_key():
    with pytest.raises(BudgetExceededError, match="max_points"):
        BudgetConfig(max_points=10).check("points", 11, "max_points")
    BudgetConfig(max_points=10).check("points", 10, "max_points")
