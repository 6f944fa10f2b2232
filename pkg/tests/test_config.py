import pytest

from capfin.errors import ValidationError
from capfin.solver.config import SolverConfig, load_yaml_config

from .conftest import CONF_DIR


def test_solver_config_defaults_and_validation():
    config = SolverConfig()
    assert config.grid_points == 201
    assert config.refinement_levels == 1
    with pytest.raises(ValueError):
        SolverConfig(grid_min=1.0, grid_max=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(multiplier_lo=2.0, multiplier_hi=1.0)
    with pytest.raises(ValueError):
        SolverConfig(tightness_epsilon=0.0)


def test_load_yaml_config(tmp_path):
    data = load_yaml_config(CONF_DIR / "solver.yml")
    assert data["grid_points"] == 201
    assert data["quadrature"]["rel_tol"] == 1e-9
    assert SolverConfig(**data).refinement_levels == 3

    with pytest.raises(ValidationError):
        load_yaml_config(tmp_path / "missing.yml")
    scalar = tmp_path / "scalar.yml"
    scalar.write_text("- 1\n- 2\n")
    with pytest.raises(ValidationError):
        load_yaml_config(scalar)


def test_output_grid_size_accepts_both_names():
    assert SolverConfig(y_grid_points=32).y_grid_points == 32
    assert SolverConfig(y_points_per_noise=48).y_grid_points == 48
    assert "y_grid_points" in SolverConfig().model_dump()
    with pytest.raises(ValueError):
        SolverConfig(y_grid_points=2)
