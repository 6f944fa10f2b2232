from __future__ import annotations

from pathlib import Path
from typing import Any, Dict

import yaml
from pydantic import AliasChoices, BaseModel, ConfigDict, Field, model_validator

from ..errors import ValidationError
from ..numerics.quadrature import QuadratureConfig


class SolverConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    grid_min: float = -6.0
    grid_max: float = 6.0
    grid_points: int = Field(201, ge=2)
    # output cells across one noise window; the older name is still accepted
    y_grid_points: int = Field(64, ge=4, validation_alias=AliasChoices("y_grid_points", "y_points_per_noise"))
    quantile_cutoff: float = Field(1e-8, gt=0, lt=0.5)

    ba_tol: float = Field(1e-9, gt=0)  # on Lagrangian increments
    ba_max_iter: int = Field(5000, ge=1)
    multiplier_lo: float = Field(0.0, ge=0)
    multiplier_hi: float = Field(1.0, gt=0)
    bisection_tol: float = Field(1e-6, gt=0)  # on |achieved cost - budget|

    refinement_levels: int = Field(1, ge=1)
    saturation_threshold: float = Field(0.01, gt=0)
    tightness_epsilon: float = Field(0.1, gt=0, le=1)  # K_eps used to widen refined grids

    prune_tol: float = Field(1e-14, ge=0)  # weights at or below are dropped from the optimal input
    evaluate_continuous: bool = True
    quadrature: QuadratureConfig = QuadratureConfig()

    @model_validator(mode="after")
    def _check_ranges(self):
        if not self.grid_min < self.grid_max:
            raise ValueError(f"grid_min ({self.grid_min}) must be below grid_max ({self.grid_max})")
        if self.multiplier_lo >= self.multiplier_hi:
            raise ValueError("multiplier_lo must be below multiplier_hi")
        return self


def load_yaml_config(path: str | Path) -> Dict[str, Any]:
    """
    Load a YAML configuration file into a dictionary of keyword arguments.
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as exc:
        raise ValidationError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"Configuration file {path} must contain a top-level mapping.")
    return data
