"""
JSON channel specification.

    {
      "schema": 1,
      "f": {"kind": "signed_exp"},
      "noise": {"family": "gaussian", "params": [0.0, 1.0]},
      "cost": {"kind": "log_power", "p": 2},
      "noise_moment": {"kind": "log_power", "p": 2},
      "budget": 1.0
    }

Unknown fields are rejected; ``schema`` must be 1.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Optional, Tuple

import pydantic
from pydantic import BaseModel, ConfigDict, Field

from ..errors import ValidationError
from ..numerics.densities import density_from_config
from ..numerics.moments import moment_function_from_config
from ..numerics.quadrature import QuadratureConfig
from . import model


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class MixtureComponentModel(_Strict):
    weight: float = Field(gt=0)
    density: "DensityModel"


class DensityModel(_Strict):
    family: str
    params: List[float] = []
    components: Optional[List[MixtureComponentModel]] = None  # family == "mixture" only

    def build(self):
        return density_from_config(self.model_dump(exclude_none=True))


class DistortionModel(_Strict):
    kind: Literal["identity", "signed_exp", "cubic", "signed_power", "expr-table"]
    p: Optional[float] = None  # signed_power exponent
    table: Optional[List[Tuple[float, float]]] = None  # expr-table nodes (x >= 0, f(x))

    def build(self) -> model.DistortionFunction:
        if self.kind == "identity":
            return model.identity()
        if self.kind == "signed_exp":
            return model.signed_exp()
        if self.kind == "cubic":
            return model.cubic()
        if self.kind == "signed_power":
            if self.p is None:
                raise ValidationError("signed_power distortion needs 'p'")
            return model.signed_power(self.p)
        if self.table is None:
            raise ValidationError("expr-table distortion needs 'table'")
        return model.expr_table(self.table)


class MomentModel(_Strict):
    kind: Literal["power", "log_power", "log1p_square", "sqrt", "zero", "log_distortion"]
    p: Optional[float] = None


class ChannelSpecModel(_Strict):
    schema_version: Literal[1] = Field(alias="schema")
    f: DistortionModel
    noise: DensityModel
    cost: MomentModel
    noise_moment: MomentModel = MomentModel(kind="log_power", p=2.0)
    budget: float = Field(gt=0)

    def build(self, quadrature: QuadratureConfig | None = None) -> model.ChannelSpec:
        f = self.f.build()
        cost = moment_function_from_config(self.cost.model_dump(exclude_none=True), distortion=f.eval)
        noise_moment = moment_function_from_config(self.noise_moment.model_dump(exclude_none=True), distortion=f.eval)
        return model.ChannelSpec(
            f=f,
            noise=self.noise.build(),
            cost=cost,
            noise_moment=noise_moment,
            budget=self.budget,
            quadrature=quadrature or QuadratureConfig(),
        )

    def to_json_dict(self) -> dict:
        return self.model_dump(by_alias=True, exclude_none=True, mode="json")


MixtureComponentModel.model_rebuild()


def parse_channel_spec(data: str | bytes | dict) -> ChannelSpecModel:
    """Validate a channel spec given as JSON text or an already-parsed mapping."""
    try:
        if isinstance(data, dict):
            return ChannelSpecModel.model_validate(data)
        return ChannelSpecModel.model_validate_json(data)
    except pydantic.ValidationError as exc:
        raise ValidationError(f"invalid channel spec: {exc}") from exc


def load_channel_spec(path: str | Path) -> ChannelSpecModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read channel spec {path}: {exc}") from exc
    return parse_channel_spec(text)


def dump_channel_spec(spec: ChannelSpecModel) -> str:
    return json.dumps(spec.to_json_dict(), indent=2)
