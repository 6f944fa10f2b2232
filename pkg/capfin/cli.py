#!/usr/bin/env python3
"""
capfin Command Line Interface

Entropies, moments, the convergence checker, mutual information, capacity
estimation, the sufficient-condition checker and the two worked examples.
Artifacts go to stdout or --out; status lines and errors go to stderr.
"""

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Tuple

import pydantic
from pydantic import BaseModel, ConfigDict, Field, model_validator

from capfin.analysis import convergence, paperlab
from capfin.core import Capfin
from capfin.errors import CapfinError, MomentNotFiniteError, NumericalError, ValidationError
from capfin.numerics.densities import Density, density_from_config, make_density
from capfin.numerics.entropy import differential_entropy
from capfin.numerics.moments import MomentFunction, moment_function_from_config, moment_functional
from capfin.numerics.quadrature import QuadratureConfig
from capfin.solver.config import SolverConfig, load_yaml_config
from capfin.solver.tracker import SolverTracker
from capfin.utils.formatting import to_csv, to_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

SUBCOMMANDS = ("entropy", "moment", "converge", "mi", "capacity", "check", "example1", "example2")
FAMILIES: Dict[str, Callable[[], convergence.DensitySequence]] = {
    "gaussian-scale": convergence.gaussian_scale_family,
    "mixture-interpolation": convergence.mixture_interpolation_family,
    "example1": paperlab.example1_sequence,
}
UNBOUNDED = convergence.UNBOUNDED


# -----------------------------
# Run configuration
# -----------------------------

class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    subcommand: Literal["entropy", "moment", "converge", "mi", "capacity", "check", "example1", "example2"]
    spec_path: Optional[Path] = None
    output_path: Optional[Path] = None
    format: Literal["json", "csv"] = "json"

    budget: Optional[List[float]] = None  # several budgets sweep capacity
    m: Optional[List[float]] = None
    K: Optional[List[int]] = None
    i: int = 1
    grid_points: Optional[int] = Field(None, ge=2)
    grid_min: Optional[float] = None
    grid_max: Optional[float] = None
    levels: Optional[int] = Field(None, ge=1)
    abs_tol: Optional[float] = Field(None, gt=0)
    rel_tol: Optional[float] = Field(None, gt=0)
    config_path: Optional[Path] = None  # YAML solver settings

    density: Optional[str] = None  # "family:p1,p2" or a JSON density object
    moment: str = "log_power:2"  # "kind[:p]" or a JSON moment object
    family: Optional[str] = None  # converge: named sequence
    input_points: Optional[List[float]] = None
    input_weights: Optional[List[float]] = None

    @model_validator(mode="after")
    def _check_required(self):
        needs_spec = ("mi", "capacity", "check")
        if self.subcommand in needs_spec and self.spec_path is None:
            raise ValueError(f"'{self.subcommand}' requires --spec")
        if self.subcommand in ("entropy", "moment") and self.density is None:
            raise ValueError(f"'{self.subcommand}' requires --density")
        if self.subcommand == "mi" and not self.input_points:
            raise ValueError("'mi' requires --input-points")
        if self.subcommand == "converge" and self.family not in FAMILIES:
            raise ValueError(f"'converge' requires --family, one of {sorted(FAMILIES)}")
        if self.i not in (1, 2):
            raise ValueError("--i must be 1 or 2")
        return self

    def quadrature(self) -> QuadratureConfig:
        updates = {}
        if self.abs_tol is not None:
            updates["abs_tol"] = self.abs_tol
        if self.rel_tol is not None:
            updates["rel_tol"] = self.rel_tol
        return QuadratureConfig(**updates)

    def solver_config(self) -> SolverConfig:
        base: Dict[str, Any] = {}
        if self.config_path is not None:
            data = load_yaml_config(self.config_path)
            base = dict(data.get("SolverConfig", data))
        overrides = {
            "grid_points": self.grid_points,
            "grid_min": self.grid_min,
            "grid_max": self.grid_max,
            "refinement_levels": self.levels,
        }
        base.update({k: v for k, v in overrides.items() if v is not None})
        quad = dict(base.pop("quadrature", {}) or {})
        quad.update(self.quadrature().model_dump(exclude_unset=True))
        try:
            return SolverConfig(**base, quadrature=QuadratureConfig(**quad))
        except pydantic.ValidationError as exc:
            raise ValidationError(f"invalid solver config: {exc}") from exc


# -----------------------------
# Argument parsing helpers
# -----------------------------

def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise ValidationError(f"expected a comma separated list of numbers, got {text!r}") from exc


def parse_density(text: str) -> Density:
    text = text.strip()
    if text.startswith("{"):
        try:
            return density_from_config(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"density is not valid JSON: {exc}") from exc
    family, _, params = text.partition(":")
    return make_density(family.strip(), _floats(params) if params else [])


def parse_moment(text: str) -> MomentFunction:
    text = text.strip()
    if text.startswith("{"):
        try:
            return moment_function_from_config(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"moment function is not valid JSON: {exc}") from exc
    kind, _, p = text.partition(":")
    cfg: Dict[str, Any] = {"kind": kind.strip()}
    if p:
        cfg["p"] = _floats(p)[0]
    return moment_function_from_config(cfg)


def _finite_or_unbounded(x: float):
    return x if math.isfinite(x) else UNBOUNDED


# -----------------------------
# Commands
# -----------------------------

def cmd_entropy(cfg: RunConfig) -> Tuple[Any, Optional[Tuple[tuple, List[tuple]]]]:
    p = parse_density(cfg.density)
    h = differential_entropy(p, cfg.quadrature())
    out = {"density": p.name, "params": list(p.params), "entropy": h, "analytic_entropy": p.analytic_entropy}
    return out, (("density", "entropy", "analytic_entropy"), [(p.name, h, p.analytic_entropy)])


def cmd_moment(cfg: RunConfig):
    p = parse_density(cfg.density)
    l = parse_moment(cfg.moment)
    try:
        value: Any = moment_functional(p, l, cfg.quadrature())
    except MomentNotFiniteError as exc:
        print(f"moment diverges: {exc}", file=sys.stderr)
        value = UNBOUNDED
    out = {"density": p.name, "params": list(p.params), "moment": l.to_dict(), "value": value}
    return out, (("density", "moment", "value"), [(p.name, l.name, value)])


def cmd_converge(cfg: RunConfig):
    seq = FAMILIES[cfg.family]()
    l = parse_moment(cfg.moment)
    if cfg.m:
        m_list = [int(m) for m in cfg.m]
    elif cfg.family == "example1":
        m_list = list(paperlab.EXAMPLE1_M_LIST)
    else:
        m_list = [10, 100, 1000]
    print(f"Checking convergence of '{cfg.family}' at m={m_list}", file=sys.stderr)
    report = convergence.check_theorem1(seq, l, m_list, convergence.ConvergenceConfig(quadrature=cfg.quadrature()))
    rows = [
        (m, report.entropy_sequence[m], _finite_or_unbounded(report.moments[m]), report.pointwise_max_gap[m])
        for m in report.entropy_sequence
    ]
    return report.to_dict(), (("m", "entropy", "moment", "pointwise_gap"), rows)


def _load(cfg: RunConfig, tracker: Optional[SolverTracker] = None) -> Capfin:
    solver = cfg.solver_config()
    return Capfin.from_file(str(cfg.spec_path), solver.quadrature, solver, tracker)


def cmd_mi(cfg: RunConfig):
    model = _load(cfg)
    points, weights = cfg.input_points, cfg.input_weights
    if weights is not None and len(weights) != len(points):
        raise ValidationError("--input-weights must match --input-points in length")
    mi = model.mutual_information(points, weights)
    cost = model.input_cost(points, weights)
    out = {
        "spec": model.spec.to_json_dict(),
        "input": model.make_input(points, weights).to_dict(),
        "mutual_information": mi,
        "cost": cost.value,
        "feasible": cost.feasible,
    }
    return out, (("mutual_information", "cost", "feasible"), [(mi, cost.value, cost.feasible)])


def cmd_capacity(cfg: RunConfig):
    tracker = SolverTracker(quiet=False)
    model = _load(cfg, tracker)
    budgets = cfg.budget or [model.budget]
    if len(budgets) == 1:
        results = [model.capacity(budgets[0])]
    else:
        results = model.capacity_sweep(budgets)
    rows = [
        (r.budget, level, estimate, r.saturated)
        for r in results
        for level, estimate in enumerate(r.per_level_estimates)
    ]
    header = ("budget", "level", "estimate", "saturated")
    payload = [r.to_dict() for r in results]
    if len(payload) == 1:
        out = {**payload[0], "spec": model.spec.to_json_dict()}
    else:
        out = {"results": payload, "spec": model.spec.to_json_dict()}
    return out, (header, rows)


def cmd_check(cfg: RunConfig):
    model = _load(cfg)
    report = model.check()
    rows = [(name, entry["status"]) for name, entry in report.to_dict()["conditions"].items()]
    return {"spec": model.spec.to_json_dict(), **report.to_dict()}, (("condition", "status"), rows)


def cmd_example1(cfg: RunConfig):
    ms = cfg.m or [100.0]
    rows = paperlab.example1_rows(ms, cfg.quadrature())
    out = [dict(zip(paperlab.EXAMPLE1_CSV_HEADER, row)) for row in rows]
    return out, (paperlab.EXAMPLE1_CSV_HEADER, rows)


def cmd_example2(cfg: RunConfig):
    Ks = cfg.K or list(paperlab.EXAMPLE2_K_LIST)
    rows = paperlab.example2_rows(cfg.i, Ks)
    out: Dict[str, Any] = {"rows": [dict(zip(paperlab.EXAMPLE2_CSV_HEADER, row)) for row in rows]}
    if len(Ks) >= 2:
        out["growth"] = paperlab.example2_growth_diagnostic(cfg.i, Ks).to_dict()
    return out, (paperlab.EXAMPLE2_CSV_HEADER, rows)


COMMANDS = {
    "entropy": cmd_entropy,
    "moment": cmd_moment,
    "converge": cmd_converge,
    "mi": cmd_mi,
    "capacity": cmd_capacity,
    "check": cmd_check,
    "example1": cmd_example1,
    "example2": cmd_example2,
}


# -----------------------------
# Run
# -----------------------------

def _emit(text: str, output_path: Optional[Path]) -> None:
    if output_path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(text, encoding="utf-8")
    print(f"Saved: {output_path}", file=sys.stderr)


def _error(payload: dict, status: int) -> int:
    print(to_json(payload), file=sys.stderr)
    return status


def run(config: RunConfig) -> int:
    """Execute one subcommand; returns the process exit status."""
    try:
        payload, (header, rows) = COMMANDS[config.subcommand](config)
        text = to_csv(header, rows) if config.format == "csv" else to_json(payload) + "\n"
        _emit(text, config.output_path)
    except ValidationError as exc:
        return _error(exc.to_dict(), EXIT_VALIDATION)
    except pydantic.ValidationError as exc:
        return _error({"error": "ValidationError", "message": str(exc)}, EXIT_VALIDATION)
    except NumericalError as exc:
        return _error(exc.to_dict(), EXIT_NUMERICAL)
    except CapfinError as exc:
        return _error(exc.to_dict(), EXIT_NUMERICAL)
    return EXIT_OK


# -----------------------------
# Parser
# -----------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        description="capfin CLI - entropy, moments and capacity of additive-noise channels",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m capfin.cli capacity --spec conf/awgn.json --budget 1 --format json
  python -m capfin.cli example1 --m 100 --format csv
  python -m capfin.cli check --spec conf/bad.json
  python -m capfin.cli entropy --density cauchy:0,1
        """,
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)

    # Inputs / outputs
    parser.add_argument("--spec", help="JSON channel spec")
    parser.add_argument("--out", "-o", help="Output file (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--config", help="YAML solver settings (capacity)")

    # Problem parameters
    parser.add_argument("--budget", type=float, nargs="+", help="Cost budget(s); several sweep the capacity")
    parser.add_argument("--m", type=float, nargs="+", help="Example 1 / convergence indices")
    parser.add_argument("--K", type=int, nargs="+", help="Example 2 truncation points")
    parser.add_argument("--i", type=int, default=1, help="Example 2 input law (1 or 2)")
    parser.add_argument("--density", help='Density as "family:p1,p2" or a JSON object')
    parser.add_argument("--moment", default="log_power:2", help='Moment function as "kind[:p]" or a JSON object')
    parser.add_argument("--family", help=f"Sequence for converge: {', '.join(sorted(FAMILIES))}")
    parser.add_argument("--input-points", help="Comma separated input points (mi)")
    parser.add_argument("--input-weights", help="Comma separated input weights (mi)")

    # Numerics
    parser.add_argument("--grid-points", type=int)
    parser.add_argument("--grid-min", type=float)
    parser.add_argument("--grid-max", type=float)
    parser.add_argument("--levels", type=int, help="Refinement levels")
    parser.add_argument("--abs-tol", type=float)
    parser.add_argument("--rel-tol", type=float)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=args.subcommand,
        spec_path=args.spec,
        output_path=args.out,
        format=args.format,
        config_path=args.config,
        budget=args.budget,
        m=args.m,
        K=args.K,
        i=args.i,
        density=args.density,
        moment=args.moment,
        family=args.family,
        input_points=_floats(args.input_points) if args.input_points else None,
        input_weights=_floats(args.input_weights) if args.input_weights else None,
        grid_points=args.grid_points,
        grid_min=args.grid_min,
        grid_max=args.grid_max,
        levels=args.levels,
        abs_tol=args.abs_tol,
        rel_tol=args.rel_tol,
    )


# -----------------------------
# Entrypoint
# -----------------------------

def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValidationError as exc:
        return _error(exc.to_dict(), EXIT_VALIDATION)
    except pydantic.ValidationError as exc:
        return _error({"error": "ValidationError", "message": str(exc)}, EXIT_VALIDATION)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
