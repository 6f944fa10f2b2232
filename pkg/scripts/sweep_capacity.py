#!/usr/bin/env python3

import sys
from pathlib import Path

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from typing import List

import argbind
from tensorboardX import SummaryWriter

from capfin.core import Capfin
from capfin.numerics.quadrature import QuadratureConfig
from capfin.solver import SolverConfig, SolverTracker
from capfin.utils.formatting import to_csv, to_json


@argbind.bind(without_prefix=True)
def sweep(
    spec_path: str,
    budgets: List[float] = [0.5, 1.0, 2.0, 4.0],
    grid_min: float = -6.0,
    grid_max: float = 6.0,
    grid_points: int = 201,
    y_grid_points: int = 64,
    refinement_levels: int = 3,
    saturation_threshold: float = 0.01,
    tightness_epsilon: float = 0.1,
    ba_tol: float = 1e-9,
    ba_max_iter: int = 5000,
    abs_tol: float = 1e-10,
    rel_tol: float = 1e-9,
    save_path: str = "runs/sweep",
    tensorboard: str = "",
    config_path: str = "",
):
    save_dir = Path(save_path)
    save_dir.mkdir(parents=True, exist_ok=True)
    tb_dir = Path(tensorboard) if tensorboard else save_dir / "logs"
    writer = SummaryWriter(log_dir=str(tb_dir))
    tracker = SolverTracker(writer=writer, log_file=str(save_dir / "sweep.log"))

    quadrature = QuadratureConfig(abs_tol=abs_tol, rel_tol=rel_tol)
    config = SolverConfig(
        grid_min=grid_min,
        grid_max=grid_max,
        grid_points=grid_points,
        y_grid_points=y_grid_points,
        refinement_levels=refinement_levels,
        saturation_threshold=saturation_threshold,
        tightness_epsilon=tightness_epsilon,
        ba_tol=ba_tol,
        ba_max_iter=ba_max_iter,
        quadrature=quadrature,
    )
    model = Capfin.from_file(spec_path, quadrature, config, tracker)
    tracker.print(f"Sweeping {len(budgets)} budgets: {budgets}")

    results = model.capacity_sweep(budgets)
    for r in results:
        writer.add_scalar("sweep/capacity", r.capacity_estimate, int(round(r.budget * 1000)))
        tracker.print(
            f"budget {r.budget!r}: estimate {r.capacity_estimate:.6f} nats, "
            f"saturated={r.saturated}, per level {[round(v, 6) for v in r.per_level_estimates]}"
        )

    rows = [
        (r.budget, level, estimate, r.saturated)
        for r in results
        for level, estimate in enumerate(r.per_level_estimates)
    ]
    (save_dir / "levels.csv").write_text(to_csv(("budget", "level", "estimate", "saturated"), rows), encoding="utf-8")
    (save_dir / "results.json").write_text(
        to_json({"spec": model.spec.to_json_dict(), "results": [r.to_dict() for r in results]}) + "\n",
        encoding="utf-8",
    )
    tracker.print(f"Saved: {save_dir / 'levels.csv'}, {save_dir / 'results.json'}")
    writer.close()


if __name__ == "__main__":
    from capfin.solver.config import load_yaml_config

    args = argbind.parse_args()
    config_file = args.get("config_path")
    # A YAML config replaces the command line entirely
    if config_file:
        yaml_args = load_yaml_config(config_file)
        sweep(**yaml_args)
    else:
        with argbind.scope(args):
            sweep()
