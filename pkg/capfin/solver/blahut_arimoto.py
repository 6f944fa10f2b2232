"""
Cost-constrained Blahut-Arimoto on a discretized channel.

For a fixed multiplier ``s`` the iteration maximizes the Lagrangian

    J(r) = I(r) - s * sum_i r_i C(|x_i|)

with the multiplicative update ``r_i <- r_i exp(D_i - s C_i) / Z`` where
``D_i = KL(W_i || q)`` and ``q = W^T r``. ``J`` is non-decreasing along the
iteration; ``max_i (D_i - s C_i)`` is an upper bound on the optimum, and the
difference is reported as the duality gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy import sparse
from scipy.special import xlogy

from ..channel.model import ChannelSpec, cluster_offsets, noise_window
from ..errors import MonotonicityError, NumericalError, ValidationError
from .config import SolverConfig

_Q_FLOOR = 1e-300
_MONOTONE_TOL = 1e-12
# share of the uniform law mixed into a warm start so no weight is stuck at zero
_WARM_START_FLOOR = 1e-6


@dataclass
class DiscreteKernel:
    grid: np.ndarray
    W: sparse.csr_matrix  # rows: inputs, columns: output cells; rows sum to one
    Wt: sparse.csr_matrix
    wlogw: np.ndarray
    costs: np.ndarray
    n_clusters: int

    @property
    def n_outputs(self) -> int:
        return self.W.shape[1]


def build_kernel(ch: ChannelSpec, grid: np.ndarray, config: SolverConfig) -> DiscreteKernel:
    """Block-diagonal transition matrix over clusters of overlapping noise windows.

    Each cluster gets a uniform midpoint y-grid with cells of width
    ``(noise window width) / y_grid_points``, in coordinates relative to the
    cluster's first output so that huge ``f`` values stay resolved.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("input grid must be a non-empty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("input grid must be strictly increasing")
    offsets = np.asarray(ch.f(grid), dtype=float)
    if not np.all(np.isfinite(offsets)):
        raise ValidationError("distortion overflows on the input grid")

    lo_q, hi_q = noise_window(ch.noise, config.quantile_cutoff)
    cell = (hi_q - lo_q) / config.y_grid_points
    clusters = cluster_offsets(ch.noise, offsets, config.quantile_cutoff)

    blocks: List[np.ndarray] = []
    order: List[np.ndarray] = []
    for idx in clusters:
        local = offsets[idx] - offsets[idx[0]]
        y_lo, y_hi = local.min() + lo_q, local.max() + hi_q
        n_y = max(1, int(np.ceil((y_hi - y_lo) / cell)))
        h = (y_hi - y_lo) / n_y
        ys = y_lo + (np.arange(n_y) + 0.5) * h
        block = np.asarray(ch.noise.pdf(ys[None, :] - local[:, None]), dtype=float) * h
        mass = block.sum(axis=1, keepdims=True)
        if np.any(mass <= 0):
            raise NumericalError("a kernel row has no mass on its output window; increase y_grid_points")
        blocks.append(block / mass)
        order.append(idx)

    W = sparse.block_diag(blocks, format="csr")
    # block_diag stacks rows in cluster order; map them back to grid order
    perm = np.empty(grid.size, dtype=int)
    perm[np.concatenate(order)] = np.arange(grid.size)
    W = W[perm]
    W.eliminate_zeros()

    plogp = W.copy()
    plogp.data = xlogy(W.data, W.data)
    wlogw = np.asarray(plogp.sum(axis=1)).ravel()
    costs = np.asarray(ch.cost(np.abs(grid)), dtype=float)
    return DiscreteKernel(grid=grid, W=W, Wt=W.T.tocsr(), wlogw=wlogw, costs=costs, n_clusters=len(clusters))


@dataclass
class BAResult:
    weights: np.ndarray
    mutual_information: float
    cost: float
    multiplier: float
    iterations: int
    lagrangian_trace: List[float] = field(default_factory=list)
    duality_gap: float = float("inf")
    iteration_cap_reached: bool = False

    @property
    def lagrangian(self) -> float:
        return self.lagrangian_trace[-1]


def _warm(init: Optional[np.ndarray], n: int) -> np.ndarray:
    uniform = np.full(n, 1.0 / n)
    if init is None:
        return uniform
    r = np.asarray(init, dtype=float)
    if r.shape != (n,):
        raise ValidationError("warm start has the wrong length")
    r = (1.0 - _WARM_START_FLOOR) * r / r.sum() + _WARM_START_FLOOR * uniform
    return r / r.sum()


def run_ba(kernel: DiscreteKernel, s: float, config: SolverConfig, init: Optional[np.ndarray] = None) -> BAResult:
    if s < 0:
        raise ValidationError(f"multiplier must be non-negative, got {s}")
    W, Wt, wlogw, costs = kernel.W, kernel.Wt, kernel.wlogw, kernel.costs
    r = _warm(init, kernel.grid.size)
    trace: List[float] = []
    prev = None
    capped = True
    info = cost = gap = 0.0
    it = 0
    for it in range(1, config.ba_max_iter + 1):
        q = Wt @ r
        D = wlogw - W @ np.log(np.maximum(q, _Q_FLOOR))
        info = float(r @ D)
        cost = float(r @ costs)
        J = info - s * cost
        logc = D - s * costs
        gap = float(logc.max()) - J
        trace.append(J)
        if prev is not None:
            if J < prev - _MONOTONE_TOL * max(1.0, abs(prev)):
                raise MonotonicityError(f"Lagrangian decreased at iteration {it}: {prev!r} -> {J!r}")
            if J - prev < config.ba_tol:
                capped = False
                break
        prev = J
        rc = r * np.exp(logc - logc.max())
        r = rc / rc.sum()

    return BAResult(
        weights=r,
        mutual_information=max(info, 0.0),
        cost=cost,
        multiplier=float(s),
        iterations=it,
        lagrangian_trace=trace,
        duality_gap=max(gap, 0.0),
        iteration_cap_reached=capped,
    )


def ba_solve_fixed_multiplier(
    ch: ChannelSpec,
    grid,
    s: float,
    config: SolverConfig | None = None,
    init: Optional[np.ndarray] = None,
) -> BAResult:
    """Blahut-Arimoto for ``max I - s E[C]`` over inputs supported on ``grid``.

    Hitting ``ba_max_iter`` flags the result instead of discarding it.
    """
    config = config or SolverConfig()
    kernel = build_kernel(ch, np.atleast_1d(np.asarray(grid, dtype=float)), config)
    return run_ba(kernel, s, config, init)
