"""
Memoryless additive-noise channel ``Y = f(X) + N`` with an average input cost.

Inputs are finitely supported (:class:`DiscreteInput`), so every output density
is an exact finite location mixture of the noise and every information quantity
reduces to one-dimensional quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ValidationError
from ..numerics.densities import Density, location_mixture
from ..numerics.entropy import differential_entropy, discrete_entropy, kl_divergence
from ..numerics.moments import MomentFunction, expectation, moment_functional
from ..numerics.quadrature import QuadratureConfig

WEIGHT_SUM_TOL = 1e-12
# noise tail mass outside a window when splitting outputs into clusters
CLUSTER_CUTOFF = 1e-12


# ------------------------------------------------------------------ #
# Distortion functions
# ------------------------------------------------------------------ #
@dataclass(frozen=True, eq=False)
class DistortionFunction:
    name: str
    eval: Callable[[np.ndarray], np.ndarray]
    declared_continuous: bool = True
    declared_absnondecreasing: bool = True
    # inverse of |f| on [|f(0)|, inf), when known in closed form
    inverse_abs: Optional[Callable[[float], float]] = None
    params: Tuple = ()

    def __call__(self, x):
        return self.eval(x)


def identity() -> DistortionFunction:
    return DistortionFunction("identity", lambda x: np.asarray(x, dtype=float) * 1.0, inverse_abs=lambda y: y)


def signed_exp() -> DistortionFunction:
    """``sgn(x) (e^|x| - 1)``."""

    def f(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(over="ignore"):
            return np.sign(x) * np.expm1(np.abs(x))

    return DistortionFunction("signed_exp", f, inverse_abs=math.log1p)


def cubic() -> DistortionFunction:
    return DistortionFunction("cubic", lambda x: np.asarray(x, dtype=float) ** 3, inverse_abs=lambda y: y ** (1.0 / 3.0))


def signed_power(p: float) -> DistortionFunction:
    if not p > 0:
        raise ValidationError(f"signed_power needs p > 0, got {p}")

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.sign(x) * np.abs(x) ** p

    return DistortionFunction("signed_power", f, inverse_abs=lambda y: y ** (1.0 / p), params=(float(p),))


def expr_table(table: Sequence[Tuple[float, float]]) -> DistortionFunction:
    """Odd piecewise-linear distortion through ``(x, f(x))`` pairs with ``x >= 0``.

    Beyond the last node the last segment is extended linearly.
    """
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ValidationError("expr-table needs at least two (x, f(x)) pairs")
    xs, ys = arr[:, 0], arr[:, 1]
    if np.any(xs < 0) or np.any(np.diff(xs) <= 0):
        raise ValidationError("expr-table abscissae must be non-negative and strictly increasing")
    if xs[0] != 0.0:
        raise ValidationError("expr-table must start at x = 0")
    slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    monotone = bool(np.all(ys >= 0) and np.all(np.diff(ys) >= 0) and slope > 0)
    continuous = ys[0] == 0.0

    def f(x):
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        inner = np.interp(ax, xs, ys)
        outer = ys[-1] + slope * (ax - xs[-1])
        return np.sign(x) * np.where(ax <= xs[-1], inner, outer)

    return DistortionFunction(
        "expr-table",
        f,
        declared_continuous=continuous,
        declared_absnondecreasing=monotone,
        params=tuple(map(tuple, arr.tolist())),
    )


def custom(
    name: str,
    fn: Callable[[np.ndarray], np.ndarray],
    *,
    declared_continuous: bool = True,
    declared_absnondecreasing: bool = True,
    inverse_abs: Optional[Callable[[float], float]] = None,
) -> DistortionFunction:
    return DistortionFunction(name, fn, declared_continuous, declared_absnondecreasing, inverse_abs)


# ------------------------------------------------------------------ #
# Inputs and channels
# ------------------------------------------------------------------ #
@dataclass(frozen=True, eq=False)
class DiscreteInput:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.size == 0 or pts.shape != w.shape:
            raise ValidationError("points and weights must be non-empty and of equal length")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("input points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise ValidationError("input points must be sorted and distinct")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValidationError("input weights must be non-negative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValidationError(f"input weights must sum to 1 (got {float(w.sum())!r})")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point_mass(cls, x: float = 0.0) -> "DiscreteInput":
        return cls(np.array([float(x)]), np.array([1.0]))

    @classmethod
    def uniform(cls, points: Sequence[float]) -> "DiscreteInput":
        pts = np.sort(np.asarray(points, dtype=float))
        return cls(pts, np.full(pts.size, 1.0 / pts.size))

    @classmethod
    def from_pairs(cls, points: Sequence[float], weights: Sequence[float]) -> "DiscreteInput":
        """Sort by point and renormalize the weights; zero-weight points are kept."""
        pts = np.asarray(points, dtype=float)
        w = np.asarray(weights, dtype=float)
        if pts.shape != w.shape:
            raise ValidationError("points and weights must have equal length")
        order = np.argsort(pts, kind="stable")
        total = float(w.sum())
        if not total > 0:
            raise ValidationError("input weights must have positive total")
        return cls(pts[order], w[order] / total)

    def support(self, tol: float = 0.0) -> "DiscreteInput":
        """Drop points whose weight is ``<= tol``."""
        keep = self.weights > tol
        return DiscreteInput(self.points[keep], self.weights[keep] / self.weights[keep].sum())

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}


@dataclass(frozen=True)
class CostEvaluation:
    value: float
    feasible: bool


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    f: DistortionFunction
    noise: Density
    cost: MomentFunction
    noise_moment: MomentFunction
    budget: float
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        if not (math.isfinite(self.budget) and self.budget > 0):
            raise ValidationError(f"budget must be positive and finite, got {self.budget}")
        if not math.isfinite(self.noise.sup_bound):
            raise ValidationError(f"noise '{self.noise.name}' must have a finite sup_bound")
        if not self.f.declared_absnondecreasing:
            raise ValidationError(f"distortion '{self.f.name}' must declare |f| non-decreasing in |x|")

    @cached_property
    def L_N(self) -> float:
        """``E[C_N(|N|)]``; raises MomentNotFiniteError when it diverges."""
        return moment_functional(self.noise, self.noise_moment, self.quadrature)

    @cached_property
    def noise_entropy(self) -> float:
        if self.noise.analytic_entropy is not None:
            return self.noise.analytic_entropy
        return differential_entropy(self.noise, self.quadrature)

    def with_budget(self, budget: float) -> "ChannelSpec":
        return ChannelSpec(self.f, self.noise, self.cost, self.noise_moment, float(budget), self.quadrature)

    def with_cost(self, cost: MomentFunction) -> "ChannelSpec":
        return ChannelSpec(self.f, self.noise, cost, self.noise_moment, self.budget, self.quadrature)


# ------------------------------------------------------------------ #
# Operations
# ------------------------------------------------------------------ #
def transition_density(ch: ChannelSpec, x: float) -> Density:
    """``p_{Y|X}(y | x) = p_N(y - f(x))``."""
    return ch.noise.shifted(float(ch.f(x)))


def output_density(ch: ChannelSpec, F: DiscreteInput) -> Density:
    """``p(y; F) = sum_i w_i p_N(y - f(x_i))``."""
    return location_mixture(ch.noise, np.asarray(ch.f(F.points), dtype=float), F.weights)


def noise_window(noise: Density, cutoff: float) -> Tuple[float, float]:
    """``[q(cutoff), q(1 - cutoff)]`` of the noise law."""
    return noise.quantile(cutoff), noise.quantile(1.0 - cutoff)


def cluster_offsets(noise: Density, offsets: np.ndarray, cutoff: float) -> List[np.ndarray]:
    """Group output offsets whose noise windows overlap.

    Returns index arrays into ``offsets``, each sorted by offset, clusters in
    increasing order.
    """
    offsets = np.asarray(offsets, dtype=float)
    lo_q, hi_q = noise_window(noise, cutoff)
    width = hi_q - lo_q
    order = np.argsort(offsets, kind="stable")
    gaps = np.diff(offsets[order])
    cuts = np.nonzero(gaps >= width)[0] + 1
    return [np.asarray(c) for c in np.split(order, cuts)]


def output_clusters(
    ch: ChannelSpec, F: DiscreteInput, cutoff: float = CLUSTER_CUTOFF
) -> Iterator[Tuple[float, float, Density]]:
    """Yield ``(mass, anchor, local_density)`` per cluster of well-separated outputs.

    ``local_density`` is the cluster's normalized output law in coordinates
    relative to ``anchor`` (the cluster's first offset), so outputs at
    ``|f(x)| ~ 1e17`` keep the noise scale resolved.
    """
    F = F.support()
    offsets = np.asarray(ch.f(F.points), dtype=float)
    for idx in cluster_offsets(ch.noise, offsets, cutoff):
        mass = float(F.weights[idx].sum())
        anchor = float(offsets[idx[0]])
        local = offsets[idx] - anchor
        yield mass, anchor, location_mixture(ch.noise, local, F.weights[idx] / mass)


def output_entropy(
    ch: ChannelSpec, F: DiscreteInput, config: QuadratureConfig | None = None, cutoff: float = CLUSTER_CUTOFF
) -> float:
    """``h_Y(F) = sum_c W_c h(Y_c) + H(W)`` over output clusters."""
    config = config or ch.quadrature
    total = 0.0
    masses = []
    for mass, _, p in output_clusters(ch, F, cutoff):
        total += mass * differential_entropy(p, config)
        masses.append(mass)
    return total + discrete_entropy(masses)


def output_expectation(
    ch: ChannelSpec,
    F: DiscreteInput,
    l: MomentFunction,
    config: QuadratureConfig | None = None,
    cutoff: float = CLUSTER_CUTOFF,
) -> float:
    """``E_Y[l(|Y|)]`` accumulated cluster by cluster."""
    config = config or ch.quadrature
    total = 0.0
    for mass, anchor, p in output_clusters(ch, F, cutoff):
        g = lambda y, a=anchor: l.eval(abs(a + y))  # noqa: E731
        total += mass * expectation(p, g, config, label=f"{l.name}(|Y|)")
    return total


def mutual_information(ch: ChannelSpec, F: DiscreteInput, config: QuadratureConfig | None = None) -> float:
    """``I(F) = h_Y(F) - h_N``."""
    return output_entropy(ch, F, config) - ch.noise_entropy


def mutual_information_direct(ch: ChannelSpec, F: DiscreteInput, config: QuadratureConfig | None = None) -> float:
    """``sum_i w_i D(p_N(. - f(x_i)) || p_Y)``, the defining double integral over a finite support."""
    config = config or ch.quadrature
    F = F.support()
    p_y = output_density(ch, F)
    return float(
        math.fsum(w * kl_divergence(transition_density(ch, x), p_y, config) for x, w in zip(F.points, F.weights))
    )


def input_cost(ch: ChannelSpec, F: DiscreteInput) -> CostEvaluation:
    """``sum_i w_i C(|x_i|)`` and feasibility against the budget."""
    values = np.asarray(ch.cost(np.abs(F.points)), dtype=float)
    value = float(math.fsum(values * F.weights))
    return CostEvaluation(value=value, feasible=value <= ch.budget)


def compose_noise(first: Density, second: Density) -> Density:
    """Law of the sum of two independent uniform noises (a trapezoid)."""
    if first.name != "uniform" or second.name != "uniform":
        raise ValidationError("compose_noise supports uniform components only")
    (a1, b1), (a2, b2) = first.params, second.params
    w1, w2 = sorted((b1 - a1, b2 - a2))
    lo, hi = a1 + a2, b1 + b2
    height = 1.0 / w2

    def pdf(y):
        t = np.asarray(y, dtype=float) - lo
        rise = height * t / w1
        fall = height * (w1 + w2 - t) / w1
        out = np.minimum(np.minimum(rise, fall), height)
        return np.where((t > 0) & (t < w1 + w2), out, 0.0)

    def log_pdf(y):
        v = pdf(y)
        with np.errstate(divide="ignore"):
            return np.log(v)

    def cdf(y):
        t = np.clip(np.asarray(y, dtype=float) - lo, 0.0, w1 + w2)
        ramp_up = height * t * t / (2 * w1)
        flat = height * (w1 / 2 + (t - w1))
        ramp_down = 1.0 - height * (w1 + w2 - t) ** 2 / (2 * w1)
        return np.where(t < w1, ramp_up, np.where(t < w2, flat, ramp_down))

    kinks = tuple(sorted({lo, lo + w1, lo + w2, hi}))
    return Density(
        name="uniform-sum",
        params=(a1, b1, a2, b2),
        pdf=pdf,
        log_pdf=log_pdf,
        support=(lo, hi),
        sup_bound=height,
        analytic_entropy=math.log(w2) + w1 / (2 * w2),
        cdf=cdf,
        landmarks=kinks,
    )
