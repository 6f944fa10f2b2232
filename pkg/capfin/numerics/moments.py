"""
Moment functions ``l: [0, inf) -> [0, inf)`` and the functionals built on them.

The same :class:`MomentFunction` type plays three roles: the moment function of
the entropy-convergence conditions, the input cost, and the noise moment
function of a channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..errors import MomentNotFiniteError, ValidationError
from .quadrature import QuadratureConfig, integrate_density_functional

DEFAULT_KAPPA_GRID: Tuple[float, ...] = (1.0, 2.0, 5.0, 10.0)
_INVERSE_ULP_STEPS = 8


@dataclass(frozen=True, eq=False)
class MomentFunction:
    name: str
    eval: Callable[[float], float]
    declared_nondecreasing: bool = True
    declared_superlog: bool = False
    inverse: Optional[Callable[[float], float]] = None
    params: Tuple[float, ...] = ()

    def __call__(self, y):
        return self.eval(y)

    def to_dict(self) -> dict:
        return {"kind": self.name, "params": list(self.params)}


# ------------------------------------------------------------------ #
# Catalog
# ------------------------------------------------------------------ #
def power(p: float) -> MomentFunction:
    """``y -> y**p``."""
    if not p > 0:
        raise ValidationError(f"power moment needs p > 0, got {p}")
    return MomentFunction(
        name="power",
        eval=lambda y: np.abs(y) ** p,
        declared_superlog=True,
        inverse=lambda v: v ** (1.0 / p),
        params=(float(p),),
    )


def log_power(p: float) -> MomentFunction:
    """``y -> ln(1 + y)**p``; super-logarithmic only for ``p > 1``."""
    if not p > 0:
        raise ValidationError(f"log_power moment needs p > 0, got {p}")
    return MomentFunction(
        name="log_power",
        eval=lambda y: np.log1p(np.abs(y)) ** p,
        declared_superlog=p > 1,
        inverse=lambda v: math.expm1(v ** (1.0 / p)),
        params=(float(p),),
    )


def log1p_square() -> MomentFunction:
    return MomentFunction(
        name="log1p_square",
        eval=lambda y: np.log1p(np.square(y)),
        inverse=lambda v: math.sqrt(math.expm1(v)),
    )


def sqrt() -> MomentFunction:
    return MomentFunction(
        name="sqrt",
        eval=lambda y: np.sqrt(np.abs(y)),
        declared_superlog=True,
        inverse=lambda v: v * v,
    )


def zero() -> MomentFunction:
    return MomentFunction(name="zero", eval=lambda y: np.zeros_like(np.asarray(y, dtype=float)))


def log_distortion(f: Callable[[float], float], name: str = "log_distortion") -> MomentFunction:
    """``y -> ln(1 + |f(y)|)``: never super-logarithmic relative to ``ln|f|``."""
    return MomentFunction(name=name, eval=lambda y: np.log1p(np.abs(f(y))))


_CATALOG: Dict[str, Callable[..., MomentFunction]] = {
    "power": power,
    "log_power": log_power,
    "log1p_square": log1p_square,
    "sqrt": sqrt,
    "zero": zero,
}


def moment_function_from_config(cfg: Mapping, distortion=None) -> MomentFunction:
    """Build a moment function from ``{"kind": ..., "p": ...}``.

    ``log_distortion`` needs the channel's distortion evaluator.
    """
    kind = cfg.get("kind")
    if kind == "log_distortion":
        if distortion is None:
            raise ValidationError("log_distortion cost needs a distortion function")
        return log_distortion(distortion)
    if kind not in _CATALOG:
        raise ValidationError(f"unknown moment function '{kind}'; known: {sorted(_CATALOG) + ['log_distortion']}")
    if kind in ("power", "log_power"):
        if "p" not in cfg:
            raise ValidationError(f"moment function '{kind}' needs an exponent 'p'")
        return _CATALOG[kind](float(cfg["p"]))
    return _CATALOG[kind]()


def rescale_moment_function(l: MomentFunction, M: float) -> MomentFunction:
    """``l'(y) = l(y / M)``, the moment function seen after ``Z = M Y``."""
    if not M > 0:
        raise ValidationError(f"rescale factor must be positive, got {M}")
    if M == 1.0:
        return l
    base, inv = l.eval, l.inverse
    return MomentFunction(
        name=f"{l.name}/scale",
        eval=lambda y: base(np.asarray(y, dtype=float) / M),
        declared_nondecreasing=l.declared_nondecreasing,
        declared_superlog=l.declared_superlog,
        inverse=None if inv is None else (lambda v: M * inv(v)),
        params=(*l.params, float(M)),
    )


# ------------------------------------------------------------------ #
# Functionals
# ------------------------------------------------------------------ #
def moment_functional(p, l: MomentFunction, config: QuadratureConfig | None = None) -> float:
    """``E_p[l(|Y|)]`` by quadrature.

    Raises:
        MomentNotFiniteError: the integral does not converge at the configured
            tolerance, which is how a diverging moment (``E[Y^2]`` under a
            Cauchy law) shows up.
    """
    ev = l.eval
    return expectation(p, lambda y: ev(abs(y)), config, label=f"{l.name}(|Y|)")


def expectation(
    p, g: Callable[[float], float], config: QuadratureConfig | None = None, label: str = "g(Y)"
) -> float:
    """``E_p[g(Y)]`` for a non-negative ``g``; see :func:`moment_functional`."""
    pdf = p.pdf

    def integrand(y: float) -> float:
        d = float(pdf(y))
        if d == 0.0:
            return 0.0
        return float(g(y)) * d

    result = integrate_density_functional(p, integrand, config)
    if not result.converged or result.value > 1e300:
        raise MomentNotFiniteError(
            f"E[{label}] under '{p.name}' is not finite at tolerance "
            f"(value {result.value!r}, error {result.error_estimate!r})",
            result,
        )
    return result.value


def tail_mass(p, K: float, config: QuadratureConfig | None = None) -> float:
    """``P(|Y| > K)``, from the CDF when the density has one."""
    K = abs(float(K))
    if p.cdf is not None:
        return float(p.cdf(-K)) + (1.0 - float(p.cdf(K)))
    left = integrate_density_functional(p, lambda y: float(p.pdf(y)), config, domain=(-math.inf, -K))
    right = integrate_density_functional(p, lambda y: float(p.pdf(y)), config, domain=(K, math.inf))
    return left.value + right.value


@dataclass
class SuperlogReport:
    """Finite-range evidence for ``l = omega(ln)``; one entry per kappa."""

    kappa_grid: Tuple[float, ...]
    y_max: float
    # kappa -> smallest sampled c with l(y) >= kappa ln y on [c, y_max], None if not dominated
    dominated_from: Dict[float, Optional[float]] = field(default_factory=dict)
    grid_points: int = 0

    @property
    def dominated_for_all(self) -> bool:
        return all(c is not None for c in self.dominated_from.values())

    def to_dict(self) -> dict:
        return {
            "kappa_grid": list(self.kappa_grid),
            "y_max": self.y_max,
            "dominated_from": [
                {"kappa": k, "c": c if c is not None else "not dominated by y_max"}
                for k, c in self.dominated_from.items()
            ],
            "grid_points": self.grid_points,
        }


def superlog_diagnostic(
    l: MomentFunction,
    kappa_grid: Sequence[float] = DEFAULT_KAPPA_GRID,
    y_max: float = 1e10,
    points_per_decade: int = 64,
) -> SuperlogReport:
    """Check ``l(y) >= kappa ln y`` on a geometric grid ``(1, y_max]`` for every kappa.

    This is evidence on a finite range, not a proof of the asymptotic property;
    the kappa grid is recorded in the report.
    """
    if not y_max > math.e:
        raise ValidationError(f"y_max must exceed e, got {y_max}")
    kappas = tuple(float(k) for k in kappa_grid)
    if not kappas or any(k <= 0 for k in kappas):
        raise ValidationError("kappa grid must be non-empty and positive")
    n = max(16, int(math.ceil(math.log10(y_max) * points_per_decade)))
    ys = np.geomspace(1.0, y_max, n + 1)[1:]
    lv = np.asarray([float(l.eval(y)) for y in ys])
    ln_y = np.log(ys)

    report = SuperlogReport(kappa_grid=kappas, y_max=float(y_max), grid_points=int(ys.size))
    for kappa in kappas:
        failing = np.nonzero(lv < kappa * ln_y)[0]
        if failing.size == 0:
            report.dominated_from[kappa] = float(ys[0])
        elif failing[-1] == ys.size - 1:
            report.dominated_from[kappa] = None
        else:
            report.dominated_from[kappa] = float(ys[failing[-1] + 1])
    return report


def markov_tightness_bound(
    cost: MomentFunction,
    A: float,
    epsilon: float,
    search_max: float = 1e300,
) -> float:
    """``K_eps = min{x >= 0 : cost(x) >= A / eps} + 1``.

    Every input law with ``E[cost(|X|)] <= A`` puts at most ``eps`` mass
    outside ``[-K_eps, K_eps]``. Ties resolve to the left-most point.

    Raises:
        ValidationError: bad ``A`` / ``eps`` or the cost never reaches ``A / eps``
            below ``search_max``.
    """
    if not A > 0:
        raise ValidationError(f"budget must be positive, got {A}")
    if not 0 < epsilon <= 1:
        raise ValidationError(f"epsilon must lie in (0, 1], got {epsilon}")
    target = A / epsilon
    c = lambda x: float(cost.eval(x))  # noqa: E731
    if c(0.0) >= target:
        return 1.0

    if cost.inverse is not None:
        # the closed-form inverse may land a few ulps short of the target
        x = float(cost.inverse(target))
        for _ in range(_INVERSE_ULP_STEPS):
            if not math.isfinite(x):
                break
            if c(x) >= target:
                return x + 1.0
            x = math.nextafter(x, math.inf)

    lo, hi = 0.0, 1.0
    while c(hi) < target:
        lo, hi = hi, 2.0 * hi
        if hi > search_max:
            raise ValidationError(f"cost '{cost.name}' never reaches {target!r} below {search_max!r}")
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if c(mid) >= target:
            hi = mid
        else:
            lo = mid
    return hi + 1.0
