"""
Differential and discrete entropies, the unit-supremum rescaling, and the
tail-entropy bound for densities with a finite super-logarithmic moment.

All values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np
from scipy.special import entr

from ..errors import MonotonicityError, NonConvergenceError, ValidationError
from .densities import Density
from .moments import MomentFunction
from .quadrature import QuadratureConfig, entropy_integrand, integrate_density_functional

COMPLETE_PMF_TOL = 1e-9
# ratio ln(1+y)/l(y) may stall at double resolution near the cap
_MONOTONE_SLACK = 1e-12


def differential_entropy(p: Density, config: QuadratureConfig | None = None) -> float:
    """``h(p) = -int p ln p`` with ``0 ln 0 = 0``.

    Raises:
        NonConvergenceError: quadrature did not converge; the partial result is attached.
    """
    result = integrate_density_functional(p, entropy_integrand(p.log_pdf), config)
    if not result.converged:
        raise NonConvergenceError(
            f"entropy of '{p.name}' did not converge (value {result.value!r}, error {result.error_estimate!r})",
            result,
        )
    return result.value


def rescale_to_unit_sup(p: Density) -> Tuple[Density, float]:
    """Return the law of ``Z = M Y`` (sup <= 1) and the entropy shift ``ln M``.

    Densities already bounded by one come back unchanged with shift 0.
    """
    M = p.sup_bound
    if M <= 1.0:
        return p, 0.0
    return p.scaled(M), math.log(M)


@dataclass(frozen=True)
class TailBoundInputs:
    L: float
    l: MomentFunction
    y_tilde: float

    def __post_init__(self):
        if not (math.isfinite(self.L) and self.L >= 0):
            raise ValidationError(f"moment bound L must be finite and non-negative, got {self.L}")
        if not self.y_tilde > 0:
            raise ValidationError(f"y_tilde must be positive, got {self.y_tilde}")
        if not float(self.l.eval(self.y_tilde)) > 0:
            raise ValidationError(f"moment function '{self.l.name}' must be positive at y_tilde={self.y_tilde}")


def _ratio_sup(l: MomentFunction, y_tilde: float, y_cap: float, points_per_decade: int) -> float:
    hi = max(y_cap, 10.0 * y_tilde)
    n = max(32, int(math.ceil(math.log10(hi / y_tilde) * points_per_decade)))
    ys = np.geomspace(y_tilde, hi, n + 1)
    ratio = np.log1p(ys) / np.asarray([float(l.eval(y)) for y in ys])
    if not np.all(np.isfinite(ratio)):
        raise MonotonicityError(f"ratio ln(1+y)/{l.name}(y) is not finite on [{y_tilde}, {hi}]")
    # certificate: non-increasing between successive grid points up to the cap
    rising = np.nonzero(ratio[1:] > ratio[:-1] * (1 + _MONOTONE_SLACK))[0]
    if rising.size:
        y_bad = float(ys[rising[-1] + 1])
        raise MonotonicityError(
            f"ratio ln(1+y)/{l.name}(y) increases at y={y_bad!r} below the cap y={hi!r}; "
            "refusing to extrapolate the supremum"
        )
    return float(ratio.max())


def tail_entropy_bound(inputs: TailBoundInputs, y_cap: float = 1e12, points_per_decade: int = 32) -> float:
    """Upper bound on the two-sided tail entropy beyond ``y_tilde``.

    For a density with sup <= 1 and ``E[l(|Y|)] <= L``::

        L ln(pi) / l(y~) + 2 L sup_{y >= y~} ln(1+y) / l(y) + (1/e) ln 4 / ln(1 + y~^2)

    The supremum is the max over a geometric grid up to ``y_cap``, accepted only
    when the ratio is non-increasing across the whole grid.

    Raises:
        MonotonicityError: the monotonicity certificate failed.
    """
    L, l, yt = inputs.L, inputs.l, inputs.y_tilde
    third = math.log(4.0) / (math.e * math.log1p(yt * yt))
    if L == 0.0:
        return third
    first = L * math.log(math.pi) / float(l.eval(yt))
    second = 2.0 * L * _ratio_sup(l, yt, y_cap, points_per_decade)
    return first + second + third


def tail_entropy(p: Density, y_tilde: float, config: QuadratureConfig | None = None) -> float:
    """``-int_{|y| >= y~} p ln p`` for a density with sup <= 1."""
    if p.sup_bound > 1.0:
        raise ValidationError(f"'{p.name}' has sup_bound {p.sup_bound!r} > 1; rescale it first")
    if not y_tilde > 0:
        raise ValidationError(f"y_tilde must be positive, got {y_tilde}")
    g = entropy_integrand(p.log_pdf)
    total = 0.0
    for domain in ((-math.inf, -y_tilde), (y_tilde, math.inf)):
        result = integrate_density_functional(p, g, config, domain=domain)
        if not result.converged:
            raise NonConvergenceError(f"tail entropy of '{p.name}' did not converge", result)
        total += result.value
    return total


def entropy_integrand_bound_holds(p: Density, grid: Iterable[float]) -> bool:
    """``|p ln p| <= 1/e`` on ``grid``; only meaningful when ``sup p <= 1``."""
    values = np.asarray(p.pdf(np.asarray(list(grid), dtype=float)), dtype=float)
    return bool(np.all(entr(values) <= 1.0 / math.e + 1e-15) and np.all(values <= 1.0 + 1e-12))


PMF = Union[Sequence[Tuple[float, float]], Sequence[float], np.ndarray]


def _probabilities(pmf: PMF) -> np.ndarray:
    arr = np.asarray(pmf, dtype=float)
    if arr.ndim == 2:
        arr = arr[:, 1]
    return arr.ravel()


def discrete_entropy(pmf: PMF, base: float = math.e, complete: bool = False) -> float:
    """``-sum p ln p`` over the masses of ``pmf`` (pairs ``(point, p)`` or bare probabilities).

    Partial (unnormalized) mass lists are accepted unless ``complete`` is set.
    """
    probs = _probabilities(pmf)
    if np.any(probs < 0) or not np.all(np.isfinite(probs)):
        raise ValidationError("probabilities must be finite and non-negative")
    if complete and abs(float(probs.sum()) - 1.0) > COMPLETE_PMF_TOL:
        raise ValidationError(f"complete pmf must sum to 1, got {float(probs.sum())!r}")
    h = float(math.fsum(entr(probs)))
    return h if base == math.e else h / math.log(base)


def kl_divergence(p: Density, q: Density, config: QuadratureConfig | None = None) -> float:
    """Relative entropy ``D(p || q) = int p ln(p / q)``."""
    lp, lq = p.log_pdf, q.log_pdf
    clamp = math.log(1e-300)

    def g(y: float) -> float:
        a = float(lp(y))
        if a < clamp:
            return 0.0
        return math.exp(a) * (a - float(lq(y)))

    result = integrate_density_functional(
        p, g, config, extra_breakpoints=(*q.discontinuities, *q.landmarks)
    )
    if not result.converged:
        raise NonConvergenceError(f"D('{p.name}' || '{q.name}') did not converge", result)
    return result.value


def to_bits(nats: float) -> float:
    return nats / math.log(2.0)
