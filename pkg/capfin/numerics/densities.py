"""
Catalog of absolutely continuous densities on the real line.

A :class:`Density` is an evaluator pair (``pdf`` / ``log_pdf``) plus the
metadata the rest of the package needs: support, a declared supremum, a finite
sorted list of discontinuities, landmarks for quadrature, and closed-form
entropy / CDF / quantile where ``scipy.stats`` provides them. Evaluators accept
scalars or numpy arrays and never mutate state, so a Density can be shared
freely between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp, xlogy

from ..errors import ValidationError

Evaluator = Callable[[np.ndarray], np.ndarray]

WEIGHT_SUM_TOL = 1e-12
_HEAVY_TAIL_STEPS = (0.0, 1.0, 10.0, 1e2, 1e3, 1e4)
_GAUSS_STEPS = (0.0, 2.0, 5.0, 10.0)


@dataclass(frozen=True, eq=False)
class Density:
    name: str
    params: Tuple[float, ...]
    pdf: Evaluator
    log_pdf: Evaluator
    support: Tuple[float, float]
    sup_bound: float
    discontinuities: Tuple[float, ...] = ()
    analytic_entropy: Optional[float] = None
    analytic_moments: Mapping[str, float] = field(default_factory=dict)
    cdf: Optional[Evaluator] = None
    ppf: Optional[Evaluator] = None
    landmarks: Tuple[float, ...] = ()

    def quantile(self, q: float) -> float:
        """Return the ``q``-quantile, closed form when available."""
        if not 0.0 < q < 1.0:
            raise ValidationError(f"quantile level must lie in (0, 1), got {q}")
        if self.ppf is not None:
            return float(self.ppf(q))
        if self.cdf is None:
            raise ValidationError(f"density '{self.name}' has neither a quantile nor a CDF")
        return _invert_cdf(self, q)

    def shifted(self, offset: float) -> "Density":
        """Law of ``Y + offset``."""
        offset = float(offset)
        if offset == 0.0:
            return self
        pdf, log_pdf, cdf, ppf = self.pdf, self.log_pdf, self.cdf, self.ppf
        lo, hi = self.support
        return Density(
            name=f"{self.name}+shift",
            params=(*self.params, offset),
            pdf=lambda y: pdf(np.asarray(y, dtype=float) - offset),
            log_pdf=lambda y: log_pdf(np.asarray(y, dtype=float) - offset),
            support=(lo + offset, hi + offset),
            sup_bound=self.sup_bound,
            discontinuities=tuple(d + offset for d in self.discontinuities),
            analytic_entropy=self.analytic_entropy,
            cdf=None if cdf is None else (lambda y: cdf(np.asarray(y, dtype=float) - offset)),
            ppf=None if ppf is None else (lambda q: ppf(q) + offset),
            landmarks=tuple(x + offset for x in self.landmarks),
        )

    def scaled(self, factor: float) -> "Density":
        """Law of ``factor * Y`` for ``factor > 0``; entropy shifts by ``ln factor``."""
        c = float(factor)
        if not c > 0:
            raise ValidationError(f"scale factor must be positive, got {factor}")
        if c == 1.0:
            return self
        log_c = math.log(c)
        pdf, log_pdf, cdf, ppf = self.pdf, self.log_pdf, self.cdf, self.ppf
        lo, hi = self.support
        return Density(
            name=f"{self.name}*scale",
            params=(*self.params, c),
            pdf=lambda y: pdf(np.asarray(y, dtype=float) / c) / c,
            log_pdf=lambda y: log_pdf(np.asarray(y, dtype=float) / c) - log_c,
            support=(lo * c, hi * c),
            sup_bound=self.sup_bound / c,
            discontinuities=tuple(d * c for d in self.discontinuities),
            analytic_entropy=None if self.analytic_entropy is None else self.analytic_entropy + log_c,
            cdf=None if cdf is None else (lambda y: cdf(np.asarray(y, dtype=float) / c)),
            ppf=None if ppf is None else (lambda q: ppf(q) * c),
            landmarks=tuple(x * c for x in self.landmarks),
        )


def _invert_cdf(density: Density, q: float) -> float:
    center = float(np.median(density.landmarks)) if density.landmarks else 0.0
    lo_s, hi_s = density.support
    width = 1.0
    lo, hi = max(center - width, lo_s), min(center + width, hi_s)
    for _ in range(2100):
        f_lo = density.cdf(lo) - q if math.isfinite(lo) else -q
        f_hi = density.cdf(hi) - q if math.isfinite(hi) else 1.0 - q
        if f_lo <= 0.0 <= f_hi and math.isfinite(lo) and math.isfinite(hi):
            return float(brentq(lambda y: float(density.cdf(y)) - q, lo, hi, xtol=1e-14, rtol=1e-14))
        width *= 2.0
        lo, hi = max(center - width, lo_s), min(center + width, hi_s)
    raise ValidationError(f"could not bracket the {q}-quantile of '{density.name}'")


def _symmetric_landmarks(loc: float, scale: float, steps: Iterable[float]) -> Tuple[float, ...]:
    pts = {loc}
    for s in steps:
        pts.add(loc - s * scale)
        pts.add(loc + s * scale)
    return tuple(sorted(pts))


def _require_positive(family: str, **values: float) -> None:
    for key, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise ValidationError(f"{family}: parameter '{key}' must be positive and finite, got {value}")


def _expect_params(family: str, params: Sequence[float], names: Sequence[str]) -> Tuple[float, ...]:
    if len(params) != len(names):
        raise ValidationError(f"{family} expects parameters {list(names)}, got {list(params)}")
    values = tuple(float(p) for p in params)
    if not all(math.isfinite(v) for v in values):
        raise ValidationError(f"{family}: parameters must be finite, got {list(params)}")
    return values


# ------------------------------------------------------------------ #
# Families
# ------------------------------------------------------------------ #
def _gaussian(params: Sequence[float]) -> Density:
    loc, scale = _expect_params("gaussian", params, ("loc", "scale"))
    _require_positive("gaussian", scale=scale)
    frozen = stats.norm(loc=loc, scale=scale)
    norm_const = -math.log(scale) - 0.5 * math.log(2 * math.pi)

    def log_pdf(y):
        z = (np.asarray(y, dtype=float) - loc) / scale
        return norm_const - 0.5 * z * z

    return Density(
        name="gaussian",
        params=(loc, scale),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(-math.inf, math.inf),
        sup_bound=1.0 / (scale * math.sqrt(2 * math.pi)),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments={"power_2": loc * loc + scale * scale, "zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=_symmetric_landmarks(loc, scale, _GAUSS_STEPS),
    )


def _cauchy(params: Sequence[float]) -> Density:
    loc, scale = _expect_params("cauchy", params, ("loc", "scale"))
    _require_positive("cauchy", scale=scale)
    frozen = stats.cauchy(loc=loc, scale=scale)
    norm_const = -math.log(math.pi) - math.log(scale)

    def log_pdf(y):
        z = (np.asarray(y, dtype=float) - loc) / scale
        return norm_const - np.log1p(z * z)

    moments = {"zero": 0.0}
    if loc == 0.0:
        # E ln(1 + Y^2) = 2 ln(1 + scale); ln 4 for the standard law.
        moments["log1p_square"] = 2.0 * math.log1p(scale)
    return Density(
        name="cauchy",
        params=(loc, scale),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(-math.inf, math.inf),
        sup_bound=1.0 / (math.pi * scale),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments=moments,
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=_symmetric_landmarks(loc, scale, _HEAVY_TAIL_STEPS),
    )


def _uniform(params: Sequence[float]) -> Density:
    a, b = _expect_params("uniform", params, ("low", "high"))
    if not b > a:
        raise ValidationError(f"uniform: need low < high, got [{a}, {b}]")
    width = b - a
    frozen = stats.uniform(loc=a, scale=width)
    height, log_height = 1.0 / width, -math.log(width)

    def inside(y):
        y = np.asarray(y, dtype=float)
        return (y >= a) & (y < b)

    return Density(
        name="uniform",
        params=(a, b),
        pdf=lambda y: np.where(inside(y), height, 0.0),
        log_pdf=lambda y: np.where(inside(y), log_height, -np.inf),
        support=(a, b),
        sup_bound=height,
        discontinuities=(a, b),
        analytic_entropy=math.log(width),
        analytic_moments={"power_2": (a * a + a * b + b * b) / 3.0, "zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
    )


def _pareto(params: Sequence[float]) -> Density:
    shape, scale = _expect_params("pareto", params, ("shape", "scale"))
    _require_positive("pareto", shape=shape, scale=scale)
    frozen = stats.pareto(shape, scale=scale)
    log_const = math.log(shape) + shape * math.log(scale)

    def log_pdf(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = log_const - (shape + 1.0) * np.log(np.where(y >= scale, y, scale))
        return np.where(y >= scale, out, -np.inf)

    return Density(
        name="pareto",
        params=(shape, scale),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(scale, math.inf),
        sup_bound=shape / scale,
        discontinuities=(scale,),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments={"zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=tuple(scale * (1.0 + s) for s in _HEAVY_TAIL_STEPS),
    )


def _gamma(params: Sequence[float]) -> Density:
    shape, scale = _expect_params("gamma", params, ("shape", "scale"))
    _require_positive("gamma", shape=shape, scale=scale)
    if shape < 1.0:
        raise ValidationError(f"gamma: shape must be >= 1 for a bounded density, got {shape}")
    frozen = stats.gamma(shape, scale=scale)
    log_const = -gammaln(shape) - shape * math.log(scale)

    def log_pdf(y):
        y = np.asarray(y, dtype=float)
        yy = np.where(y >= 0.0, y, 0.0)
        with np.errstate(divide="ignore"):
            out = log_const + xlogy(shape - 1.0, yy) - yy / scale
        return np.where(y >= 0.0, out, -np.inf)

    mode = (shape - 1.0) * scale
    sup = float(np.exp(log_pdf(mode)))
    spread = math.sqrt(shape) * scale
    return Density(
        name="gamma",
        params=(shape, scale),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(0.0, math.inf),
        sup_bound=sup,
        discontinuities=(0.0,) if shape == 1.0 else (),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments={"power_2": shape * (shape + 1.0) * scale * scale, "zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=tuple(sorted({0.0, mode, mode + 5 * spread, mode + 20 * spread})),
    )


def _gennorm(params: Sequence[float]) -> Density:
    loc, scale, beta = _expect_params("gennorm", params, ("loc", "scale", "beta"))
    _require_positive("gennorm", scale=scale, beta=beta)
    frozen = stats.gennorm(beta, loc=loc, scale=scale)
    log_const = math.log(beta) - math.log(2.0 * scale) - gammaln(1.0 / beta)

    def log_pdf(y):
        z = np.abs(np.asarray(y, dtype=float) - loc) / scale
        return log_const - z**beta

    steps = _GAUSS_STEPS if beta >= 1.0 else _HEAVY_TAIL_STEPS
    return Density(
        name="gennorm",
        params=(loc, scale, beta),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(-math.inf, math.inf),
        sup_bound=math.exp(log_const),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments={"zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=_symmetric_landmarks(loc, scale, steps),
    )


def _student_t(params: Sequence[float]) -> Density:
    df, loc, scale = _expect_params("student_t", params, ("df", "loc", "scale"))
    _require_positive("student_t", df=df, scale=scale)
    frozen = stats.t(df, loc=loc, scale=scale)
    log_const = (
        gammaln((df + 1.0) / 2.0) - gammaln(df / 2.0) - 0.5 * math.log(df * math.pi) - math.log(scale)
    )

    def log_pdf(y):
        z = (np.asarray(y, dtype=float) - loc) / scale
        return log_const - 0.5 * (df + 1.0) * np.log1p(z * z / df)

    return Density(
        name="student_t",
        params=(df, loc, scale),
        pdf=lambda y: np.exp(log_pdf(y)),
        log_pdf=log_pdf,
        support=(-math.inf, math.inf),
        sup_bound=math.exp(log_const),
        analytic_entropy=float(frozen.entropy()),
        analytic_moments={"zero": 0.0},
        cdf=frozen.cdf,
        ppf=frozen.ppf,
        landmarks=_symmetric_landmarks(loc, scale, _HEAVY_TAIL_STEPS),
    )


FAMILIES: Dict[str, Callable[[Sequence[float]], Density]] = {
    "gaussian": _gaussian,
    "cauchy": _cauchy,
    "uniform": _uniform,
    "pareto": _pareto,
    "gamma": _gamma,
    "gennorm": _gennorm,
    "student_t": _student_t,
}


def make_density(name: str, params: Sequence[float]) -> Density:
    """Build a catalog density from its family name and parameter vector.

    Raises:
        ValidationError: unknown family or invalid parameters.
    """
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown density family '{name}'; known: {sorted(FAMILIES)}") from None
    return builder(list(params))


# ------------------------------------------------------------------ #
# Mixtures
# ------------------------------------------------------------------ #
def _check_weights(weights: Sequence[float]) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.size == 0:
        raise ValidationError("mixture needs at least one component")
    if np.any(~np.isfinite(w)) or np.any(w <= 0):
        raise ValidationError("mixture weights must be positive")
    if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"mixture weights must sum to 1 (got {float(w.sum())!r})")
    return w


def _thin(points: np.ndarray, min_gap: float) -> Tuple[float, ...]:
    pts = np.unique(points)
    if min_gap <= 0 or pts.size < 2:
        return tuple(pts.tolist())
    kept: List[float] = [float(pts[0])]
    for x in pts[1:]:
        if x - kept[-1] >= min_gap:
            kept.append(float(x))
    return tuple(kept)


def mixture(components: Sequence[Tuple[float, Density]]) -> Density:
    """Finite mixture ``sum_i w_i p_i``.

    A single component with weight 1 is returned unchanged.
    """
    if len(components) == 0:
        raise ValidationError("mixture needs at least one component")
    w = _check_weights([c[0] for c in components])
    parts = [c[1] for c in components]
    if len(parts) == 1:
        return parts[0]
    log_w = np.log(w)

    def pdf(y):
        return sum(wi * p.pdf(y) for wi, p in zip(w, parts))

    def log_pdf(y):
        terms = np.stack([lw + p.log_pdf(y) for lw, p in zip(log_w, parts)], axis=0)
        with np.errstate(divide="ignore"):
            return logsumexp(terms, axis=0)

    cdf = None
    if all(p.cdf is not None for p in parts):
        cdf = lambda y: sum(wi * p.cdf(y) for wi, p in zip(w, parts))  # noqa: E731

    return Density(
        name="mixture",
        params=tuple(float(x) for x in w),
        pdf=pdf,
        log_pdf=log_pdf,
        support=(min(p.support[0] for p in parts), max(p.support[1] for p in parts)),
        sup_bound=float(sum(wi * p.sup_bound for wi, p in zip(w, parts))),
        discontinuities=tuple(sorted({d for p in parts for d in p.discontinuities})),
        cdf=cdf,
        landmarks=tuple(sorted({x for p in parts for x in p.landmarks})),
    )


def location_mixture(base: Density, offsets: Sequence[float], weights: Sequence[float]) -> Density:
    """Mixture of shifted copies ``sum_i w_i base(y - o_i)``, evaluated in one vectorized pass.

    Zero-weight offsets are dropped; the remaining weights must sum to one.
    """
    o = np.asarray(offsets, dtype=float)
    w = np.asarray(weights, dtype=float)
    if o.shape != w.shape or o.ndim != 1:
        raise ValidationError("offsets and weights must be 1-D arrays of equal length")
    keep = w > 0
    o, w = o[keep], w[keep]
    w = _check_weights(w)
    if o.size == 1:
        return base.shifted(float(o[0]))
    log_w = np.log(w)
    base_pdf, base_log_pdf, base_cdf = base.pdf, base.log_pdf, base.cdf

    def pdf(y):
        y = np.asarray(y, dtype=float)
        return base_pdf(y[..., None] - o) @ w

    def log_pdf(y):
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore"):
            return logsumexp(base_log_pdf(y[..., None] - o) + log_w, axis=-1)

    cdf = None
    if base_cdf is not None:
        cdf = lambda y: base_cdf(np.asarray(y, dtype=float)[..., None] - o) @ w  # noqa: E731

    lo, hi = base.support
    marks = np.asarray(base.landmarks, dtype=float)
    gaps = np.diff(marks)
    min_gap = float(gaps.min()) / 2.0 if gaps.size else 0.0
    landmarks = _thin((marks[None, :] + o[:, None]).ravel(), min_gap) if marks.size else ()
    discontinuities = np.unique((np.asarray(base.discontinuities, dtype=float)[None, :] + o[:, None]).ravel())
    return Density(
        name=f"{base.name}-location-mixture",
        params=tuple(o.tolist()) + tuple(w.tolist()),
        pdf=pdf,
        log_pdf=log_pdf,
        support=(lo + float(o.min()), hi + float(o.max())),
        sup_bound=base.sup_bound,
        discontinuities=tuple(discontinuities.tolist()),
        cdf=cdf,
        landmarks=landmarks,
    )


def density_from_config(cfg: Mapping) -> Density:
    """Build a density from ``{"family": name, "params": [...]}`` or a mixture config.

    Mixtures use ``{"family": "mixture", "components": [{"weight": w, "density": {...}}, ...]}``.
    """
    family = cfg.get("family")
    if family == "mixture":
        comps = cfg.get("components") or []
        try:
            parts = [(float(c["weight"]), density_from_config(c["density"])) for c in comps]
        except ValidationError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"mixture components need a numeric 'weight' and a 'density': {exc!r}") from exc
        return mixture(parts)
    if family is None:
        raise ValidationError("density config needs a 'family' field")
    return make_density(family, cfg.get("params", []))
