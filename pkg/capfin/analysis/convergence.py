"""
Entropy-convergence checker for a sequence of densities ``p_m -> p``.

The checker verifies numerically that the members share a uniform upper
bound and a bounded super-logarithmic moment ``E[l(|Y|)]``, computes the
entropy sequence and the limit's entropy, and reports a verdict. Point-wise
convergence is only required away from the declared discontinuities of the
members and of the limit (an almost-everywhere statement), and the report
says so.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from ..errors import MomentNotFiniteError, NonConvergenceError, ValidationError
from ..numerics.densities import Density, make_density, mixture
from ..numerics.entropy import differential_entropy
from ..numerics.moments import MomentFunction, moment_functional, superlog_diagnostic
from ..numerics.quadrature import QuadratureConfig
from ..utils.workers import ordered_map

UNBOUNDED = "unbounded at tolerance"
AE_NOTE = (
    "point-wise gaps exclude the declared discontinuity points of p_m and p; "
    "convergence is checked almost everywhere"
)
_GROWTH_REL_TOL = 1e-9


class ConvergenceVerdict(str, Enum):
    HOLDS = "conditions-hold-and-converges"
    C1_VIOLATED = "C1-violated"
    C2_VIOLATED = "C2-violated"
    INCONCLUSIVE = "inconclusive"


class ConvergenceConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    quadrature: QuadratureConfig = QuadratureConfig()
    moment_cap: float = 1e6  # moments above this count as unbounded
    sup_cap: float = 1e6  # sup bounds above this violate the uniform bound
    entropy_tol: float = 1e-2  # largest final entropy gap a converging verdict accepts
    grid_min: float = -20.0  # sampling grid for sup and point-wise gaps
    grid_max: float = 20.0
    grid_points: int = 4001
    workers: Optional[int] = None  # None: CAPFIN_THREADS or CPU count

    @model_validator(mode="after")
    def _check_ranges(self):
        if not (self.moment_cap > 0 and self.sup_cap > 0):
            raise ValueError("caps must be positive")
        if not self.entropy_tol > 0:
            raise ValueError("entropy_tol must be positive")
        if not self.grid_max > self.grid_min:
            raise ValueError("grid_max must exceed grid_min")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")
        return self

    def grid(self) -> np.ndarray:
        return np.linspace(self.grid_min, self.grid_max, self.grid_points)


@dataclass
class DensitySequence:
    index_set: Sequence[int]
    member: Callable[[int], Density]
    limit: Density

    def __post_init__(self):
        if isinstance(self.member, Mapping):
            self.member = self.member.__getitem__

    def __getitem__(self, m: int) -> Density:
        if m not in self.index_set:
            raise ValidationError(f"index {m} is not in the sequence's index set")
        return self.member(m)


@dataclass
class ConvergenceReport:
    M_found: float
    L_found: Union[float, str]
    pointwise_max_gap: Dict[int, float]
    entropy_sequence: Dict[int, Optional[float]]
    entropy_limit: Optional[float]
    verdict: ConvergenceVerdict
    moments: Dict[int, float] = field(default_factory=dict)
    limit_moment: float = math.nan
    M_declared: float = math.nan
    M_sampled: float = math.nan
    moment_cap: float = 1e6
    sup_cap: float = 1e6
    growth_note: Optional[str] = None
    moment_superlog: bool = True
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        def num(x):
            return x if x is None or math.isfinite(x) else UNBOUNDED

        return {
            "verdict": self.verdict.value,
            "M_found": self.M_found,
            "M_declared": self.M_declared,
            "M_sampled": self.M_sampled,
            "L_found": self.L_found,
            "moment_cap": self.moment_cap,
            "sup_cap": self.sup_cap,
            "moments": [{"m": m, "value": num(v)} for m, v in self.moments.items()],
            "limit_moment": num(self.limit_moment),
            "entropy_sequence": [{"m": m, "value": v} for m, v in self.entropy_sequence.items()],
            "entropy_limit": self.entropy_limit,
            "pointwise_max_gap": [{"m": m, "value": v} for m, v in self.pointwise_max_gap.items()],
            "growth_note": self.growth_note,
            "moment_superlog": self.moment_superlog,
            "notes": list(self.notes),
        }


@dataclass
class _MemberStats:
    m: int
    sup_declared: float
    sup_sampled: float
    moment: float
    entropy: Optional[float]
    entropy_error: Optional[str]
    gap: float


# ------------------------------------------------------------------ #
# Helpers
# ------------------------------------------------------------------ #
def _excluded(grid: np.ndarray, points: Sequence[float]) -> np.ndarray:
    mask = np.zeros(grid.shape, dtype=bool)
    for d in points:
        mask |= np.isclose(grid, d, rtol=1e-12, atol=0.0)
    return mask


def pointwise_gap(seq: DensitySequence, m: int, grid) -> float:
    """``max |p_m(y) - p(y)|`` over ``grid`` without the discontinuity points of ``p_m`` and ``p``."""
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValidationError("gap grid must be finite and non-empty")
    member, limit = seq[m], seq.limit
    keep = ~_excluded(grid, (*member.discontinuities, *limit.discontinuities))
    if not np.any(keep):
        return 0.0
    ys = grid[keep]
    return float(np.max(np.abs(np.asarray(member.pdf(ys), dtype=float) - np.asarray(limit.pdf(ys), dtype=float))))


def _grows_without_deceleration(values: Sequence[float]) -> bool:
    """True for at least three finite values with positive, non-decreasing increments."""
    v = np.asarray(values, dtype=float)
    if v.size < 3 or not np.all(np.isfinite(v)):
        return False
    inc = np.diff(v)
    scale = _GROWTH_REL_TOL * np.maximum(1.0, np.abs(v[:-1]))
    if np.any(inc <= scale):
        return False
    return bool(np.all(inc[1:] >= inc[:-1] * (1.0 - _GROWTH_REL_TOL)))


def _strictly_increasing(values: Sequence[float]) -> bool:
    v = np.asarray(values, dtype=float)
    if v.size < 2 or not np.all(np.isfinite(v)):
        return False
    return bool(np.all(np.diff(v) > _GROWTH_REL_TOL * np.maximum(1.0, np.abs(v[:-1]))))


def _is_superlog(l: MomentFunction) -> bool:
    return l.declared_superlog or superlog_diagnostic(l).dominated_for_all


def _safe_moment(p: Density, l: MomentFunction, quadrature: QuadratureConfig) -> float:
    try:
        return moment_functional(p, l, quadrature)
    except MomentNotFiniteError:
        return math.inf


def _member_stats(m: int, seq: DensitySequence, l: MomentFunction, config: ConvergenceConfig) -> _MemberStats:
    p = seq[m]
    grid = config.grid()
    entropy, error = None, None
    try:
        entropy = differential_entropy(p, config.quadrature)
    except NonConvergenceError as exc:
        error = str(exc)
    return _MemberStats(
        m=m,
        sup_declared=p.sup_bound,
        sup_sampled=float(np.max(np.asarray(p.pdf(grid), dtype=float))),
        moment=_safe_moment(p, l, config.quadrature),
        entropy=entropy,
        entropy_error=error,
        gap=pointwise_gap(seq, m, grid),
    )


# ------------------------------------------------------------------ #
# Checker
# ------------------------------------------------------------------ #
def check_theorem1(
    seq: DensitySequence,
    l: MomentFunction,
    m_list: Sequence[int],
    config: ConvergenceConfig | None = None,
) -> ConvergenceReport:
    """Check the uniform sup bound (C1) and the moment bound (C2) on ``m_list`` and compare entropies.

    Verdict order: a failed entropy is inconclusive; then C1, then C2 from the
    moment cap or accelerating growth. Past those, a moment function that is
    not super-logarithmic gives an inconclusive verdict. Otherwise the
    final entropy gap must be within ``entropy_tol``: if it is not and the
    moments increase along ``m``, C2 is reported violated, else the verdict is
    inconclusive. Last, the entropy gaps must not grow from the first to the
    last tested index.
    """
    config = config or ConvergenceConfig()
    m_list = sorted(int(m) for m in m_list)
    if not m_list:
        raise ValidationError("m_list must not be empty")
    for m in m_list:
        if m not in seq.index_set:
            raise ValidationError(f"index {m} is not in the sequence's index set")

    stats = ordered_map(partial(_member_stats, seq=seq, l=l, config=config), m_list, workers=config.workers)

    limit = seq.limit
    notes = [AE_NOTE]
    entropy_limit: Optional[float] = None
    try:
        entropy_limit = differential_entropy(limit, config.quadrature)
    except NonConvergenceError as exc:
        notes.append(f"limit entropy: {exc}")
    limit_moment = _safe_moment(limit, l, config.quadrature)
    for s in stats:
        if s.entropy_error is not None:
            notes.append(f"m={s.m}: {s.entropy_error}")

    sups_declared = [s.sup_declared for s in stats] + [limit.sup_bound]
    sups_sampled = [s.sup_sampled for s in stats] + [float(np.max(limit.pdf(config.grid())))]
    M_declared, M_sampled = max(sups_declared), max(sups_sampled)
    M_found = max(M_declared, M_sampled)

    moments = [s.moment for s in stats]
    growth_note = None
    unbounded = any(not math.isfinite(v) or v > config.moment_cap for v in moments + [limit_moment])
    if _grows_without_deceleration(moments):
        unbounded = True
        growth_note = "moments increase along m with non-decreasing increments"
    L_found: Union[float, str] = UNBOUNDED if unbounded else max(moments + [limit_moment])

    c1_violated = M_found > config.sup_cap or _grows_without_deceleration([s.sup_declared for s in stats])
    if c1_violated and M_found <= config.sup_cap:
        notes.append("declared sup bounds increase along m with non-decreasing increments")

    entropies = [s.entropy for s in stats]
    gaps = [abs(h - entropy_limit) for h in entropies if h is not None and entropy_limit is not None]
    superlog = _is_superlog(l)
    if entropy_limit is None or any(h is None for h in entropies):
        verdict = ConvergenceVerdict.INCONCLUSIVE
    elif c1_violated:
        verdict = ConvergenceVerdict.C1_VIOLATED
    elif unbounded:
        verdict = ConvergenceVerdict.C2_VIOLATED
    elif not superlog:
        verdict = ConvergenceVerdict.INCONCLUSIVE
        notes.append(f"'{l.name}' is not super-logarithmic; a bounded E[l] does not control the entropies")
    elif gaps[-1] > config.entropy_tol:
        if _strictly_increasing(moments):
            verdict = ConvergenceVerdict.C2_VIOLATED
            L_found = UNBOUNDED
            growth_note = (
                f"moments increase along m while the entropy gap at m={m_list[-1]} "
                f"({gaps[-1]!r}) stays above entropy_tol"
            )
        else:
            verdict = ConvergenceVerdict.INCONCLUSIVE
            notes.append(f"entropy gap {gaps[-1]!r} at m={m_list[-1]} exceeds entropy_tol={config.entropy_tol!r}")
    elif gaps[-1] > gaps[0] + config.quadrature.abs_tol:
        verdict = ConvergenceVerdict.INCONCLUSIVE
        notes.append("entropy gaps do not decrease along m")
    else:
        verdict = ConvergenceVerdict.HOLDS

    return ConvergenceReport(
        M_found=M_found,
        L_found=L_found,
        pointwise_max_gap={s.m: s.gap for s in stats},
        entropy_sequence={s.m: s.entropy for s in stats},
        entropy_limit=entropy_limit,
        verdict=verdict,
        moments={s.m: s.moment for s in stats},
        limit_moment=limit_moment,
        M_declared=M_declared,
        M_sampled=M_sampled,
        moment_cap=config.moment_cap,
        sup_cap=config.sup_cap,
        growth_note=growth_note,
        moment_superlog=superlog,
        notes=notes,
    )


# ------------------------------------------------------------------ #
# Families
# ------------------------------------------------------------------ #
def gaussian_scale_family(max_index: int = 10**9) -> DensitySequence:
    """``p_m = N(0, 1 + 1/m)`` (variance) converging to ``N(0, 1)``."""
    return DensitySequence(
        index_set=range(1, max_index + 1),
        member=lambda m: make_density("gaussian", [0.0, math.sqrt(1.0 + 1.0 / m)]),
        limit=make_density("gaussian", [0.0, 1.0]),
    )


def mixture_interpolation_family(max_index: int = 10**9) -> DensitySequence:
    """``p_m = (1 - 1/m) N(0, 1) + (1/m) Cauchy(0, 1)`` converging to ``N(0, 1)``; ``m >= 2``."""
    gauss = make_density("gaussian", [0.0, 1.0])
    cauchy = make_density("cauchy", [0.0, 1.0])
    return DensitySequence(
        index_set=range(2, max_index + 1),
        member=lambda m: mixture([(1.0 - 1.0 / m, gauss), (1.0 / m, cauchy)]),
        limit=gauss,
    )


def constant_family(density: Density, max_index: int = 10**9) -> DensitySequence:
    return DensitySequence(index_set=range(1, max_index + 1), member=lambda m: density, limit=density)
