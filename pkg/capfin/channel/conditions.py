"""
Sufficient-condition checker for a channel triplet ``(f, C, p_N)`` and the
output moment construction built on it.

Each of the eight conditions is reported with a status:

    declared          taken from the user's declaration, not testable on a grid
    verified-on-grid  sampled evidence supports it
    violated          sampled evidence contradicts it
    not-checkable     the evidence could not be produced

Grid evidence is finite-range evidence; the report records the ranges used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import CapfinError, MomentNotFiniteError, NumericalError, ValidationError
from ..numerics.densities import Density
from ..numerics.moments import DEFAULT_KAPPA_GRID, MomentFunction, superlog_diagnostic
from ..numerics.quadrature import QuadratureConfig
from .model import ChannelSpec, DiscreteInput, DistortionFunction, input_cost, output_expectation

CONDITION_NAMES = ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8")
OUTPUT_BOUND_SLACK = 1e-6


class ConditionStatus(str, Enum):
    declared = "declared"
    verified = "verified-on-grid"
    violated = "violated"
    not_checkable = "not-checkable"


class DiagnosticsConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_max: float = Field(20.0, gt=0)  # |x| range for monotonicity / continuity of f and C
    grid_points: int = Field(2001, ge=16)
    kappa_grid: List[float] = list(DEFAULT_KAPPA_GRID)
    y_max: float = Field(1e12, gt=math.e)
    jump_threshold: float = Field(1e-3, gt=0)
    refinement_levels: int = Field(4, ge=2)
    noise_cutoff: float = Field(1e-6, gt=0, lt=0.5)  # tail mass outside the sampled noise window
    quadrature: QuadratureConfig = QuadratureConfig()


@dataclass
class ConditionEntry:
    status: ConditionStatus
    evidence: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status.value, "evidence": self.evidence, "notes": list(self.notes)}


@dataclass
class TripletReport:
    entries: Dict[str, ConditionEntry]
    L_N: Optional[float]

    @property
    def overall(self) -> bool:
        return all(e.status in (ConditionStatus.declared, ConditionStatus.verified) for e in self.entries.values())

    def to_dict(self) -> dict:
        return {
            "conditions": {name: self.entries[name].to_dict() for name in CONDITION_NAMES},
            "L_N": self.L_N,
            "overall": self.overall,
        }


# ------------------------------------------------------------------ #
# Grid helpers
# ------------------------------------------------------------------ #
def _abs_grid(x_max: float, n: int) -> np.ndarray:
    return np.unique(np.concatenate([np.linspace(0.0, x_max, n), np.geomspace(1e-6, x_max, n)]))


def _non_decreasing(values: np.ndarray) -> bool:
    return bool(np.all(np.diff(values) >= -1e-12 * (1.0 + np.abs(values[1:]))))


def _max_relative_jump(fn, lo: float, hi: float, n: int, xs: np.ndarray | None = None) -> float:
    if xs is None:
        xs = np.linspace(lo, hi, n)
    v = np.asarray(fn(xs), dtype=float)
    return float(np.max(np.abs(np.diff(v)) / (1.0 + np.abs(v[1:]))))


def _piece_samples(noise: Density, a: float, b: float, n: int) -> np.ndarray:
    """Equal-probability samples on ``(a, b)`` when a quantile function exists."""
    if noise.ppf is not None and noise.cdf is not None:
        ua, ub = float(noise.cdf(a)), float(noise.cdf(b))
        if ub > ua:
            return np.asarray(noise.ppf(np.linspace(ua, ub, n)), dtype=float)
    return np.linspace(a, b, n)


def _refinement_verdict(jumps: Sequence[float], threshold: float) -> bool:
    """Continuous when the finest jump is small or jumps keep shrinking under refinement."""
    if jumps[-1] <= threshold:
        return True
    return all(b <= 0.75 * a for a, b in zip(jumps[:-1], jumps[1:]))


# ------------------------------------------------------------------ #
# Inverse distortion and the induced output moment function
# ------------------------------------------------------------------ #
def z_of_y(f: DistortionFunction, y: float, tol: float = 1e-12) -> float:
    """Largest ``x >= 0`` with ``|f(x)| = y`` (right end of a plateau).

    Raises:
        ValidationError: ``y < |f(0)|``.
        NumericalError: ``|f|`` never reaches ``2 y``.
    """
    y = float(y)
    f0 = abs(float(f(0.0)))
    if y < f0:
        raise ValidationError(f"z(y) is defined for y >= |f(0)| = {f0!r}, got {y!r}")
    if f.inverse_abs is not None and f0 == 0.0:
        return float(f.inverse_abs(y))

    absf = lambda x: abs(float(f(x)))  # noqa: E731
    hi = 1.0
    while absf(hi) < 2.0 * y:
        hi *= 2.0
        if hi > 1e300:
            raise NumericalError(f"|{f.name}| never reaches {2 * y!r}")
    lo = 0.0
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= tol * max(1.0, hi):
            break
        if absf(mid) <= y:
            lo = mid
        else:
            hi = mid
    return lo


@dataclass(frozen=True)
class CminConstruction:
    cmin: MomentFunction
    l: MomentFunction
    L: float


def _cmin_function(ch: ChannelSpec) -> MomentFunction:
    f, cost, cn = ch.f, ch.cost, ch.noise_moment
    f0 = abs(float(f(0.0)))

    def scalar(y: float) -> float:
        y = abs(float(y))
        if y < f0:
            return 0.0
        return min(float(cost(z_of_y(f, y))), float(cn(y)))

    vec = np.vectorize(scalar, otypes=[float])

    def ev(y):
        out = vec(y)
        return float(out) if np.ndim(out) == 0 else out

    return MomentFunction(name="cmin", eval=ev)


def cmin_construct(ch: ChannelSpec) -> CminConstruction:
    """``cmin(y) = min{C(z(y)), C_N(y)}`` for ``y >= |f(0)|`` (0 below), ``l(y) = cmin(y / 2)``, ``L = L_N + A``."""
    cmin = _cmin_function(ch)
    base = cmin.eval

    def half(y):
        return base(np.asarray(y, dtype=float) / 2.0)

    l = MomentFunction(name="cmin_half", eval=half)
    return CminConstruction(cmin=cmin, l=l, L=ch.L_N + ch.budget)


@dataclass(frozen=True)
class OutputMomentBound:
    lhs: float
    rhs: float
    holds: bool


def verify_output_moment_bound(
    ch: ChannelSpec, F: DiscreteInput, config: QuadratureConfig | None = None
) -> OutputMomentBound:
    """``E_Y[cmin(|Y| / 2)] <= L_N + A`` for a feasible input."""
    construction = cmin_construct(ch)
    lhs = output_expectation(ch, F, construction.l, config)
    return OutputMomentBound(lhs=lhs, rhs=construction.L, holds=lhs <= construction.L + OUTPUT_BOUND_SLACK)


def random_feasible_inputs(
    ch: ChannelSpec, n: int, rng: np.random.Generator, max_points: int = 8
) -> List[DiscreteInput]:
    """``n`` random discrete inputs with Cauchy-distributed points scaled into the budget."""
    out: List[DiscreteInput] = []
    while len(out) < n:
        k = int(rng.integers(1, max_points + 1))
        pts = np.unique(rng.standard_cauchy(k))
        w = rng.dirichlet(np.ones(pts.size))
        F = DiscreteInput.from_pairs(pts, w)
        if not input_cost(ch, F).feasible:
            lo, hi = 0.0, 1.0
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if input_cost(ch, DiscreteInput(F.points * mid, F.weights)).feasible:
                    lo = mid
                else:
                    hi = mid
            if lo == 0.0:
                continue
            scaled = F.points * lo
            if np.any(np.diff(scaled) <= 0):
                continue
            F = DiscreteInput(scaled, F.weights)
        with np.errstate(over="ignore"):
            if not np.all(np.isfinite(np.asarray(ch.f(F.points), dtype=float))):
                continue
        out.append(F)
    return out


# ------------------------------------------------------------------ #
# Individual checks
# ------------------------------------------------------------------ #
def _check_a2(cost: MomentFunction, diag: DiagnosticsConfig) -> ConditionEntry:
    xs = _abs_grid(diag.x_max, diag.grid_points)
    v = np.asarray(cost(xs), dtype=float)
    ev = {"grid": [0.0, diag.x_max], "points": int(xs.size)}
    if np.any(~np.isfinite(v)) or np.any(v < 0):
        return ConditionEntry(ConditionStatus.violated, ev, ["cost is negative or non-finite on the grid"])
    if not _non_decreasing(v):
        i = int(np.argmin(np.diff(v)))
        ev["decrease_at"] = float(xs[i])
        return ConditionEntry(ConditionStatus.violated, ev, ["cost decreases on the grid"])
    return ConditionEntry(ConditionStatus.verified, ev)


def _check_a3(ch: ChannelSpec, diag: DiagnosticsConfig) -> ConditionEntry:
    f, cost = ch.f, ch.cost
    f0 = abs(float(f(0.0)))
    y_start = max(1.0, f0)

    def transported(y: float) -> float:
        return float(cost(z_of_y(f, max(y, y_start))))

    composed = MomentFunction(name=f"{cost.name}(z(y))", eval=transported)
    try:
        report = superlog_diagnostic(composed, diag.kappa_grid, diag.y_max)
    except CapfinError as exc:
        return ConditionEntry(ConditionStatus.not_checkable, {}, [f"z(y) unavailable: {exc}"])
    ev = report.to_dict()
    notes = ["C(z(y)) compared with kappa ln y; finite-range evidence for C = omega(ln|f|)"]
    if report.dominated_for_all:
        return ConditionEntry(ConditionStatus.verified, ev, notes)
    return ConditionEntry(ConditionStatus.violated, ev, notes + ["C(z(y)) not dominating kappa ln y by y_max"])


def _check_a4(f: DistortionFunction, diag: DiagnosticsConfig) -> ConditionEntry:
    jumps = [
        _max_relative_jump(f, -diag.x_max, diag.x_max, diag.grid_points * 2**level)
        for level in range(diag.refinement_levels)
    ]
    ev = {"grid": [-diag.x_max, diag.x_max], "relative_jumps": jumps}
    if _refinement_verdict(jumps, diag.jump_threshold):
        notes = [] if f.declared_continuous else ["declared discontinuous but no jump found on the grid"]
        return ConditionEntry(ConditionStatus.verified, ev, notes)
    return ConditionEntry(ConditionStatus.violated, ev, ["jump in f persists under refinement"])


def _check_a5(f: DistortionFunction, diag: DiagnosticsConfig) -> ConditionEntry:
    xs = _abs_grid(diag.x_max, diag.grid_points)
    a_pos = np.abs(np.asarray(f(xs), dtype=float))
    a_neg = np.abs(np.asarray(f(-xs), dtype=float))
    ev = {"grid": [0.0, diag.x_max], "abs_f_at_x_max": float(max(a_pos[-1], a_neg[-1]))}
    if not (_non_decreasing(a_pos) and _non_decreasing(a_neg)):
        return ConditionEntry(ConditionStatus.violated, ev, ["|f| decreases in |x| on the grid"])
    if not (a_pos[-1] > a_pos[0] and a_neg[-1] > a_neg[0]):
        return ConditionEntry(ConditionStatus.violated, ev, ["|f| does not grow on the grid"])
    return ConditionEntry(ConditionStatus.verified, ev, ["|f(x)| -> infinity is declared"])


def _noise_pieces(noise: Density, lo: float, hi: float) -> List[tuple]:
    cuts = [d for d in noise.discontinuities if lo < d < hi]
    nodes = [lo, *cuts, hi]
    pieces = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        pad = 1e-9 * max(1.0, abs(a), abs(b))
        if b - a > 2 * pad:
            pieces.append((a + pad, b - pad))
    return pieces


def _check_a6(noise: Density, diag: DiagnosticsConfig) -> ConditionEntry:
    try:
        lo, hi = noise.quantile(diag.noise_cutoff), noise.quantile(1.0 - diag.noise_cutoff)
    except CapfinError as exc:
        return ConditionEntry(ConditionStatus.not_checkable, {}, [str(exc)])
    scale = noise.sup_bound
    pdf = lambda y: np.asarray(noise.pdf(y), dtype=float) / scale  # noqa: E731
    pieces = _noise_pieces(noise, lo, hi)
    jumps = []
    for level in range(diag.refinement_levels):
        n = diag.grid_points * 2**level
        per_piece = [
            _max_relative_jump(pdf, a, b, 0, xs=_piece_samples(noise, a, b, max(16, n // len(pieces))))
            for a, b in pieces
        ]
        jumps.append(max(per_piece) if per_piece else 0.0)
    ev = {"window": [lo, hi], "relative_jumps": jumps, "declared_discontinuities": list(noise.discontinuities)}
    notes = []
    if noise.discontinuities:
        notes.append("piecewise continuous: declared discontinuities excluded from sampling")
    if _refinement_verdict(jumps, diag.jump_threshold):
        return ConditionEntry(ConditionStatus.verified, ev, notes)
    return ConditionEntry(ConditionStatus.violated, ev, notes + ["undeclared jump in the noise pdf"])


def _check_a7(noise: Density, diag: DiagnosticsConfig) -> ConditionEntry:
    if not math.isfinite(noise.sup_bound):
        return ConditionEntry(ConditionStatus.violated, {"sup_bound": noise.sup_bound})
    try:
        lo, hi = noise.quantile(diag.noise_cutoff), noise.quantile(1.0 - diag.noise_cutoff)
    except CapfinError:
        lo, hi = -diag.x_max, diag.x_max
    ys = np.linspace(lo, hi, diag.grid_points * 4)
    peak = float(np.max(noise.pdf(ys)))
    ev = {"sup_bound": noise.sup_bound, "sampled_max": peak}
    if peak > noise.sup_bound * (1 + 1e-12):
        return ConditionEntry(ConditionStatus.violated, ev, ["sampled pdf exceeds the declared sup_bound"])
    return ConditionEntry(ConditionStatus.verified, ev)


def _check_a8(ch: ChannelSpec, diag: DiagnosticsConfig) -> tuple:
    report = superlog_diagnostic(ch.noise_moment, diag.kappa_grid, diag.y_max)
    ev: Dict[str, object] = {"superlog": report.to_dict()}
    try:
        L_N: Optional[float] = ch.L_N
    except MomentNotFiniteError as exc:
        ev["moment"] = "not finite at tolerance"
        return ConditionEntry(ConditionStatus.violated, ev, [str(exc)]), None
    ev["L_N"] = L_N
    if not report.dominated_for_all:
        return ConditionEntry(ConditionStatus.violated, ev, ["noise moment function not dominating kappa ln y"]), L_N
    return ConditionEntry(ConditionStatus.verified, ev), L_N


def check_conditions(ch: ChannelSpec, diag: DiagnosticsConfig | None = None) -> TripletReport:
    """Run A1..A8 on a channel; violations are verdicts, never exceptions."""
    diag = diag or DiagnosticsConfig()
    entries: Dict[str, ConditionEntry] = {
        "A1": ConditionEntry(
            ConditionStatus.declared,
            notes=["lower semi-continuity of the cost is not decidable from finitely many evaluations"],
        ),
        "A2": _check_a2(ch.cost, diag),
        "A3": _check_a3(ch, diag),
        "A4": _check_a4(ch.f, diag),
        "A5": _check_a5(ch.f, diag),
        "A6": _check_a6(ch.noise, diag),
        "A7": _check_a7(ch.noise, diag),
    }
    entries["A8"], L_N = _check_a8(ch, diag)
    return TripletReport(entries=entries, L_N=L_N)
