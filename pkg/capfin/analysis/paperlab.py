"""
Closed-form worked examples used as golden regressions.

Example 1 is a sequence of bounded densities converging point-wise to
``U[0, 1]`` whose entropies tend to 1/2 instead of 0, because its
super-logarithmic moments are unbounded.

Example 2 feeds heavy-tailed integer inputs ``P(k) ~ 1 / (k (ln k)^(1+i))``
through a ``U[0, 1)`` noise channel: outputs of different inputs never
overlap, so the mutual information is the input's discrete entropy, which
diverges for ``i = 1`` and converges for ``i = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..channel.model import ChannelSpec, DiscreteInput, identity, mutual_information
from ..errors import ValidationError
from ..numerics.densities import Density, make_density
from ..numerics.entropy import differential_entropy, discrete_entropy
from ..numerics.moments import MomentFunction, zero
from ..numerics.quadrature import QuadratureConfig
from ..utils.workers import ordered_map
from .convergence import DensitySequence

EXAMPLE1_MIN_M = 3
EXAMPLE1_M_LIST = (10**2, 10**4, 10**8, 10**16)
EXAMPLE2_K_LIST = (10**3, 10**4, 10**5, 10**6)
# Lower floors on H(K') - H(K) for i = 1 between consecutive K in EXAMPLE2_K_LIST,
# set at about half of the integral-comparison estimates (0.208, 0.152, 0.119).
EXAMPLE2_GROWTH_FLOORS: Dict[Tuple[int, int], float] = {
    (10**3, 10**4): 0.10,
    (10**4, 10**5): 0.075,
    (10**5, 10**6): 0.06,
}
_SUM_CHUNK = 1 << 18
_FLOAT_LOG_MAX = 709.0

EXAMPLE1_CSV_HEADER = ("m", "closed_form", "quadrature", "gap")
EXAMPLE2_CSV_HEADER = ("K", "i", "entropy_partial", "B_partial", "tail_bound", "increment")


# ------------------------------------------------------------------ #
# Example 1
# ------------------------------------------------------------------ #
def _log_m(m: Optional[float], log_m: Optional[float]) -> float:
    if (m is None) == (log_m is None):
        raise ValidationError("give exactly one of m and log_m")
    if m is not None:
        if not m >= EXAMPLE1_MIN_M:
            raise ValidationError(f"example 1 needs m >= {EXAMPLE1_MIN_M}, got {m}")
        return math.log(m)
    if not (math.isfinite(log_m) and log_m >= math.log(EXAMPLE1_MIN_M)):
        raise ValidationError(f"example 1 needs ln m >= ln {EXAMPLE1_MIN_M}, got {log_m}")
    return float(log_m)


def example1_entropy_closed_form(m: Optional[float] = None, log_m: Optional[float] = None) -> float:
    """``-(1 - 1/ln m) ln(1 - 1/ln m) + 2 ln(ln m) / ln m + 1/2``."""
    L = _log_m(m, log_m)
    a = 1.0 - 1.0 / L
    return -a * math.log1p(-1.0 / L) + 2.0 * math.log(L) / L + 0.5


def example1_density(m: Optional[float] = None, log_m: Optional[float] = None) -> Density:
    """``p_m = 1 - 1/ln m`` on ``[0, 1]`` and ``1 / ((ln m)^2 x)`` on ``(1, m]``.

    ``log_m`` admits values of ``m`` beyond float range; the support is then
    cut at the largest float.
    """
    L = _log_m(m, log_m)
    m_val = math.exp(L) if L < _FLOAT_LOG_MAX else math.inf
    head = 1.0 - 1.0 / L
    log_head = math.log(head)
    inv_L2 = 1.0 / (L * L)
    log_inv_L2 = -2.0 * math.log(L)

    def log_pdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            tail = log_inv_L2 - np.log(np.where(x > 1.0, x, 1.0))
        out = np.where((x >= 0.0) & (x <= 1.0), log_head, -np.inf)
        return np.where((x > 1.0) & (x <= m_val), tail, out)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where((x >= 0.0) & (x <= 1.0), head, 0.0)
        return np.where((x > 1.0) & (x <= m_val), inv_L2 / np.where(x > 1.0, x, 1.0), out)

    def cdf(x):
        x = np.asarray(x, dtype=float)
        mid = head + np.log(np.clip(x, 1.0, None)) * inv_L2
        out = np.where(x <= 1.0, head * np.clip(x, 0.0, 1.0), mid)
        return np.where(x >= m_val, 1.0, out)

    def ppf(q):
        q = np.asarray(q, dtype=float)
        return np.where(q <= head, q / head, np.exp((q - head) * L * L))

    top = min(L / math.log(10.0), 300.0)
    decades = tuple(10.0**k for k in range(1, int(math.floor(top)) + 1) if 10.0**k < m_val)
    upper = m_val if math.isfinite(m_val) else float(np.finfo(float).max)
    return Density(
        name="example1",
        params=(L,),
        pdf=pdf,
        log_pdf=log_pdf,
        support=(0.0, upper),
        sup_bound=1.0,
        discontinuities=(0.0, 1.0, upper),
        analytic_entropy=example1_entropy_closed_form(log_m=L),
        cdf=cdf,
        ppf=ppf,
        landmarks=decades,
    )


def example1_limit() -> Density:
    return make_density("uniform", [0.0, 1.0])


def example1_sequence(max_index: int = 10**100) -> DensitySequence:
    return DensitySequence(
        index_set=range(EXAMPLE1_MIN_M, max_index + 1),
        member=lambda m: example1_density(log_m=math.log(m)),
        limit=example1_limit(),
    )


def example1_c2_lower_bound(l: MomentFunction, kappa: float, c: float, m: float, points_per_decade: int = 64) -> float:
    """``kappa ((ln m)^2 - (ln c)^2) / (2 (ln m)^2)``, a lower bound on ``E_{p_m}[l(|X|)]``.

    Raises:
        ValidationError: ``m <= c^2``, or ``l(x) >= kappa ln x`` fails on a
            geometric grid over ``[c, m]``.
    """
    if not (kappa > 0 and c > 1):
        raise ValidationError(f"need kappa > 0 and c > 1, got kappa={kappa}, c={c}")
    if not m > c * c:
        raise ValidationError(f"need m > c^2 = {c * c!r}, got {m}")
    n = max(16, int(math.ceil(math.log10(m / c) * points_per_decade)))
    xs = np.geomspace(c, m, n)
    if np.any(np.asarray(l.eval(xs), dtype=float) < kappa * np.log(xs)):
        raise ValidationError(f"'{l.name}' is not above {kappa} ln x on [{c}, {m}]")
    L2, lc2 = math.log(m) ** 2, math.log(c) ** 2
    return kappa * (L2 - lc2) / (2.0 * L2)


def example1_row(m: float, config: QuadratureConfig | None = None) -> tuple:
    closed = example1_entropy_closed_form(m=m)
    quad = differential_entropy(example1_density(m=m), config)
    return (m, closed, quad, abs(closed - quad))


def example1_rows(m_values: Sequence[float], config: QuadratureConfig | None = None) -> List[tuple]:
    return ordered_map(lambda m: example1_row(m, config), list(m_values))


# ------------------------------------------------------------------ #
# Example 2
# ------------------------------------------------------------------ #
@dataclass(frozen=True)
class Example2Pmf:
    i: int
    K: int
    masses: np.ndarray  # unnormalized, k = 2..K
    B_partial: float
    tail_bound: float  # sum_{k > K} masses <= 1 / (i (ln K)^i)

    @property
    def support(self) -> np.ndarray:
        return np.arange(2, self.K + 1, dtype=float)

    @property
    def probabilities(self) -> np.ndarray:
        return self.masses * self.B_partial

    @property
    def tail_note(self) -> str:
        return f"unnormalized tail mass beyond K={self.K} is at most {self.tail_bound!r}"


def _check_example2(i: int, K: int) -> None:
    if i not in (1, 2):
        raise ValidationError(f"example 2 needs i in {{1, 2}}, got {i}")
    if K < 2:
        raise ValidationError(f"example 2 needs K >= 2, got {K}")


def _chunks(K: int) -> List[Tuple[int, int]]:
    return [(a, min(a + _SUM_CHUNK, K + 1)) for a in range(2, K + 1, _SUM_CHUNK)]


def _masses(i: int, a: int, b: int) -> np.ndarray:
    k = np.arange(a, b, dtype=float)
    return 1.0 / (k * np.log(k) ** (1 + i))


def example2_pmf(i: int, K: int) -> Example2Pmf:
    _check_example2(i, K)
    masses = _masses(i, 2, K + 1)
    total = math.fsum(ordered_map(lambda ab: float(np.sum(_masses(i, *ab))), _chunks(K)))
    return Example2Pmf(
        i=i,
        K=K,
        masses=masses,
        B_partial=1.0 / total,
        tail_bound=1.0 / (i * math.log(K) ** i),
    )


def _entropy_chunk(i: int, a: int, b: int) -> Tuple[float, float]:
    k = np.arange(a, b, dtype=float)
    ln_k = np.log(k)
    m = 1.0 / (k * ln_k ** (1 + i))
    return float(np.sum(m)), float(np.sum(m * (ln_k + (1 + i) * np.log(ln_k))))


def example2_entropy_partial(i: int, K: int) -> float:
    """``-ln B + B sum_{k=2}^{K} (ln k + (1+i) ln ln k) / (k (ln k)^(1+i))`` with ``B`` the partial normalizer.

    Chunks are summed in a thread pool and reduced in order.
    """
    _check_example2(i, K)
    parts = ordered_map(lambda ab: _entropy_chunk(i, *ab), _chunks(K))
    total = math.fsum(p[0] for p in parts)
    weighted = math.fsum(p[1] for p in parts)
    B = 1.0 / total
    return math.log(total) + B * weighted


def example2_channel(budget: float = 1.0, quadrature: QuadratureConfig | None = None) -> ChannelSpec:
    """``Y = X + N`` with ``N ~ U[0, 1)`` and no cost constraint."""
    return ChannelSpec(
        f=identity(),
        noise=make_density("uniform", [0.0, 1.0]),
        cost=zero(),
        noise_moment=zero(),
        budget=budget,
        quadrature=quadrature or QuadratureConfig(),
    )


def example2_input(i: int, K: int) -> DiscreteInput:
    pmf = example2_pmf(i, K)
    probs = pmf.probabilities
    return DiscreteInput(pmf.support, probs / probs.sum())


def example2_channel_mi(i: int, K: int, config: QuadratureConfig | None = None) -> float:
    """Mutual information of the truncated Example 2 input through the ``U[0, 1)`` channel."""
    return mutual_information(example2_channel(quadrature=config), example2_input(i, K), config)


def example2_discrete_entropy(i: int, K: int) -> float:
    return discrete_entropy(example2_pmf(i, K).probabilities)


@dataclass
class GrowthDiagnostic:
    i: int
    K_values: Tuple[int, ...]
    entropies: Tuple[float, ...]
    increments: Tuple[float, ...]
    floors: Tuple[Optional[float], ...]
    diverging: bool  # every increment above its frozen floor
    increments_shrinking: bool

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "K": list(self.K_values),
            "entropy_partial": list(self.entropies),
            "increments": list(self.increments),
            "floors": list(self.floors),
            "diverging": self.diverging,
            "increments_shrinking": self.increments_shrinking,
        }


def example2_growth_diagnostic(i: int, K_values: Sequence[int] = EXAMPLE2_K_LIST) -> GrowthDiagnostic:
    """Partial entropies at growing ``K`` against the frozen growth floors."""
    Ks = tuple(sorted(int(K) for K in K_values))
    if len(Ks) < 2:
        raise ValidationError("growth diagnostic needs at least two truncation points")
    H = tuple(example2_entropy_partial(i, K) for K in Ks)
    inc = tuple(b - a for a, b in zip(H[:-1], H[1:]))
    floors = tuple(EXAMPLE2_GROWTH_FLOORS.get(pair) for pair in zip(Ks[:-1], Ks[1:]))
    diverging = all(f is not None and d > f for d, f in zip(inc, floors))
    shrinking = all(b < a for a, b in zip(inc[:-1], inc[1:]))
    return GrowthDiagnostic(i, Ks, H, inc, floors, diverging, shrinking)


def example2_rows(i: int, K_values: Sequence[int]) -> List[tuple]:
    rows: List[tuple] = []
    prev: Optional[float] = None
    for K in sorted(int(K) for K in K_values):
        pmf = example2_pmf(i, K)
        H = example2_entropy_partial(i, K)
        rows.append((K, i, H, pmf.B_partial, pmf.tail_bound, None if prev is None else H - prev))
        prev = H
    return rows
