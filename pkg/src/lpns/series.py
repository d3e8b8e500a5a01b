"""Weighted frequency-norm series and the scalar barrier inequality.

The central diagnostic is a double series over Lebesgue exponents k and
dyadic bands j,

    sum_k sum_j ||D^sigma P_j u||_k^k / 2^{W_k},

with super-exponentially growing weights W_k.  Two weight families are
used: the main family (b + 1 + 1/sqrt(k)) k, and a low-frequency family
(b - 1/sqrt(k)) k + 2^b whose partial sums over j <= floor(8 b / sigma)
are the quantity expected to stay below 1 once b is large enough.  Every
aggregation runs in log space: a single term like ||.||_200^200 spans
hundreds of orders of magnitude, so sums are assembled with log-sum-exp
over a fixed iteration order (k outer, j inner) for reproducibility.

The barrier side integrates the scalar inequality F' = g (eps + F + F^M)
and reports, separately, whether the smallness hypothesis on eps holds
and whether the ceiling 3 eps exp(bound) holds along the trajectory.
Keeping the two verdicts apart matters: a trajectory through the ceiling
with the hypothesis violated is not a counterexample to anything.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from types import MappingProxyType

import numpy as np
from scipy.special import logsumexp

from .norms import NEG_INF, band_dsigma_field, lq_norm
from .solver import VelocityState, l2_norm_sq
from .spectral import SpectralField

LN2 = math.log(2.0)
TAIL_TOLERANCE = 1e-12


# -- exponent arithmetic ----------------------------------------------------

def bk(k: float, b: float) -> float:
    """Main weight exponent (b + 1 + 1/sqrt(k)) k."""
    if k < 1 or b <= 0:
        raise ValueError("need k >= 1 and b > 0")
    return (b + 1 + 1 / math.sqrt(k)) * k


def bhat(k: float, b: float) -> float:
    """Low-frequency weight exponent (b - 1/sqrt(k)) k + 2^b."""
    if k < 1 or b <= 0:
        raise ValueError("need k >= 1 and b > 0")
    return (b - 1 / math.sqrt(k)) * k + 2.0**b


def j0_cutoff(b: float, sigma: int) -> int:
    """Band index separating the low-frequency partial sums: floor(8b/sigma)."""
    if b <= 0 or sigma < 1:
        raise ValueError("need b > 0 and sigma >= 1")
    return math.floor(8 * b / sigma)


def crossover_k(b: float) -> int:
    """Smallest k with bhat(k, b) <= bk(k, b), i.e. k + 2 sqrt(k) >= 2^b.

    The condition is monotone in k, so it holds for every k beyond the
    returned value.
    """
    if b <= 0:
        raise ValueError("need b > 0")
    target = 2.0**b
    s = -1.0 + math.sqrt(1.0 + target)  # positive root of s^2 + 2s = 2^b
    k = max(1, math.ceil(s * s) - 2)
    while k + 2 * math.sqrt(k) < target:
        k += 1
    return k


@dataclass(frozen=True)
class SeriesParams:
    """Truncation and weight parameters for the double series."""

    sigma: int = 2
    j0: int = 1
    k0: int = 100
    b: float = 1.0
    k_grid: tuple = tuple(range(100, 201, 10))
    j_cap: int | None = None  # None: every band resolvable on the grid

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.j0 < 1:
            raise ValueError("j0 must be at least 1")
        if self.b <= 0:
            raise ValueError("b must be positive")
        ks = tuple(self.k_grid)
        if not ks or ks[0] != self.k0:
            raise ValueError("k_grid must start at k0")
        if any(k2 <= k1 for k1, k2 in zip(ks, ks[1:])):
            raise ValueError("k_grid must be strictly increasing")
        if self.k0 < 1:
            raise ValueError("k0 must be at least 1")
        if self.j_cap is not None and self.j_cap < self.j0:
            raise ValueError("j_cap must be at least j0")
        object.__setattr__(self, "k_grid", ks)

    def effective_j_cap(self, n: int) -> int:
        # highest band whose annulus reaches into the resolvable ball
        grid_cap = int(math.log2(n // 2))
        return grid_cap if self.j_cap is None else min(self.j_cap, grid_cap)


@dataclass(frozen=True)
class ExponentFamily:
    """Weight exponents evaluated on a k_grid, plus the crossover index
    beyond which the low-frequency family is dominated by the main one."""

    params: SeriesParams
    bk_values: tuple
    bhat_values: tuple
    j0_cutoff: int
    crossover: int

    @classmethod
    def from_params(cls, params: SeriesParams) -> "ExponentFamily":
        b = params.b
        return cls(
            params=params,
            bk_values=tuple(bk(k, b) for k in params.k_grid),
            bhat_values=tuple(bhat(k, b) for k in params.k_grid),
            j0_cutoff=j0_cutoff(b, max(params.sigma, 1)),
            crossover=crossover_k(b),
        )


# -- series evaluation ------------------------------------------------------

@dataclass(frozen=True)
class TermTable:
    """Per-(band, exponent) log norms of one state; weights not applied.

    log_norms maps (j, k) to ln ||D^sigma P_j u||_k and log_sup maps j to
    ln ||D^sigma P_j u||_inf; empty bands carry -inf.  The table is the
    expensive part (it holds all the transforms), so it is computed once
    per state and reweighted freely afterwards.
    """

    params: SeriesParams
    time: float
    j_values: tuple
    log_norms: MappingProxyType
    log_sup: MappingProxyType


def term_table(state: VelocityState, params: SeriesParams) -> TermTable:
    grid = state.grid
    comps = [SpectralField(grid, c) for c in state.components]
    j_values = tuple(range(params.j0, params.effective_j_cap(grid.n) + 1))
    log_norms = {}
    log_sup = {}
    for j in j_values:
        mag = band_dsigma_field(comps, grid, j, params.sigma).magnitude
        log_sup[j] = lq_norm(mag, math.inf).log_value
        for k in params.k_grid:
            log_norms[(j, k)] = lq_norm(mag, k).log_value
    return TermTable(params, state.time, j_values,
                     MappingProxyType(log_norms), MappingProxyType(log_sup))


def reweighted(table: TermTable, b: float) -> TermTable:
    """The same measured norms under a different weight growth parameter.

    Norm tables are b-independent, so weight sweeps reuse one table
    instead of redoing the transforms.
    """
    return replace(table, params=replace(table.params, b=b))


@dataclass(frozen=True)
class SeriesResult:
    """Log-space value of one weighted aggregation with tail diagnostics.

    last_k_fraction / last_j_fraction are the shares of the total carried
    by the final k (resp. final j) of the truncation; truncated is set
    when either share exceeds 1e-12, meaning the reported value cannot
    stand in for the untruncated series.
    """

    log_value: float
    weight: str
    j_split: str
    last_k_fraction: float
    last_j_fraction: float
    truncated: bool

    @property
    def value(self) -> float:
        if self.log_value == NEG_INF:
            return 0.0
        if self.log_value > 709.0:  # exp overflow edge for float64
            return math.inf
        return math.exp(self.log_value)


def _selected_bands(table: TermTable, j_split: str) -> tuple:
    if j_split == "all":
        return table.j_values
    cut = j0_cutoff(table.params.b, max(table.params.sigma, 1))
    if j_split == "low":
        return tuple(j for j in table.j_values if j <= cut)
    if j_split == "high":
        return tuple(j for j in table.j_values if j > cut)
    raise ValueError(f"j_split must be all, low, or high, got {j_split!r}")


def aggregate_series(table: TermTable, weight: str = "Bk",
                     j_split: str = "all") -> SeriesResult:
    """Reduce a term table to one weighted series value in log space."""
    params = table.params
    if weight == "Bk":
        exps = {k: bk(k, params.b) for k in params.k_grid}
    elif weight == "BhatK":
        exps = {k: bhat(k, params.b) for k in params.k_grid}
    else:
        raise ValueError(f"weight must be Bk or BhatK, got {weight!r}")
    js = _selected_bands(table, j_split)
    if not js:
        return SeriesResult(NEG_INF, weight, j_split, 0.0, 0.0, False)

    terms = []          # fixed order: k outer, j inner
    last_k_terms = []
    last_j_terms = []
    k_last = params.k_grid[-1]
    j_last = js[-1]
    for k in params.k_grid:
        w = exps[k] * LN2
        for j in js:
            ln_norm = table.log_norms[(j, k)]
            t = k * ln_norm - w if ln_norm != NEG_INF else NEG_INF
            terms.append(t)
            if k == k_last:
                last_k_terms.append(t)
            if j == j_last:
                last_j_terms.append(t)
    total = float(logsumexp(np.array(terms)))
    if total == NEG_INF:
        return SeriesResult(NEG_INF, weight, j_split, 0.0, 0.0, False)
    fk = float(np.exp(logsumexp(np.array(last_k_terms)) - total))
    fj = float(np.exp(logsumexp(np.array(last_j_terms)) - total))
    truncated = fk > TAIL_TOLERANCE or fj > TAIL_TOLERANCE
    return SeriesResult(total, weight, j_split, fk, fj, truncated)


def series_value(state: VelocityState, params: SeriesParams,
                 weight: str = "Bk", j_split: str = "all",
                 warn: bool = True) -> SeriesResult:
    """One-shot weighted series of a state; see TermTable for the split
    between the transform-heavy and the reweighting parts."""
    result = aggregate_series(term_table(state, params), weight, j_split)
    if warn and result.truncated:
        warnings.warn(
            f"series truncation tail is not negligible "
            f"(last-k {result.last_k_fraction:.3g}, "
            f"last-j {result.last_j_fraction:.3g} of total)")
    return result


# -- growth-bound target ----------------------------------------------------

def gronwall_bound(u0_l2: float, nu: float, t_final: float,
                   calibration_c: float = 1.0) -> float:
    """exp(c (1 + nu^-2) ((1 + ||u0||_2^5) T + nu^-1 ||u0||_2^{8/3})).

    The universal constant is not derivable numerically, so callers pin
    calibration_c and read results as ratios.  The value overflows to
    inf for strong data; use gronwall_log_target for stable ratios.
    """
    if nu <= 0 or t_final < 0 or calibration_c <= 0:
        raise ValueError("need nu > 0, t_final >= 0, calibration_c > 0")
    x = calibration_c * (1 + nu**-2) * (
        (1 + u0_l2**5) * t_final + u0_l2 ** (8 / 3) / nu)
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def gronwall_log_target(u0_l2: float, nu: float, t_final: float,
                        calibration_c: float = 1.0) -> float:
    """ln(2 C - 1) for the bound C above, safe for any magnitude."""
    if nu <= 0 or t_final < 0 or calibration_c <= 0:
        raise ValueError("need nu > 0, t_final >= 0, calibration_c > 0")
    x = calibration_c * (1 + nu**-2) * (
        (1 + u0_l2**5) * t_final + u0_l2 ** (8 / 3) / nu)
    # ln(2 e^x - 1) = x + ln(2 - e^-x)
    return x + math.log(2.0 - math.exp(-x)) if x > 0 else math.log(2 * math.exp(x) - 1)


# -- run monitor ------------------------------------------------------------

SERIES_CSV_COLUMNS = (
    "time", "series_Bk_total", "series_Bk_low", "series_Bk_high",
    "series_Bhat_low", "sup_estimate", "gronwall_ratio", "truncation_flag",
)


class SeriesMonitor:
    """Attachable run monitor emitting the weighted-series row schema.

    Columns: the three main-weight splits, the low-frequency-weight low
    split (tracked against 1), sup_estimate = max_j ||D^sigma P_j u||_inf
    divided by 2^{b+1}, and the ratio of the total series against
    2 C - 1 with C the growth bound of the initial state.  The first
    observed state is taken as the initial state for that target.
    """

    name = "series"

    def __init__(self, params: SeriesParams, t_final: float,
                 calibration_c: float = 1.0, cadence: float = 0.0,
                 keep_tables: bool = False):
        self.params = params
        self.t_final = t_final
        self.calibration_c = calibration_c
        self.cadence = cadence
        self.keep_tables = keep_tables
        self.tables: list[TermTable] = []
        self._log_target: float | None = None

    def observe(self, state: VelocityState) -> dict:
        if self._log_target is None:
            u0_l2 = math.sqrt(l2_norm_sq(state))
            self._log_target = gronwall_log_target(
                u0_l2, state.nu, self.t_final, self.calibration_c)
        table = term_table(state, self.params)
        if self.keep_tables:
            self.tables.append(table)
        total = aggregate_series(table, "Bk", "all")
        low = aggregate_series(table, "Bk", "low")
        high = aggregate_series(table, "Bk", "high")
        bhat_low = aggregate_series(table, "BhatK", "low")
        sup_log = max(table.log_sup.values(), default=NEG_INF)
        sup_ratio = (0.0 if sup_log == NEG_INF
                     else math.exp(sup_log - (self.params.b + 1) * LN2))
        ratio_log = total.log_value - self._log_target
        return {
            "series_Bk_total": total.value,
            "series_Bk_low": low.value,
            "series_Bk_high": high.value,
            "series_Bhat_low": bhat_low.value,
            "sup_estimate": sup_ratio,
            "gronwall_ratio": 0.0 if total.log_value == NEG_INF
            else math.exp(ratio_log) if ratio_log < 709.0 else math.inf,
            "truncation_flag": int(any(r.truncated
                                       for r in (total, low, high, bhat_low))),
        }


# -- band sup-norm decay fit (reported only) --------------------------------

def band_sup_decay_fit(state: VelocityState, params: SeriesParams) -> dict:
    """Fit log2 ||D^{sigma+1} P_j u||_{k0} against j and report the slope.

    A smooth state should show these per-band norms falling geometrically
    in j; the slope is reported as a diagnostic, never asserted, because
    its constant depends on the data.
    """
    grid = state.grid
    comps = [SpectralField(grid, c) for c in state.components]
    lifted = SeriesParams(sigma=params.sigma + 1, j0=params.j0, k0=params.k0,
                          b=params.b, k_grid=params.k_grid, j_cap=params.j_cap)
    js, logs = [], []
    for j in range(lifted.j0, lifted.effective_j_cap(grid.n) + 1):
        mag = band_dsigma_field(comps, grid, j, lifted.sigma).magnitude
        ln = lq_norm(mag, lifted.k0).log_value
        if ln != NEG_INF:
            js.append(j)
            logs.append(ln / LN2)
    if len(js) < 2:
        return {"slope": float("nan"), "bands_used": len(js)}
    slope = float(np.polyfit(np.array(js, dtype=float), np.array(logs), 1)[0])
    return {"slope": slope, "bands_used": len(js)}


# -- barrier inequality -----------------------------------------------------

@dataclass(frozen=True)
class BarrierConfig:
    """Scalar inequality F' = g(t) (eps + F + F^M), F(0) = eps."""

    epsilon: float
    script_b: float          # bound on the integral of g over [0, T]
    m_power: float
    t_final: float
    g_schedule: object = None  # callable t -> rate; None means constant B/T

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.script_b <= 0:
            raise ValueError("the g-integral bound must be positive")
        if self.m_power <= 1:
            raise ValueError("the superlinear power must exceed 1")
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")

    def rate(self, t: float) -> float:
        if self.g_schedule is None:
            return self.script_b / self.t_final
        return float(self.g_schedule(t))


def epsilon_threshold(script_b: float, m_power: float) -> float:
    """Largest starting level the barrier hypothesis admits:
    (3 e^B)^{-M/(M-1)}."""
    if script_b <= 0 or m_power <= 1:
        raise ValueError("need script_b > 0 and m_power > 1")
    return (3.0 * math.exp(script_b)) ** (-m_power / (m_power - 1.0))


@dataclass(frozen=True)
class BarrierResult:
    times: np.ndarray
    values: np.ndarray
    hypothesis_ok: bool
    conclusion_ok: bool
    margin: float
    ceiling: float
    threshold: float
    blown_up: bool = False
    blow_up_time: float | None = None

    @property
    def verdict(self) -> str:
        if self.conclusion_ok:
            return "conclusion-holds"
        return "hypothesis-failed" if not self.hypothesis_ok else "conclusion-failed"


def _check_g_budget(cfg: BarrierConfig) -> None:
    # composite Simpson on a fine grid; also rejects negative rates
    nodes = 4096
    ts = np.linspace(0.0, cfg.t_final, nodes + 1)
    gs = np.array([cfg.rate(t) for t in ts])
    if np.any(gs < 0):
        raise ValueError("the rate schedule must be nonnegative")
    h = cfg.t_final / nodes
    integral = h / 3 * (gs[0] + gs[-1] + 4 * gs[1:-1:2].sum() + 2 * gs[2:-1:2].sum())
    if integral > cfg.script_b * (1 + 1e-9):
        raise ValueError(
            f"integral of the rate schedule {integral:.6g} exceeds the "
            f"declared bound {cfg.script_b:.6g}")


def barrier_ode(cfg: BarrierConfig, dt: float = 1e-3) -> BarrierResult:
    """Integrate the barrier inequality with RK4 and judge both clauses.

    hypothesis_ok states whether epsilon clears the smallness threshold;
    conclusion_ok whether the trajectory stays under 3 eps e^B within
    absolute slack 1e-9.  Exceeding the ceiling with the hypothesis
    violated is reported as hypothesis-failed.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    _check_g_budget(cfg)
    steps = max(1, math.ceil(cfg.t_final / dt))
    h = cfg.t_final / steps
    m = cfg.m_power

    def f(t: float, v: float) -> float:
        return cfg.rate(t) * (cfg.epsilon + v + v**m)

    times = [0.0]
    values = [cfg.epsilon]
    blown_up = False
    blow_time = None
    v = np.float64(cfg.epsilon)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(steps):
            t = i * h
            k1 = f(t, v)
            k2 = f(t + h / 2, v + h / 2 * k1)
            k3 = f(t + h / 2, v + h / 2 * k2)
            k4 = f(t + h, v + h * k3)
            v = v + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.isfinite(v):
                blown_up = True
                blow_time = t + h
                break
            times.append(t + h)
            values.append(float(v))
    threshold = epsilon_threshold(cfg.script_b, cfg.m_power)
    ceiling = 3.0 * cfg.epsilon * math.exp(cfg.script_b)
    peak = max(values) if values else math.inf
    margin = ceiling - (math.inf if blown_up else peak)
    return BarrierResult(
        times=np.array(times),
        values=np.array(values),
        hypothesis_ok=cfg.epsilon <= threshold,
        conclusion_ok=(not blown_up) and margin >= -1e-9,
        margin=margin,
        ceiling=ceiling,
        threshold=threshold,
        blown_up=blown_up,
        blow_up_time=blow_time,
    )
