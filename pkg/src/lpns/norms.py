"""Lebesgue norms and derivative magnitudes, carried in log space.

The weighted series downstream raises norms to powers like k = 200, far
past what float64 can hold directly, so every norm here is returned as a
log value.  Zero fields map to -inf.  All integrals are uniform lattice
Riemann sums; the torus has unit volume, so the counting measure weighted
by cell_volume is a probability measure and the usual q-monotonicity and
interpolation inequalities hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement
import math

import numpy as np

from .spectral import (
    Grid,
    PhysicalField,
    SpectralField,
    inverse_transform,
    spectral_derivative,
)
from .bands import project_band

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogNorm:
    """An L^q norm stored as log_value = ln ||f||_q; -inf encodes zero."""

    log_value: float
    q: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value) if self.log_value != NEG_INF else 0.0


def lq_norm(field: PhysicalField, q: float) -> LogNorm:
    """Lattice L^q norm of a scalar field, computed in log space.

    Finite q rescales by the max before powering, so q in the hundreds
    stays exact to float precision instead of overflowing.
    """
    if q < 1:
        raise ValueError(f"norm order must satisfy q >= 1, got {q}")
    a = np.abs(field.values)
    m = float(np.max(a))
    if m == 0.0:
        return LogNorm(NEG_INF, q)
    if math.isinf(q):
        return LogNorm(math.log(m), q)
    scaled = a / m
    # every ratio is <= 1, the max contributes exactly 1, underflow is benign
    s = float(np.sum(scaled**q))
    log_v = math.log(field.grid.cell_volume) + math.log(s)
    return LogNorm(math.log(m) + log_v / q, q)


def log_lattice_integral(grid: Grid, factors: list[tuple[np.ndarray, float]]) -> float:
    """ln of cell_volume * sum_x prod_i |a_i(x)|^p_i, max-rescaled per factor.

    Returns -inf when the product vanishes identically.  Exponent 0 factors
    contribute 1 everywhere (0^0 = 1), matching the k = 2 boundary of the
    k-2 weighted integrals.
    """
    log_prefix = math.log(grid.cell_volume)
    log_prod = np.zeros(grid.shape)
    for a, p in factors:
        if p == 0:
            continue
        a = np.abs(a)
        m = float(np.max(a))
        if m == 0.0:
            return NEG_INF
        log_prefix += p * math.log(m)
        with np.errstate(divide="ignore"):
            log_prod = log_prod + p * np.log(a / m, where=a > 0,
                                             out=np.full(grid.shape, NEG_INF))
    peak = float(np.max(log_prod))
    if peak == NEG_INF:
        return NEG_INF
    s = float(np.sum(np.exp(log_prod - peak)))
    return log_prefix + peak + math.log(s)


def derivative_tuples(sigma: int):
    """Unordered sigma-tuples of axes with their ordered multiplicities.

    Mixed partials commute, so the 3^sigma ordered tuples collapse to
    multisets weighted by the multinomial count.
    """
    out = []
    for combo in combinations_with_replacement(range(3), sigma):
        counts = [combo.count(a) for a in range(3)]
        mult = math.factorial(sigma)
        for c in counts:
            mult //= math.factorial(c)
        out.append((combo, mult))
    return out


@dataclass(frozen=True)
class DsigmaField:
    """Pointwise Euclidean magnitude over all ordered sigma-th derivatives."""

    sigma: int
    magnitude: PhysicalField


def dsigma_magnitude(F: SpectralField, sigma: int) -> DsigmaField:
    """|D^sigma f|(x): sqrt of the sum of squares of all ordered sigma-th
    partials.  sigma = 0 gives |f|, sigma = 1 the gradient magnitude,
    sigma = 2 the Frobenius norm of the Hessian."""
    if sigma < 0:
        raise ValueError("derivative order must be nonnegative")
    if sigma == 0:
        vals = np.abs(inverse_transform(F).values)
        return DsigmaField(0, PhysicalField(F.grid, vals))
    acc = np.zeros(F.grid.shape)
    for combo, mult in derivative_tuples(sigma):
        d = inverse_transform(spectral_derivative(F, combo)).values
        acc += mult * d**2
    return DsigmaField(sigma, PhysicalField(F.grid, np.sqrt(acc)))


def dsigma_magnitude_components(components, sigma: int, grid: Grid) -> DsigmaField:
    """Joint magnitude across several spectral components (a vector field):
    the Euclidean combination over components and derivative tuples."""
    acc = np.zeros(grid.shape)
    for F in components:
        if sigma == 0:
            acc += inverse_transform(F).values ** 2
            continue
        for combo, mult in derivative_tuples(sigma):
            d = inverse_transform(spectral_derivative(F, combo)).values
            acc += mult * d**2
    return DsigmaField(sigma, PhysicalField(grid, np.sqrt(acc)))


def band_dsigma_field(components, grid: Grid, j: int, sigma: int) -> DsigmaField:
    """|D^sigma P_j u| for a (possibly multi-component) field: project each
    component to band j first, then take the joint derivative magnitude."""
    banded = [project_band(F, j) for F in components]
    return dsigma_magnitude_components(banded, sigma, grid)


def band_norm_term(components, grid: Grid, j: int, k: float, sigma: int) -> LogNorm:
    """||D^sigma P_j u||_k as a LogNorm; the series layer multiplies the
    log by k itself."""
    return lq_norm(band_dsigma_field(components, grid, j, sigma).magnitude, k)
