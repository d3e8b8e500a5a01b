"""Reproducible test-field families for the inequality checks.

Every sample is fully determined by (kind, seed, n, band, index): the RNG
is rebuilt from that tuple per sample, so runs are bit-identical across
processes and sample i does not depend on whether samples 0..i-1 were
drawn.  All generated fields are real (Hermitian spectra), mean-free, and
carry no energy on the asymmetric Nyquist planes.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
import scipy.fft as _fft

from .spectral import Grid, SpectralField, grid_points, radius, wavevectors
from .bands import project_band

RANDOM_BAND_LIMITED = "random-band-limited"
SINGLE_MODE = "single-mode"
WAVE_PACKET = "wave-packet"
SMOOTH_DECAYING = "smooth-decaying"

_KIND_TAG = {
    RANDOM_BAND_LIMITED: 1,
    SINGLE_MODE: 2,
    WAVE_PACKET: 3,
    SMOOTH_DECAYING: 4,
}


def _interior_mask(n: int) -> np.ndarray:
    """Keep |xi_i| <= n/2 - 1 componentwise: no Nyquist-plane content."""
    k1, k2, k3 = wavevectors(n)
    half = n // 2
    return (np.abs(k1) < half) & (np.abs(k2) < half) & (np.abs(k3) < half)


def _noise_spectrum(grid: Grid, rng) -> np.ndarray:
    """Hermitian white-noise coefficients from a real sample field."""
    w = rng.standard_normal(grid.shape)
    return _fft.fftn(w) * grid.cell_volume


def _l2(coeffs: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


def _normalized(grid: Grid, coeffs: np.ndarray, amplitude: float) -> SpectralField:
    nrm = _l2(coeffs)
    if nrm == 0.0:
        raise ValueError("generated field vanished; bad generator parameters")
    return SpectralField(grid, coeffs * (amplitude / nrm))


def _snap_to_band(rng, j: int, n: int) -> np.ndarray:
    """Random lattice vector with radius near 2^j, strictly inside the
    band-j annulus and the resolvable interior."""
    target = 2.0**j
    half = n // 2
    for _ in range(256):
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        xi = np.rint(target * v).astype(int)
        r = np.sqrt(float(np.sum(xi**2)))
        if 2.0 ** (j - 1) < r < 2.0 ** (j + 1) and np.all(np.abs(xi) <= half - 1):
            return xi
    raise ValueError(f"no resolvable lattice vector near radius 2^{j} on n={n}")


@dataclass(frozen=True)
class FieldGenerator:
    """Deterministic sampler for one family of scalar test fields.

    kind: one of random-band-limited, single-mode, wave-packet,
    smooth-decaying.  band selects the dyadic annulus for the banded
    kinds; radius_cap limits the support ball for the broadband kinds
    (default n/4, so refined products stay exactly resolvable).
    """

    kind: str
    seed: int
    n: int
    band: int | None = None
    amplitude: float = 1.0
    radius_cap: float | None = None

    def __post_init__(self):
        if self.kind not in _KIND_TAG:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        Grid(self.n)

    def for_band(self, j: int) -> "FieldGenerator":
        return dataclasses.replace(self, band=j)

    def sample(self, index: int) -> SpectralField:
        grid = Grid(self.n)
        rng = np.random.default_rng([_KIND_TAG[self.kind], self.seed, index])
        if self.kind == RANDOM_BAND_LIMITED:
            return self._random_band_limited(grid, rng)
        if self.kind == SMOOTH_DECAYING:
            return self._smooth_decaying(grid, rng)
        if self.kind == SINGLE_MODE:
            return self._single_mode(grid, rng)
        return self._wave_packet(grid, rng)

    def samples(self, count: int, start: int = 0):
        return [self.sample(start + i) for i in range(count)]

    def _support_mask(self, grid: Grid) -> np.ndarray:
        r = radius(grid.n)
        keep = _interior_mask(grid.n) & (r > 0)
        if self.band is not None:
            keep &= (r > 2.0 ** (self.band - 1)) & (r < 2.0 ** (self.band + 1))
        else:
            cap = self.radius_cap if self.radius_cap is not None else grid.n / 4
            keep &= r <= cap
        if not np.any(keep):
            raise ValueError("empty spectral support for generator parameters")
        return keep

    def _random_band_limited(self, grid: Grid, rng) -> SpectralField:
        c = _noise_spectrum(grid, rng) * self._support_mask(grid)
        return _normalized(grid, c, self.amplitude)

    def _smooth_decaying(self, grid: Grid, rng) -> SpectralField:
        rho = (self.radius_cap if self.radius_cap is not None else grid.n / 4) / 2.0
        weight = np.exp(-((radius(grid.n) / rho) ** 2))
        c = _noise_spectrum(grid, rng) * self._support_mask(grid) * weight
        return _normalized(grid, c, self.amplitude)

    def _single_mode(self, grid: Grid, rng) -> SpectralField:
        j = self.band if self.band is not None else 2
        xi = _snap_to_band(rng, j, grid.n)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        c = np.zeros(grid.shape, dtype=np.complex128)
        idx = tuple(int(v) % grid.n for v in xi)
        neg = tuple(int(-v) % grid.n for v in xi)
        c[idx] = 0.5 * np.exp(1j * phase)
        c[neg] = np.conj(c[idx])
        return _normalized(grid, c, self.amplitude)

    def _wave_packet(self, grid: Grid, rng) -> SpectralField:
        # Gaussian envelope at scale 2^(1-j) times a carrier at radius 2^j,
        # band-projected: the family that saturates dyadic norm-comparison
        # slopes, unlike broadband noise.
        j = self.band if self.band is not None else 3
        xi = _snap_to_band(rng, j, grid.n)
        width = 2.0 ** (1 - j)
        center = rng.uniform(0.0, 1.0, size=3)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        x1, x2, x3 = grid_points(grid)
        d2 = np.zeros(grid.shape)
        for x, c in ((x1, center[0]), (x2, center[1]), (x3, center[2])):
            delta = np.abs(x - c)
            delta = np.minimum(delta, 1.0 - delta)
            d2 = d2 + delta**2
        envelope = np.exp(-d2 / (2.0 * width**2))
        carrier = np.cos(2.0 * np.pi * (xi[0] * x1 + xi[1] * x2 + xi[2] * x3) + theta)
        c = _fft.fftn(envelope * carrier) * grid.cell_volume
        c *= _interior_mask(grid.n)   # annuli near n/2 would reach Nyquist
        banded = project_band(SpectralField(grid, c), j)
        return _normalized(grid, banded.coeffs, self.amplitude)
