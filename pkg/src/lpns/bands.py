"""Dyadic frequency-band machinery built from one smooth radial bump.

The profile is the standard smooth-partition construction

    h(t)   = exp(-1/t) for t > 0, else 0
    phi(r) = h(2 - r) / (h(2 - r) + h(r - 1))

so phi is identically 1 on [0, 1], identically 0 on [2, inf), and glues
smoothly in between.  The band shape psi(r) = phi(r) - phi(2r) is
supported on [1/2, 2] with psi(1) = 1, and the dyadic rescalings
psi(2^-j r) sum to 1 for every r > 0 once the sum covers
[log2 r - 1, log2 r + 1].

Zero-mode policy: the low-pass multiplier has phi(0) = 1, so truncations
keep the mean while every band annihilates it.  A decomposition therefore
recovers the mean through its low_pass part.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .spectral import Grid, SpectralField, radius


def _h(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def profile_eval(r) -> np.ndarray:
    """Radial low-pass profile phi: 1 on [0,1], 0 on [2,inf), smooth glue."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r < 0):
        raise ValueError("profile argument must be nonnegative")
    out = np.ones_like(r)
    out[r >= 2.0] = 0.0
    mid = (r > 1.0) & (r < 2.0)
    if np.any(mid):
        rm = r[mid]
        a = _h(2.0 - rm)
        b = _h(rm - 1.0)
        out[mid] = a / (a + b)
    return out


def band_eval(r) -> np.ndarray:
    """Annular band shape psi(r) = phi(r) - phi(2r), supported on [1/2, 2]."""
    r = np.asarray(r, dtype=np.float64)
    return profile_eval(r) - profile_eval(2.0 * r)


@lru_cache(maxsize=256)
def band_multiplier(n: int, j: int) -> np.ndarray:
    """psi(2^-j |xi|) on the lattice; read-only, cached per (n, j)."""
    m = band_eval(radius(n) * 2.0 ** (-j))
    m.flags.writeable = False
    return m


@lru_cache(maxsize=256)
def lowpass_multiplier(n: int, j: int) -> np.ndarray:
    """phi(2^-j |xi|) on the lattice; read-only, cached per (n, j)."""
    m = profile_eval(radius(n) * 2.0 ** (-j))
    m.flags.writeable = False
    return m


def project_band(F: SpectralField, j: int) -> SpectralField:
    """Multiply coefficients by the band-j shape psi(2^-j |xi|).

    Bands whose support lies entirely beyond the lattice return the zero
    field; the multiplier vanishes there on its own.
    """
    return SpectralField(F.grid, F.coeffs * band_multiplier(F.grid.n, j))


def project_leq(F: SpectralField, j: int) -> SpectralField:
    """Low-pass truncation keeping |xi| up to about 2^(j+1) (mean included)."""
    return SpectralField(F.grid, F.coeffs * lowpass_multiplier(F.grid.n, j))


def default_top_band(n: int) -> int:
    """Largest j whose band support 2^(j-1) < |xi| < 2^(j+1) is fully
    inside the resolvable ball |xi| <= n/2."""
    return int(math.log2(n // 2)) - 1


@dataclass(frozen=True)
class BandDecomposition:
    """Low-pass piece plus dyadic bands j_min..j_max of one field."""

    source: SpectralField
    j_min: int
    j_max: int
    low_pass: SpectralField
    bands: tuple[SpectralField, ...]

    def band(self, j: int) -> SpectralField:
        if not self.j_min <= j <= self.j_max:
            raise KeyError(f"band {j} outside decomposition range "
                           f"[{self.j_min}, {self.j_max}]")
        return self.bands[j - self.j_min]

    def reconstruction(self) -> SpectralField:
        total = self.low_pass.coeffs.copy()
        for piece in self.bands:
            total += piece.coeffs
        return SpectralField(self.source.grid, total)

    def reconstruction_defect(self) -> float:
        """Max coefficientwise error over modes the band range covers,
        |xi| <= min(2^j_max, n/2)."""
        n = self.source.grid.n
        covered = radius(n) <= min(2.0**self.j_max, n / 2)
        diff = np.abs(self.reconstruction().coeffs - self.source.coeffs)
        return float(np.max(diff[covered]))


def decompose(F: SpectralField, j_min: int = 1, j_max: int | None = None) -> BandDecomposition:
    """Split F into a low-pass part below j_min and bands j_min..j_max.

    The top band must be at least partially resolvable: 2^(j_max - 1) may
    not exceed the Nyquist index n/2.
    """
    n = F.grid.n
    if j_max is None:
        j_max = default_top_band(n)
    if j_min > j_max:
        raise ValueError(f"empty band range [{j_min}, {j_max}]")
    if 2 ** (j_max - 1) > n // 2:
        raise ValueError(
            f"band {j_max} lies beyond the Nyquist index {n // 2} of grid n={n}"
        )
    low = project_leq(F, j_min - 1)
    bands = tuple(project_band(F, j) for j in range(j_min, j_max + 1))
    return BandDecomposition(F, j_min, j_max, low, bands)
