"""Fourier-side plumbing for scalar fields on the periodic unit box.

Conventions used throughout the package:

* The domain is the unit torus [0, 1)^3 sampled on an n x n x n grid,
  x_m = m / n for integer m.
* Wavevectors are integers xi in [-n/2, n/2)^3, stored in FFT layout
  (0, 1, ..., n/2 - 1, -n/2, ..., -1 along each axis).
* The forward transform approximates the continuum Fourier coefficient

      coeff(xi) = integral f(x) exp(-2 pi i x . xi) dx

  so a constant field c has coeff(0) = c and cos(2 pi x_1) puts 1/2 at
  xi = (+-1, 0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.fft as _fft

REALNESS_TOL = 1e-12


class RealnessError(ValueError):
    """Inverse transform produced a significant imaginary part."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on the unit box.

    Simulation grids are powers of two (the config layer enforces this);
    the type itself also admits even 3-smooth sizes such as 48 or 96,
    which appear as scratch space for 3/2-padded products.
    """

    n: int

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)):
            raise TypeError(f"grid size must be an integer, got {n!r}")
        m = int(n)
        for p in (2, 3):
            while m % p == 0:
                m //= p
        if n < 8 or n > 1536 or n % 2 != 0 or m != 1:
            raise ValueError(
                f"grid size must be an even 3-smooth integer in [8, 1536], got {n}"
            )

    @property
    def cell_volume(self) -> float:
        return 1.0 / self.n**3

    @property
    def nyquist(self) -> int:
        return self.n // 2

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)


@dataclass(frozen=True)
class PhysicalField:
    """Real scalar samples f(x_m) on a Grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients in FFT layout on a Grid."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )


@lru_cache(maxsize=32)
def wavevectors(n: int):
    """Integer wavevector components as broadcastable read-only arrays."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    k1 = k.reshape(n, 1, 1).copy()
    k2 = k.reshape(1, n, 1).copy()
    k3 = k.reshape(1, 1, n).copy()
    for a in (k1, k2, k3):
        a.flags.writeable = False
    return k1, k2, k3


@lru_cache(maxsize=32)
def radius_squared(n: int) -> np.ndarray:
    k1, k2, k3 = wavevectors(n)
    r2 = k1**2 + k2**2 + k3**2
    r2.flags.writeable = False
    return r2


@lru_cache(maxsize=32)
def radius(n: int) -> np.ndarray:
    r = np.sqrt(radius_squared(n))
    r.flags.writeable = False
    return r


def grid_points(grid: Grid):
    """Coordinate arrays x_m = m/n, broadcastable to the grid shape."""
    n = grid.n
    x = np.arange(n) / n
    return x.reshape(n, 1, 1), x.reshape(1, n, 1), x.reshape(1, 1, n)


def forward_transform(field: PhysicalField) -> SpectralField:
    """Sampled forward transform; carries the cell volume so coefficients
    approximate continuum Fourier coefficients."""
    coeffs = _fft.fftn(field.values) * field.grid.cell_volume
    return SpectralField(field.grid, coeffs)


def inverse_transform(F: SpectralField, require_real: bool = True) -> PhysicalField:
    """Evaluate the trigonometric polynomial on the grid.

    With require_real (the default) a non-Hermitian input is treated as a
    caller bug: the imaginary residue must stay below REALNESS_TOL relative
    to the field magnitude.
    """
    w = _fft.ifftn(F.coeffs) * F.grid.n**3
    re = w.real
    if require_real:
        scale = float(np.max(np.abs(re)))
        residue = float(np.max(np.abs(w.imag)))
        if residue > REALNESS_TOL * max(scale, 1e-300):
            raise RealnessError(
                f"imaginary residue {residue:.3e} exceeds {REALNESS_TOL:.0e} "
                f"of field magnitude {scale:.3e}; input is not Hermitian"
            )
    return PhysicalField(F.grid, np.ascontiguousarray(re))


def spectral_derivative(F: SpectralField, multi_index: tuple[int, ...]) -> SpectralField:
    """Apply prod_a (2 pi i xi_a) over an ordered tuple of axis indices.

    The empty tuple is the identity.  For odd derivative counts along an
    axis the asymmetric Nyquist plane xi_axis = -n/2 is zeroed; it has no
    conjugate partner, and an odd power of (2 pi i xi) there would break
    realness of the result.
    """
    for a in multi_index:
        if a not in (0, 1, 2):
            raise ValueError(f"axis index must be 0, 1 or 2, got {a}")
    if not multi_index:
        return SpectralField(F.grid, F.coeffs.copy())
    n = F.grid.n
    ks = wavevectors(n)
    counts = [0, 0, 0]
    for a in multi_index:
        counts[a] += 1
    out = F.coeffs.copy()
    for axis, c in enumerate(counts):
        if c == 0:
            continue
        out *= (2j * np.pi * ks[axis]) ** c
        if c % 2 == 1:
            nyq = [slice(None)] * 3
            nyq[axis] = n // 2
            out[tuple(nyq)] = 0.0
    return SpectralField(F.grid, out)


def hermitian_defect(F: SpectralField) -> float:
    """Max |coeff(xi) - conj(coeff(-xi))| over the lattice."""
    c = F.coeffs
    c_neg = np.roll(np.flip(c, axis=(0, 1, 2)), shift=(1, 1, 1), axis=(0, 1, 2))
    return float(np.max(np.abs(c - np.conj(c_neg))))


def hermitianize(coeffs: np.ndarray) -> np.ndarray:
    """Average coefficients with their reflected conjugates.

    A transform of real samples is Hermitian only up to FFT rounding;
    the asymmetric residue is pure noise, but it sits in otherwise empty
    regions of the spectrum and would read as non-real content there.
    Symmetrizing makes the symmetry exact without moving any value by
    more than the rounding already did.
    """
    c_neg = np.roll(np.flip(coeffs, axis=(0, 1, 2)), shift=(1, 1, 1),
                    axis=(0, 1, 2))
    return 0.5 * (coeffs + np.conj(c_neg))


def parseval_mismatch(field: PhysicalField, F: SpectralField) -> float:
    """Relative gap between sum |coeff|^2 and cell_volume * sum |f|^2."""
    lhs = float(np.sum(np.abs(F.coeffs) ** 2))
    rhs = field.grid.cell_volume * float(np.sum(field.values**2))
    return abs(lhs - rhs) / max(rhs, 1e-300)


def zero_field(grid: Grid) -> SpectralField:
    return SpectralField(grid, np.zeros(grid.shape, dtype=np.complex128))


def spectral_from_mode(grid: Grid, xi: tuple[int, int, int], amplitude: float = 1.0,
                       phase: float = 0.0) -> SpectralField:
    """Real single-mode field amplitude * cos(2 pi xi . x + phase) as a
    conjugate coefficient pair."""
    n = grid.n
    for comp in xi:
        if not -n // 2 <= comp < n // 2:
            raise ValueError(f"mode {xi} not representable on n={n}")
    if all(c == 0 for c in xi):
        raise ValueError("zero mode is not a valid oscillating mode")
    c = np.zeros(grid.shape, dtype=np.complex128)
    idx = tuple(comp % n for comp in xi)
    neg = tuple((-comp) % n for comp in xi)
    half = 0.5 * amplitude * np.exp(1j * phase)
    c[idx] += half
    c[neg] += np.conj(half)
    return SpectralField(grid, c)


def coefficient(F: SpectralField, xi: tuple[int, int, int]) -> complex:
    """Coefficient at integer wavevector xi (FFT-layout lookup)."""
    n = F.grid.n
    return complex(F.coeffs[tuple(comp % n for comp in xi)])
