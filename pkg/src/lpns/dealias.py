"""Alias-free products of band-limited fields.

Two routes are provided:

* a sharp componentwise mask at |xi_i| <= (n-1)//3 (the two-thirds rule):
  pointwise products of masked fields alias only into modes the mask
  kills, so the retained block of a grid product equals the retained
  block of the true product;
* spectrum padding to a refined grid, where quadratic products of
  coarse-resolvable fields are computed with no wraparound at all.

Fields passed to the padding route must carry no energy on the
asymmetric Nyquist planes xi_i = -n/2; those modes have no conjugate
partner and cannot be refined unambiguously.  Truncation back to a
coarse grid zeroes the coarse Nyquist planes for the same reason.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.fft as _fft

from .spectral import Grid, SpectralField, wavevectors

TWO_THIRDS = "two-thirds"
THREE_HALVES = "three-halves"
DEALIAS_MODES = (TWO_THIRDS, THREE_HALVES)


def sharp_cutoff(n: int) -> int:
    """Largest kept index K with n - 2K > K, so quadratic alias images of
    kept modes always land outside the kept block."""
    return (n - 1) // 3


@lru_cache(maxsize=32)
def twothirds_mask(n: int) -> np.ndarray:
    k1, k2, k3 = wavevectors(n)
    K = sharp_cutoff(n)
    m = ((np.abs(k1) <= K) & (np.abs(k2) <= K) & (np.abs(k3) <= K)).astype(np.float64)
    m.flags.writeable = False
    return m


def apply_mask(F: SpectralField) -> SpectralField:
    return SpectralField(F.grid, F.coeffs * twothirds_mask(F.grid.n))


def _nyquist_energy(coeffs: np.ndarray) -> float:
    n = coeffs.shape[0]
    e = 0.0
    for axis in range(3):
        sl = [slice(None)] * 3
        sl[axis] = n // 2
        e += float(np.sum(np.abs(coeffs[tuple(sl)]) ** 2))
    return e


def pad_spectrum(F: SpectralField, n_fine: int) -> SpectralField:
    """Embed the spectrum on a finer grid; the field values are unchanged."""
    n = F.grid.n
    if n_fine < n:
        raise ValueError(f"pad target {n_fine} smaller than source {n}")
    if n_fine == n:
        return SpectralField(F.grid, F.coeffs.copy())
    total = float(np.sum(np.abs(F.coeffs) ** 2))
    if _nyquist_energy(F.coeffs) > 1e-26 * max(total, 1e-300):
        raise ValueError("field has energy on the Nyquist planes; "
                         "pad would break conjugate symmetry")
    shifted = np.fft.fftshift(F.coeffs)
    out = np.zeros((n_fine,) * 3, dtype=np.complex128)
    lo = (n_fine - n) // 2
    out[lo:lo + n, lo:lo + n, lo:lo + n] = shifted
    return SpectralField(Grid(n_fine), np.fft.ifftshift(out))


def truncate_spectrum(F: SpectralField, n_coarse: int) -> SpectralField:
    """Keep the centered block of modes resolvable on the coarse grid,
    zeroing the coarse Nyquist planes."""
    n = F.grid.n
    if n_coarse > n:
        raise ValueError(f"truncate target {n_coarse} larger than source {n}")
    if n_coarse == n:
        return SpectralField(F.grid, F.coeffs.copy())
    shifted = np.fft.fftshift(F.coeffs)
    lo = (n - n_coarse) // 2
    block = shifted[lo:lo + n_coarse, lo:lo + n_coarse, lo:lo + n_coarse].copy()
    for axis in range(3):
        sl = [slice(None)] * 3
        sl[axis] = 0   # fftshift layout puts -n/2 first
        block[tuple(sl)] = 0.0
    return SpectralField(Grid(n_coarse), np.fft.ifftshift(block))


def refined_product(Fa: SpectralField, Fb: SpectralField,
                    factor: float = 2.0) -> SpectralField:
    """Product of two fields on the same grid, computed with no wraparound
    on a finer grid (factor 2 or 3/2), returned truncated to the source
    grid."""
    if Fa.grid.n != Fb.grid.n:
        raise ValueError("refined_product requires matching grids")
    n = Fa.grid.n
    if factor == 2.0:
        n_fine = 2 * n
    elif factor == 1.5:
        n_fine = (3 * n) // 2
    else:
        raise ValueError(f"refinement factor must be 2 or 1.5, got {factor}")
    pa = pad_spectrum(Fa, n_fine)
    pb = pad_spectrum(Fb, n_fine)
    wa = _fft.ifftn(pa.coeffs) * n_fine**3
    wb = _fft.ifftn(pb.coeffs) * n_fine**3
    prod = _fft.fftn(wa.real * wb.real) / n_fine**3
    return truncate_spectrum(SpectralField(Grid(n_fine), prod), n)


def fine_product(Fa: SpectralField, Fb: SpectralField) -> SpectralField:
    """Exact product kept on the fine grid itself.

    Both inputs must live on a common grid with support inside half the
    Nyquist ball, so the true product is fully representable; nothing is
    truncated.  Used where coefficientwise identities are being tested.
    """
    if Fa.grid.n != Fb.grid.n:
        raise ValueError("fine_product requires matching grids")
    n = Fa.grid.n
    wa = _fft.ifftn(Fa.coeffs) * n**3
    wb = _fft.ifftn(Fb.coeffs) * n**3
    prod = _fft.fftn(wa.real * wb.real) / n**3
    return SpectralField(Fa.grid, prod)
