import numpy as np
import pytest

from lpns.spectral import (
    Grid,
    PhysicalField,
    RealnessError,
    SpectralField,
    coefficient,
    forward_transform,
    grid_points,
    hermitian_defect,
    inverse_transform,
    parseval_mismatch,
    spectral_derivative,
    spectral_from_mode,
    wavevectors,
)


def dft_oracle(values):
    """Direct definition sum coeff(k) = V * sum_m f(m) exp(-2 pi i k.m / n),
    evaluated by explicit DFT matrices, one axis at a time."""
    n = values.shape[0]
    m = np.arange(n)
    w = np.exp(-2j * np.pi * np.outer(m, m) / n)
    return np.einsum("ai,bj,ck,ijk->abc", w, w, w, values) / n**3


def random_field(grid, seed):
    rng = np.random.default_rng(seed)
    return PhysicalField(grid, rng.standard_normal(grid.shape))


class TestGrid:
    def test_cell_volume(self):
        assert Grid(16).cell_volume == pytest.approx(16.0**-3, rel=0, abs=0)

    @pytest.mark.parametrize("bad", [7, 10, 2000, 4])
    def test_rejects_bad_sizes(self, bad):
        with pytest.raises(ValueError):
            Grid(bad)

    def test_accepts_scratch_sizes(self):
        Grid(48)
        Grid(96)

    def test_wavevector_range(self):
        k1, _, _ = wavevectors(16)
        flat = np.sort(k1.ravel())
        assert flat[0] == -8 and flat[-1] == 7
        assert len(set(flat.tolist())) == 16


class TestTransforms:
    def test_matches_direct_dft_n8(self):
        grid = Grid(8)
        f = random_field(grid, 1012)
        F = forward_transform(f)
        oracle = dft_oracle(f.values)
        assert np.max(np.abs(F.coeffs - oracle)) < 1e-12

    def test_constant_field_hits_zero_mode(self):
        grid = Grid(16)
        F = forward_transform(PhysicalField(grid, np.full(grid.shape, 2.5)))
        assert coefficient(F, (0, 0, 0)) == pytest.approx(2.5, abs=1e-14)
        rest = F.coeffs.copy()
        rest[0, 0, 0] = 0
        assert np.max(np.abs(rest)) < 1e-14

    def test_cosine_mode_splits_half_half(self):
        grid = Grid(16)
        x1, _, _ = grid_points(grid)
        f = PhysicalField(grid, np.broadcast_to(np.cos(2 * np.pi * x1), grid.shape).copy())
        F = forward_transform(f)
        assert coefficient(F, (1, 0, 0)) == pytest.approx(0.5, abs=1e-14)
        assert coefficient(F, (-1, 0, 0)) == pytest.approx(0.5, abs=1e-14)

    def test_roundtrip(self):
        grid = Grid(32)
        f = random_field(grid, 7)
        back = inverse_transform(forward_transform(f))
        assert np.max(np.abs(back.values - f.values)) < 1e-12 * np.max(np.abs(f.values))

    def test_parseval(self):
        grid = Grid(16)
        for seed in range(5):
            f = random_field(grid, seed)
            assert parseval_mismatch(f, forward_transform(f)) < 1e-12

    def test_hermitian_symmetry_of_real_input(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 3))
        assert hermitian_defect(F) < 1e-13

    def test_non_hermitian_input_rejected(self):
        grid = Grid(16)
        c = np.zeros(grid.shape, dtype=np.complex128)
        c[1, 0, 0] = 1.0  # no conjugate partner
        with pytest.raises(RealnessError):
            inverse_transform(SpectralField(grid, c))

    def test_require_real_false_returns_real_part(self):
        grid = Grid(16)
        c = np.zeros(grid.shape, dtype=np.complex128)
        c[1, 0, 0] = 1.0
        out = inverse_transform(SpectralField(grid, c), require_real=False)
        assert out.values.shape == grid.shape


class TestDerivative:
    def test_plane_wave_first_derivative(self):
        # d/dx1 cos(2 pi m x1) = -2 pi m sin(2 pi m x1)
        grid = Grid(32)
        m = 3
        F = spectral_from_mode(grid, (m, 0, 0))
        d = inverse_transform(spectral_derivative(F, (0,)))
        x1, _, _ = grid_points(grid)
        expected = -2 * np.pi * m * np.sin(2 * np.pi * m * x1)
        assert np.max(np.abs(d.values - expected)) < 1e-10

    def test_mixed_second_derivative(self):
        grid = Grid(32)
        x1, x2, _ = grid_points(grid)
        f = PhysicalField(grid, np.broadcast_to(
            np.sin(2 * np.pi * x1) * np.cos(2 * np.pi * 2 * x2), grid.shape).copy())
        F = forward_transform(f)
        d = inverse_transform(spectral_derivative(F, (0, 1)))
        expected = (2 * np.pi) * np.cos(2 * np.pi * x1) * (-2 * np.pi * 2) * np.sin(2 * np.pi * 2 * x2)
        assert np.max(np.abs(d.values - expected)) < 1e-9

    def test_empty_tuple_is_identity(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 1))
        d = spectral_derivative(F, ())
        assert np.array_equal(d.coeffs, F.coeffs)

    def test_odd_derivative_zeroes_nyquist_plane(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 2))
        d = spectral_derivative(F, (0,))
        assert np.max(np.abs(d.coeffs[8, :, :])) == 0.0
        # and the derivative of a real field stays real
        inverse_transform(d)

    def test_even_derivative_keeps_nyquist(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 2))
        d = spectral_derivative(F, (0, 0))
        assert np.max(np.abs(d.coeffs[8, :, :])) > 0.0
        inverse_transform(d)

    def test_bad_axis_rejected(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 1))
        with pytest.raises(ValueError):
            spectral_derivative(F, (3,))

    def test_laplacian_symbol(self):
        grid = Grid(16)
        F = forward_transform(random_field(grid, 9))
        lap = (spectral_derivative(F, (0, 0)).coeffs
               + spectral_derivative(F, (1, 1)).coeffs
               + spectral_derivative(F, (2, 2)).coeffs)
        from lpns.spectral import radius_squared
        expected = -(2 * np.pi) ** 2 * radius_squared(16) * F.coeffs
        assert np.max(np.abs(lap - expected)) < 1e-10
