"""Sample-field families: bit-exact reproducibility, declared spectral
support, and exact normalization, for every kind."""

import numpy as np
import pytest

from lpns.generators import (
    FieldGenerator,
    RANDOM_BAND_LIMITED,
    SINGLE_MODE,
    SMOOTH_DECAYING,
    WAVE_PACKET,
)
from lpns.spectral import Grid, SpectralField, hermitian_defect, radius, wavevectors

ALL_KINDS = (RANDOM_BAND_LIMITED, SINGLE_MODE, WAVE_PACKET, SMOOTH_DECAYING)


class TestDeterminism:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_same_parameters_same_bits(self, kind):
        a = FieldGenerator(kind, seed=11, n=16).sample(3)
        b = FieldGenerator(kind, seed=11, n=16).sample(3)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_sample_index_is_independent_of_history(self):
        gen = FieldGenerator(RANDOM_BAND_LIMITED, seed=1, n=16)
        direct = gen.sample(5)
        batch = gen.samples(6)
        assert np.array_equal(direct.coeffs, batch[5].coeffs)

    def test_seeds_differ(self):
        a = FieldGenerator(RANDOM_BAND_LIMITED, seed=1, n=16).sample(0)
        b = FieldGenerator(RANDOM_BAND_LIMITED, seed=2, n=16).sample(0)
        assert not np.array_equal(a.coeffs, b.coeffs)

    def test_kinds_draw_distinct_streams(self):
        a = FieldGenerator(RANDOM_BAND_LIMITED, seed=1, n=16).sample(0)
        b = FieldGenerator(SMOOTH_DECAYING, seed=1, n=16).sample(0)
        assert not np.array_equal(a.coeffs, b.coeffs)


class TestFieldInvariants:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_hermitian_mean_free_interior(self, kind):
        F = FieldGenerator(kind, seed=7, n=16).sample(0)
        assert hermitian_defect(F) < 1e-15
        assert F.coeffs[0, 0, 0] == 0.0
        n = 16
        k1, k2, k3 = wavevectors(n)
        on_nyquist = (np.abs(k1) == n // 2) | (np.abs(k2) == n // 2) \
            | (np.abs(k3) == n // 2)
        assert np.max(np.abs(F.coeffs[np.broadcast_to(on_nyquist, F.coeffs.shape)])) == 0.0

    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_l2_normalization(self, kind):
        F = FieldGenerator(kind, seed=7, n=16, amplitude=2.5).sample(1)
        l2 = float(np.sqrt(np.sum(np.abs(F.coeffs) ** 2)))
        assert l2 == pytest.approx(2.5, rel=1e-12)

    def test_default_radius_cap(self):
        F = FieldGenerator(RANDOM_BAND_LIMITED, seed=3, n=32).sample(0)
        r = radius(32)
        assert np.max(np.abs(F.coeffs[r > 8.0])) == 0.0

    def test_explicit_radius_cap(self):
        F = FieldGenerator(RANDOM_BAND_LIMITED, seed=3, n=32,
                           radius_cap=5.0).sample(0)
        r = radius(32)
        assert np.max(np.abs(F.coeffs[r > 5.0])) == 0.0
        assert np.max(np.abs(F.coeffs[r <= 5.0])) > 0.0


class TestBandedKinds:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_band_support(self, kind):
        j = 2
        F = FieldGenerator(kind, seed=5, n=32, band=j).sample(0)
        r = radius(32)
        outside = (r <= 2.0 ** (j - 1)) | (r >= 2.0 ** (j + 1))
        assert np.max(np.abs(F.coeffs[outside])) == 0.0
        assert np.max(np.abs(F.coeffs)) > 0.0

    def test_single_mode_is_a_conjugate_pair(self):
        F = FieldGenerator(SINGLE_MODE, seed=9, n=32, band=3).sample(0)
        live = np.argwhere(np.abs(F.coeffs) > 0)
        assert len(live) == 2
        i1, i2 = (tuple(ix) for ix in live)
        assert tuple((-v) % 32 for v in i1) == i2
        assert F.coeffs[i1] == np.conj(F.coeffs[i2])

    def test_for_band_leaves_original_alone(self):
        gen = FieldGenerator(WAVE_PACKET, seed=1, n=32)
        banded = gen.for_band(4)
        assert banded.band == 4
        assert gen.band is None
        assert banded.seed == gen.seed

    def test_wave_packet_differs_from_single_mode(self):
        # the envelope spreads energy across the annulus; a lone mode
        # cannot probe norm-comparison slopes, which is the packet's job
        packet = FieldGenerator(WAVE_PACKET, seed=2, n=32, band=3).sample(0)
        assert np.sum(np.abs(packet.coeffs) > 1e-12) > 10


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="kind"):
            FieldGenerator("perlin-noise", seed=0, n=16)

    def test_unresolvable_band(self):
        gen = FieldGenerator(RANDOM_BAND_LIMITED, seed=0, n=16, band=5)
        with pytest.raises(ValueError, match="empty spectral support"):
            gen.sample(0)

    def test_grid_validation_happens_at_construction(self):
        with pytest.raises(ValueError):
            FieldGenerator(RANDOM_BAND_LIMITED, seed=0, n=17)
