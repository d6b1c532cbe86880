"""Speckle mask statistics: correlation, envelope, circularity."""

import numpy as np
import pytest

from ndcgi.core_optics import ComplexField, GridSpec
from ndcgi.errors import (
    InsufficientSamplesError,
    InvalidParamsError,
    ShapeMismatchError,
)
from ndcgi.rng import RealizationKey
from ndcgi.speckle import SpeckleParams, estimate_correlation, generate_slm_field

# ensemble small enough to hold in memory, large enough for 5% statistics
N = 64
PITCH = 50e-6
OMEGA = 0.5e-3            # 10 px
L_C = 200e-6              # 4 px
M = 10_000
SEED = 123


@pytest.fixture(scope="module")
def params():
    return SpeckleParams(OMEGA, L_C, GridSpec(N, PITCH))


@pytest.fixture(scope="module")
def ensemble(params):
    return [generate_slm_field(params, RealizationKey(SEED, i))
            for i in range(M)]


def envelope_at(u):
    return np.exp(-u ** 2 / (4.0 * OMEGA ** 2))


class TestParamsValidation:
    def test_rejects_unresolvable_correlation(self):
        with pytest.raises(InvalidParamsError):
            SpeckleParams(OMEGA, 1.5 * PITCH, GridSpec(N, PITCH))

    def test_rejects_clipped_envelope(self):
        with pytest.raises(InvalidParamsError):
            SpeckleParams(0.7e-3, L_C, GridSpec(N, PITCH))

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParamsError):
            SpeckleParams(-1e-3, L_C, GridSpec(N, PITCH))
        with pytest.raises(InvalidParamsError):
            SpeckleParams(OMEGA, 0.0, GridSpec(N, PITCH))


class TestKeyContract:
    def test_same_key_bitwise_identical(self, params):
        a = generate_slm_field(params, RealizationKey(SEED, 17))
        b = generate_slm_field(params, RealizationKey(SEED, 17))
        assert np.array_equal(a.samples, b.samples)

    def test_distinct_indices_differ(self, params):
        a = generate_slm_field(params, RealizationKey(SEED, 0))
        b = generate_slm_field(params, RealizationKey(SEED, 1))
        assert not np.array_equal(a.samples, b.samples)

    def test_key_validation(self):
        with pytest.raises(InvalidParamsError):
            RealizationKey(-1, 0)
        with pytest.raises(InvalidParamsError):
            RealizationKey(2 ** 64, 0)
        with pytest.raises(InvalidParamsError):
            RealizationKey(0, -1)


class TestStatistics:
    def test_mean_central_intensity_is_unity(self, ensemble):
        vals = np.array([f.samples[N // 2, N // 2] for f in ensemble])
        assert np.mean(np.abs(vals) ** 2) == pytest.approx(1.0, rel=0.05)

    def test_correlation_matches_gaussian_model(self, ensemble):
        # on-axis symmetric pairs at 0, l_c/2, l_c, 2l_c separation
        for sep_px in (0, 2, 4, 8):
            half = sep_px // 2 * PITCH
            got = estimate_correlation(ensemble, -half, +half)
            sep = sep_px * PITCH
            expected = (envelope_at(-half) * envelope_at(half)
                        * np.exp(-sep ** 2 / (2.0 * L_C ** 2)))
            assert abs(got) == pytest.approx(expected, rel=0.05), sep_px

    def test_circular_mean_vanishes(self, ensemble):
        bound = 3.0 / np.sqrt(M)
        for offset in (0, 5, -10):
            vals = np.array([f.samples[N // 2 + offset, N // 2]
                             for f in ensemble])
            assert abs(vals.mean()) < bound

    def test_intensity_envelope(self, ensemble):
        stack = np.stack([np.abs(f.samples[:, N // 2]) ** 2 for f in ensemble])
        mean_line = stack.mean(axis=0)
        for offset_px in (0, 5, 10, 15, 20):    # up to |u| = 2 omega
            u = offset_px * PITCH
            expected = np.exp(-u ** 2 / (2.0 * OMEGA ** 2))
            assert mean_line[N // 2 + offset_px] == pytest.approx(
                expected, rel=0.05), offset_px

    def test_three_correlation_lengths_nearly_uncorrelated(self, ensemble):
        sep_px = 12                              # 3 * l_c
        half = sep_px // 2 * PITCH
        got = estimate_correlation(ensemble, -half, +half)
        assert abs(got) < 0.02 * envelope_at(-half) * envelope_at(half)


class TestEstimateCorrelation:
    def test_unit_amplitude_identity(self):
        fields = [ComplexField(np.ones((8, 8), dtype=complex), PITCH, 1.0, "u")
                  for _ in range(3)]
        assert estimate_correlation(fields, 0.0, 0.0) == 1.0

    def test_conjugate_interleaving_bounded(self):
        rng = np.random.default_rng(9)
        fields = []
        for _ in range(50):
            phase = np.exp(1j * rng.uniform(0, 2 * np.pi, (8, 8)))
            fields.append(ComplexField(phase, PITCH, 1.0, "p"))
            fields.append(ComplexField(np.conj(phase), PITCH, 1.0, "p"))
        assert abs(estimate_correlation(fields, 0.0, 0.0)) <= 1.0 + 1e-12

    def test_coordinate_pairs_accepted(self, ensemble):
        scalar = estimate_correlation(ensemble[:100], PITCH, 0.0)
        pair = estimate_correlation(ensemble[:100], (PITCH, 0.0), (0.0, 0.0))
        assert scalar == pair

    def test_requires_two_fields(self, ensemble):
        with pytest.raises(InsufficientSamplesError):
            estimate_correlation(ensemble[:1], 0.0, 0.0)

    def test_rejects_mixed_grids(self, ensemble):
        other = ComplexField(np.ones((8, 8), dtype=complex), PITCH, 1.0, "o")
        with pytest.raises(ShapeMismatchError):
            estimate_correlation([ensemble[0], other], 0.0, 0.0)

    def test_rejects_out_of_grid_coordinate(self, ensemble):
        with pytest.raises(InvalidParamsError):
            estimate_correlation(ensemble[:2], 1.0, 0.0)
