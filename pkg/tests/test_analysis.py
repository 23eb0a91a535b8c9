"""Analysis/verification tests: sandwiches, bounds, slopes, dimensions."""

import numpy as np
import pytest
from scipy import integrate

from fracfield import fracop
from fracfield.analysis import (BoundReport, box_dimension, ecdf_ks,
                                empirical_frame_constant, excess_kurtosis,
                                frostman_energy, periodogram_slope,
                                square_function_norm, ss_bounds, t1_bounds,
                                weighted_sampling_bound)
from fracfield.errors import ParameterWindowError
from fracfield.grid import SampledField, bump, modulated_bump, standard_corpus
from fracfield.stable import StableLaw, sample_sps
from fracfield.synthesis import TruncationSpec, field_y
from fracfield.wavelet import CoeffField, DyadicIndex, build_basis, synthesize

BASIS1 = build_basis("daubechies", 6, 1)


class TestT1Bounds:
    def test_gaussian_case_is_energy_identity(self):
        rep = t1_bounds(bump(1, radius=0.08), 2.0, 0.0, BASIS1, n=256)
        assert rep.value == pytest.approx(rep.lower, rel=1e-10)
        assert rep.passed

    def test_generic_case(self):
        rep = t1_bounds(bump(1, radius=0.08), 1.6, 0.4, BASIS1, n=256)
        assert rep.lower <= rep.value * (1 + 1e-10)
        assert rep.params["c_emp"] > 0
        assert rep.passed

    def test_lower_holds_across_corpus(self):
        for fn in standard_corpus(1):
            rep = t1_bounds(fn, 1.6, 0.4, BASIS1, n=256)
            assert rep.lower <= rep.value * (1 + 1e-10)

    def test_constant_stable_under_refinement(self):
        c1 = empirical_frame_constant(1.6, 0.4, BASIS1, n=256)
        c2 = empirical_frame_constant(1.6, 0.4, BASIS1, n=512)
        assert abs(c2 / c1 - 1.0) < 0.1

    def test_window_enforced(self):
        with pytest.raises(ParameterWindowError):
            t1_bounds(bump(1), 1.2, 0.05, BASIS1, n=128)  # s below d(1/p-1/2)
        with pytest.raises(ParameterWindowError):
            t1_bounds(bump(1), 2.0, -0.5, BASIS1, n=128)


class TestSquareFunction:
    def test_matches_l2_at_s0_p2(self):
        f = bump(1, radius=0.07).sample(256)
        assert square_function_norm(f, 2.0, 0.0, BASIS1) == pytest.approx(
            f.norm_l2(), rel=1e-8)

    def test_single_atom_closed_form(self):
        j0, p = 3, 1.7
        coeffs = CoeffField.zeros(1, 0, 4)
        coeffs[DyadicIndex(j0, (2,), (1,))] = 1.0
        atom = synthesize(coeffs, BASIS1, 128)
        val = square_function_norm(atom, p, 0.0, BASIS1)
        expected = 2.0 ** (j0 / 2.0) * (2.0 ** -j0) ** (1.0 / p)
        assert val == pytest.approx(expected, rel=1e-8)

    def test_smoothness_weight_dominates(self):
        f = bump(1, radius=0.07).sample(256)
        assert (square_function_norm(f, 1.6, 0.5, BASIS1)
                > square_function_norm(f, 1.6, 0.0, BASIS1))

    def test_comparable_with_sobolev_norm(self):
        ratios = []
        for fn in standard_corpus(1):
            f = fn.sample(256)
            ratios.append(square_function_norm(f, 1.6, 0.4, BASIS1)
                          / fracop.sobolev_norm(f, 1.6, 0.4))
        assert max(ratios) / min(ratios) < 50.0

    def test_window(self):
        with pytest.raises(ParameterWindowError):
            square_function_norm(bump(1).sample(64), 1.6, 5.0, BASIS1)


def _interpolator_constant_1d():
    """Peetre-style comparison constant from a concrete smooth interpolator.

    Builds psi = indicator([-1/2,1/2]) mollified to be 1 on [-1/4,1/4] and 0
    outside (-3/4,3/4); the constant is
    2^d * sup_l sum_k |psi_hat(l-k)| * integral (1+l^2)^d |psi_hat(l)| dl.
    """
    big_l, n = 32.0, 2 ** 15
    x = -big_l / 2 + big_l * np.arange(n) / n
    mol = np.zeros(n)
    inside = np.abs(x) < 0.25
    mol[inside] = np.exp(1 - 1 / (1 - (x[inside] / 0.25) ** 2))
    mol /= mol.sum() * (big_l / n)
    ind = (np.abs(x) <= 0.5).astype(float)
    psi = np.fft.ifft(np.fft.fft(ind) * np.fft.fft(mol)).real * (big_l / n)
    psi = np.roll(psi, n // 2)  # undo the circular shift of the convolution
    phase = np.exp(2j * np.pi * np.fft.fftfreq(n, big_l / n) * (big_l / 2))
    psi_hat = np.abs(np.fft.fft(psi) * (big_l / n) * phase)
    lam = np.fft.fftfreq(n, big_l / n)
    order = np.argsort(lam)
    lam, psi_hat = lam[order], psi_hat[order]
    integral = ((1 + lam ** 2) * psi_hat).sum() / big_l
    # sup over one period of the integer-translate sum
    cover = 0.0
    for frac in np.linspace(0, 1, 33):
        mask_vals = 0.0
        for k in range(-40, 41):
            idx = np.searchsorted(lam, frac - k)
            if 0 <= idx < n:
                mask_vals += psi_hat[idx]
        cover = max(cover, mask_vals)
    return 2.0 * cover * integral


class TestWeightedSamplingBound:
    def test_zero_field(self):
        rep = weighted_sampling_bound(SampledField(np.zeros(128)), 1.5)
        assert rep.value == 0.0 and rep.passed

    def test_bump_ratio_recorded(self):
        phi = bump(1, center=(0.0,), radius=0.15)
        rep = weighted_sampling_bound(phi.sample(256), 1.5)
        assert 0 < rep.params["ratio"] < 10
        assert rep.passed

    def test_support_enforced(self):
        phi = bump(1, center=(0.5,), radius=0.2)  # far from the origin cube
        with pytest.raises(ValueError, match="quarter cube"):
            weighted_sampling_bound(phi.sample(256), 1.5)

    def test_gaussian_case_against_interpolation_constant(self):
        c_proof = _interpolator_constant_1d()
        phi = bump(1, center=(0.0,), radius=0.2)
        rep = weighted_sampling_bound(phi.sample(512), 2.0, c_pd=c_proof)
        assert rep.passed
        assert rep.params["ratio"] <= c_proof


class TestSsBounds:
    def test_static_case_reduces_to_sandwich(self):
        phi = modulated_bump(1, radius=0.125, freq=16.0)
        rep = ss_bounds(phi, 0.3, 1.5, 0.45, 1.0, BASIS1)
        assert rep.passed
        assert rep.lower <= rep.value <= rep.upper

    def test_gaussian_brackets_constant_scale(self):
        phi = modulated_bump(1, radius=0.125, freq=16.0)
        vals = []
        for a in (0.5, 1.0, 2.0):
            rep = ss_bounds(phi, 0.25, 2.0, 0.5, a, BASIS1)
            assert rep.passed
            vals.append(rep.value)
        assert max(vals) / min(vals) < 1.01

    def test_ordering_over_dilations(self):
        phi = modulated_bump(1, radius=0.125, freq=16.0)
        for a in (0.5, 1.0, 2.0, 4.0):
            assert ss_bounds(phi, 0.3, 1.5, 0.45, a, BASIS1).passed

    def test_windows(self):
        phi = bump(1)
        with pytest.raises(ParameterWindowError, match="s > gamma"):
            ss_bounds(phi, 0.3, 1.5, 0.2, 1.0, BASIS1)
        with pytest.raises(ParameterWindowError):
            ss_bounds(phi, 0.9, 1.5, 1.0, 1.0, BASIS1)


class TestEcdfKs:
    def test_null_distribution(self):
        law = StableLaw(1.5, 1.0)
        draws = sample_sps(law, 10_000, seed=77)
        assert ecdf_ks(draws, law) < 1.36 / np.sqrt(10_000) * 1.3

    def test_degenerate_samples(self):
        ks = ecdf_ks(np.zeros(500), StableLaw(1.5, 1.0))
        assert ks == pytest.approx(0.5, abs=0.01)

    def test_power_against_wrong_scale(self):
        draws = sample_sps(StableLaw(1.5, 2.0), 10_000, seed=78)
        assert ecdf_ks(draws, StableLaw(1.5, 1.0)) > 0.05

    def test_small_sample_rejected(self):
        with pytest.raises(ValueError):
            ecdf_ks(np.ones(50), StableLaw(1.5))


class TestPeriodogramSlope:
    def test_white_noise_flat(self):
        rng = np.random.default_rng(31)
        slopes = [periodogram_slope(SampledField(rng.standard_normal(2 ** 14)),
                                    (8.0, 2 ** 11)) for _ in range(4)]
        assert abs(np.mean(slopes)) < 0.1

    def test_fractional_field_slope(self):
        from fracfield.synthesis import _draw_coefficients, default_truncation
        from fracfield.wavelet import synthesize as wsynth
        n, gamma = 2 ** 15, 0.75
        coeffs = _draw_coefficients(StableLaw(2.0), 1, default_truncation(n), 3)
        x = fracop.riesz_apply(wsynth(coeffs, BASIS1, n), gamma)
        slope = periodogram_slope(x, (16.0, n / 8.0))
        assert slope == pytest.approx(-2 * gamma, rel=0.1)

    def test_2d_radial_ordering(self):
        basis2 = build_basis("daubechies", 6, 2)
        slopes = {}
        for gamma in (1.1, 1.6):
            y = field_y(gamma, StableLaw(2.0), 2, 128, basis2, seed=2)
            slopes[gamma] = periodogram_slope(y, (2.0, 16.0))
        assert slopes[1.6] < slopes[1.1] < 0.0

    def test_band_validation(self):
        f = SampledField(np.ones(64))
        with pytest.raises(ValueError):
            periodogram_slope(f, (10.0, 5.0))
        with pytest.raises(ValueError):
            periodogram_slope(f, (30.9, 31.0))  # no bins in band


class TestFrostmanEnergy:
    def test_flat_graph_closed_form(self):
        # double integral of |x-x'|^(-1/2) over the unit square equals 8/3;
        # the excluded sub-spacing band costs about 4*sqrt(h)
        f = SampledField(np.zeros(2 ** 13))
        assert frostman_energy(f, 0.5) == pytest.approx(8.0 / 3.0, rel=0.02)

    def test_monotone_in_rho(self):
        y = field_y(0.75, StableLaw(2.0), 1, 1024, BASIS1, seed=6)
        vals = [frostman_energy(y, rho) for rho in (0.5, 1.0, 1.5)]
        assert vals[0] < vals[1] < vals[2]

    def test_2d_matches_bruteforce(self):
        rng = np.random.default_rng(8)
        f = SampledField(rng.standard_normal((8, 8)))
        coords = np.stack(np.meshgrid(*([f.axis_coords()] * 2),
                                      indexing="ij"), -1).reshape(-1, 2)
        vals = f.values.ravel()
        total = 0.0
        for i in range(64):
            for j in range(64):
                if i == j:
                    continue
                r2 = ((coords[i] - coords[j]) ** 2).sum() + (vals[i] - vals[j]) ** 2
                total += r2 ** (-0.6)
        brute = total * f.cell_volume() ** 2
        assert frostman_energy(f, 1.2) == pytest.approx(brute, rel=1e-10)

    def test_rho_validation(self):
        with pytest.raises(ValueError):
            frostman_energy(SampledField(np.zeros(16)), -1.0)


class TestBoxDimension:
    def test_straight_line(self):
        n = 2 ** 12
        f = SampledField(np.arange(n) / n)
        est = box_dimension(f)
        assert est.estimate == pytest.approx(1.0, abs=0.05)

    def test_estimate_within_graph_range(self):
        y = field_y(0.75, StableLaw(2.0), 1, 2 ** 12, BASIS1, seed=1)
        est = box_dimension(y)
        assert 1.0 <= est.estimate <= 2.0
        assert est.stderr < 0.2

    def test_resolution_guard(self):
        with pytest.raises(ValueError, match="insufficient resolution"):
            box_dimension(SampledField(np.zeros(2 ** 10)))
        with pytest.raises(ValueError):
            box_dimension(SampledField(np.zeros((64, 64))))


class TestExcessKurtosis:
    def test_gaussian_near_zero(self):
        draws = sample_sps(StableLaw(2.0), 200_000, seed=90)
        assert abs(excess_kurtosis(draws)) < 0.1

    def test_heavy_tail_large(self):
        draws = sample_sps(StableLaw(1.5), 50_000, seed=91)
        assert excess_kurtosis(draws) > 10.0

    def test_constant_zero(self):
        assert excess_kurtosis(np.ones(100)) == 0.0


class TestBoundReport:
    def test_pass_semantics(self):
        assert BoundReport(1.0, 1.5, 2.0).passed
        assert not BoundReport(1.0, 0.5, 2.0).passed
        assert not BoundReport(1.0, 2.5, 2.0).passed
        assert BoundReport(1.0, 1.0, 1.0).passed
