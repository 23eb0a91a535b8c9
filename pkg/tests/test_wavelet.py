"""Wavelet basis and transform tests: filters, orthonormality, Parseval."""

import itertools

import numpy as np
import pytest

from fracfield.grid import SampledField, bump, standard_corpus
from fracfield.wavelet import (CoeffField, DyadicIndex, WaveletBasis, analyze,
                               build_basis, daubechies_filter, dyadic_cube,
                               quadrature_mirror, sobolev_regularity,
                               synthesize)


class TestFilters:
    def test_haar(self):
        h = daubechies_filter(1)
        assert np.allclose(h, [1 / np.sqrt(2)] * 2, atol=1e-15)

    def test_invalid_orders(self):
        for bad in (0, 11, -3):
            with pytest.raises(ValueError):
                daubechies_filter(bad)
        with pytest.raises(ValueError):
            build_basis("daubechies", 0, 1)

    @pytest.mark.parametrize("order", range(1, 11))
    def test_orthonormality_identities(self, order):
        h = daubechies_filter(order)
        assert len(h) == 2 * order
        assert abs(h.sum() - np.sqrt(2.0)) < 1e-12
        assert abs(np.dot(h, h) - 1.0) < 1e-12
        for m in range(1, order):
            assert abs(np.dot(h[: -2 * m], h[2 * m:])) < 1e-12

    @pytest.mark.parametrize("order", range(1, 11))
    def test_highpass_moments_vanish(self, order):
        # the mirror filter annihilates discrete polynomials below the order
        g = quadrature_mirror(daubechies_filter(order))
        k = np.arange(len(g), dtype=float)
        for m in range(order):
            moment = np.dot(k ** m, g)
            scale = np.dot(k ** m, np.abs(g)) + 1.0
            assert abs(moment) / scale < 1e-6

    def test_regularity_positive_and_monotone(self):
        vals = [sobolev_regularity(order) for order in range(1, 11)]
        assert all(v > 0 for v in vals)
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_regularity_known_low_orders(self):
        # hand-derivable transfer matrices: [2] and [[4,3],[0,-1]]
        assert sobolev_regularity(1) == pytest.approx(0.5, abs=1e-12)
        assert sobolev_regularity(2) == pytest.approx(1.0, abs=1e-10)


class TestDyadicCube:
    def test_unit_cube(self):
        lo, hi = dyadic_cube(DyadicIndex(0, (0,), (1,)))
        assert lo == pytest.approx(0.0) and hi == pytest.approx(1.0)

    def test_half_cube(self):
        lo, hi = dyadic_cube(DyadicIndex(1, (1,), (1,)))
        assert lo[0] == pytest.approx(0.5) and hi[0] == pytest.approx(1.0)

    def test_negative_scale(self):
        lo, hi = dyadic_cube(DyadicIndex(-1, (1,), (1,)))
        assert lo[0] == pytest.approx(2.0) and hi[0] == pytest.approx(4.0)

    def test_orientation_validated(self):
        with pytest.raises(ValueError):
            DyadicIndex(0, (0,), (2,))
        with pytest.raises(ValueError):
            DyadicIndex(0, (0, 0), (1,))


def _direct_haar_level(x):
    """Brute-force one periodized Haar level (oracle for the fast path)."""
    n = len(x)
    s = 1 / np.sqrt(2)
    low = np.array([s * (x[2 * i] + x[(2 * i + 1) % n]) for i in range(n // 2)])
    high = np.array([s * (x[2 * i] - x[(2 * i + 1) % n]) for i in range(n // 2)])
    return low, high


class TestAnalyze:
    def test_impulse_haar_against_direct_convolution(self):
        n = 8
        values = np.zeros(n)
        values[3] = 1.0
        field = SampledField(values)
        basis = build_basis("daubechies", 1, 1)
        coeffs = analyze(field, basis, (2, 2))  # single level
        low, high = _direct_haar_level(values * field.cell_volume() ** 0.5)
        assert np.allclose(coeffs.detail[(2, (1,))], high, atol=1e-14)
        assert np.allclose(coeffs.scaling, low, atol=1e-14)
        # impulse spawns one +/- pair of magnitude h^(1/2)/sqrt(2)
        mags = np.sort(np.abs(high))
        assert mags[-1] == pytest.approx((1 / n) ** 0.5 / np.sqrt(2), rel=1e-12)

    def test_constant_annihilated(self):
        basis = build_basis("daubechies", 4, 1)
        coeffs = analyze(SampledField(np.full(64, 3.7)), basis)
        for arr in coeffs.detail.values():
            assert np.abs(arr).max() < 1e-12

    def test_rejects_bad_grids(self):
        basis = build_basis("daubechies", 2, 1)
        with pytest.raises(ValueError):
            analyze(SampledField(np.zeros(48)), basis)
        with pytest.raises(ValueError):
            analyze(SampledField(np.zeros(16)), basis, (0, 6))

    def test_parseval_on_corpus(self):
        rng = np.random.default_rng(3)
        basis1 = build_basis("daubechies", 5, 1)
        basis2 = build_basis("daubechies", 3, 2)
        fields = [SampledField(rng.standard_normal(128)) for _ in range(10)]
        fields += [fn.sample(128) for fn in standard_corpus(1)[:8]]
        fields += [SampledField(rng.standard_normal((32, 32))) for _ in range(4)]
        for f in fields:
            basis = basis1 if f.d == 1 else basis2
            ratio = analyze(f, basis).energy() / (
                (f.values ** 2).sum() * f.cell_volume())
            assert abs(ratio - 1.0) < 1e-8


class TestSynthesize:
    @pytest.mark.parametrize("d,n,order", [(1, 128, 4), (2, 32, 3), (3, 8, 2)])
    def test_round_trip(self, d, n, order):
        rng = np.random.default_rng(17)
        basis = build_basis("daubechies", order, d)
        field = SampledField(rng.standard_normal((n,) * d))
        back = synthesize(analyze(field, basis), basis, n)
        assert np.abs(back.values - field.values).max() < 1e-8

    def test_zero_coeffs_give_zero_field(self):
        basis = build_basis("daubechies", 4, 1)
        field = synthesize(CoeffField.zeros(1, 0, 4), basis)
        assert np.all(field.values == 0.0)

    def test_single_atom_unit_norm(self):
        basis = build_basis("daubechies", 4, 1)
        coeffs = CoeffField.zeros(1, 0, 5)
        coeffs[DyadicIndex(3, (2,), (1,))] = 1.0
        atom = synthesize(coeffs, basis, 256)
        assert atom.norm_l2() == pytest.approx(1.0, abs=1e-10)

    def test_scale_range_must_fit(self):
        basis = build_basis("daubechies", 2, 1)
        with pytest.raises(ValueError):
            synthesize(CoeffField.zeros(1, 0, 6), basis, 32)

    def test_atom_orthonormality_spot_check(self):
        basis = build_basis("daubechies", 4, 1)
        n = 256
        rng = np.random.default_rng(9)
        indices = []
        for _ in range(60):
            j = int(rng.integers(1, 6))
            k = int(rng.integers(0, 2 ** j))
            indices.append(DyadicIndex(j, (k,), (1,)))
        indices = list(dict.fromkeys(indices))
        atoms = []
        for idx in indices:
            coeffs = CoeffField.zeros(1, 0, 6)
            coeffs[idx] = 1.0
            atoms.append(synthesize(coeffs, basis, n).values)
        weight = 1.0 / n
        for i in range(len(atoms)):
            for j in range(i, len(atoms)):
                ip = np.dot(atoms[i], atoms[j]) * weight
                target = 1.0 if i == j else 0.0
                assert abs(ip - target) < 1e-8

    def test_atom_orthonormality_2d(self):
        basis = build_basis("daubechies", 3, 2)
        picks = [DyadicIndex(1, (0, 1), (1, 0)), DyadicIndex(1, (0, 1), (1, 1)),
                 DyadicIndex(2, (2, 3), (0, 1)), DyadicIndex(2, (2, 3), (1, 1))]
        atoms = []
        for idx in picks:
            coeffs = CoeffField.zeros(2, 0, 3)
            coeffs[idx] = 1.0
            atoms.append(synthesize(coeffs, basis, 16).values)
        w = (1.0 / 16) ** 2
        for i in range(len(atoms)):
            for j in range(i, len(atoms)):
                ip = (atoms[i] * atoms[j]).sum() * w
                assert abs(ip - (1.0 if i == j else 0.0)) < 1e-8


class TestCoeffField:
    def test_get_set_items(self):
        cf = CoeffField.zeros(1, 1, 3)
        idx = DyadicIndex(2, (1,), (1,))
        cf[idx] = 2.5
        assert cf[idx] == 2.5
        found = dict(cf.items())
        assert found[idx] == 2.5
        assert cf.lp_mass(2.0) == pytest.approx(6.25)

    def test_scaling_slot_guard(self):
        cf = CoeffField.zeros(1, 1, 3)
        with pytest.raises(KeyError):
            cf[DyadicIndex(2, (0,), (0,))]
        cf[DyadicIndex(1, (0,), (0,))] = 1.0
        assert cf.scaling[0] == 1.0

    def test_flat_values_order_deterministic(self):
        cf = CoeffField.zeros(2, 0, 1)
        cf.scaling[0, 0] = 1.0
        cf.detail[(0, (0, 1))][0, 0] = 2.0
        cf.detail[(0, (1, 0))][0, 0] = 3.0
        cf.detail[(0, (1, 1))][0, 0] = 4.0
        cf.detail[(1, (0, 1))][0, 1] = 5.0
        flat = cf.flat_values()
        assert flat[0] == 1.0
        assert list(flat[1:4]) == [2.0, 3.0, 4.0]
        assert 5.0 in flat

    def test_basis_dimension_checked(self):
        basis = build_basis("daubechies", 2, 2)
        with pytest.raises(ValueError):
            analyze(SampledField(np.zeros(16)), basis)
