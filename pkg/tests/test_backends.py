"""Backend parity: the compiled kernels must match the numpy fallback."""

import numpy as np
import pytest

from fracfield import _slowkern
from fracfield.wavelet import daubechies_filter, quadrature_mirror

fastkern = pytest.importorskip(
    "fracfield._fastkern", reason="compiled extension not built")


@pytest.mark.parametrize("order,n,rows", [(1, 64, 1), (4, 128, 8), (10, 32, 3)])
def test_analyze_bit_identical(order, n, rows):
    rng = np.random.default_rng(order)
    mat = rng.standard_normal((rows, n))
    h = daubechies_filter(order)
    g = quadrature_mirror(h)
    ls, hs = _slowkern.dwt_analyze_level(mat, h, g)
    lf, hf = fastkern.dwt_analyze_level(mat, h, g)
    assert np.array_equal(ls, np.asarray(lf))
    assert np.array_equal(hs, np.asarray(hf))


@pytest.mark.parametrize("order,n", [(2, 64), (6, 256)])
def test_synthesize_bit_identical(order, n):
    rng = np.random.default_rng(order + 10)
    low = rng.standard_normal((4, n // 2))
    high = rng.standard_normal((4, n // 2))
    h = daubechies_filter(order)
    g = quadrature_mirror(h)
    xs = _slowkern.dwt_synthesize_level(low, high, h, g)
    xf = fastkern.dwt_synthesize_level(low, high, h, g)
    assert np.array_equal(xs, np.asarray(xf))


def test_graph_energy_matches_to_rounding():
    rng = np.random.default_rng(5)
    v = rng.standard_normal(700)
    es = _slowkern.graph_energy_1d(v, 1.0 / 700, 1.3)
    ef = fastkern.graph_energy_1d(v, 1.0 / 700, 1.3)
    assert ef == pytest.approx(es, rel=1e-12)


def test_graph_energy_against_naive_loop():
    rng = np.random.default_rng(6)
    v = rng.standard_normal(50)
    h, rho = 0.02, 0.8
    total = 0.0
    for i in range(50):
        for j in range(50):
            if i != j:
                r2 = (h * (i - j)) ** 2 + (v[i] - v[j]) ** 2
                total += r2 ** (-rho / 2)
    naive = total * h * h
    assert _slowkern.graph_energy_1d(v, h, rho) == pytest.approx(naive, rel=1e-12)
    assert fastkern.graph_energy_1d(v, h, rho) == pytest.approx(naive, rel=1e-12)
