"""fracfield: symmetric p-stable random wavelet fields and their diagnostics."""

from fracfield._kernels import BACKEND
from fracfield.grid import SampledField, TestFunction, bump, modulated_bump
from fracfield.stable import StableLaw, char_fn, sample_sps, sps_cdf
from fracfield.synthesis import (TruncationSpec, field_y, increment_scale,
                                 pair_sample, pair_scale, tail_diagnostic)
from fracfield.wavelet import (CoeffField, DyadicIndex, WaveletBasis, analyze,
                               build_basis, dyadic_cube, synthesize)

__all__ = [
    "BACKEND",
    "SampledField", "TestFunction", "bump", "modulated_bump",
    "StableLaw", "char_fn", "sample_sps", "sps_cdf",
    "TruncationSpec", "field_y", "increment_scale", "pair_sample",
    "pair_scale", "tail_diagnostic",
    "CoeffField", "DyadicIndex", "WaveletBasis", "analyze", "build_basis",
    "dyadic_cube", "synthesize",
]
__version__ = "1.0.0"
