"""Orthonormal tensor-product wavelet bases on the torus.

Daubechies low-pass filters are derived by spectral factorization of the
binomial half-band polynomial (Newton-polished roots), so the orthonormality
identities hold to near machine precision without embedded coefficient
tables.  Transforms are periodized, which keeps discrete orthonormality
exact at every level on power-of-two grids.

Scale convention: on a grid of side n = 2^J over [0, L)^d, detail
coefficients live at scales j = j_min .. J-1, with 2^j translates per axis,
plus scaling coefficients at j_min.  Atoms are L^2-normalized: the stored
coefficient equals the discrete inner product with cell-volume weights, so
analyze/synthesize satisfy the energy identity exactly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from fracfield import _kernels as kernels
from fracfield.grid import SampledField, require_power_of_two

SUPPORTED_ORDERS = range(1, 11)


def _binomial_half_band(order: int) -> np.ndarray:
    """Coefficients (ascending) of P(y) = sum_k C(order-1+k, k) y^k."""
    k = np.arange(order)
    return special.comb(order - 1 + k, k)


def daubechies_filter(order: int) -> np.ndarray:
    """Low-pass filter of the Daubechies family with ``order`` vanishing moments.

    Spectral factorization: roots of the half-band polynomial are mapped to
    reciprocal z-pairs and the minimum-modulus root of each pair is kept.
    Normalized so that sum(h) = sqrt(2).
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(f"unsupported Daubechies order {order}; "
                         f"supported: {SUPPORTED_ORDERS.start}..{SUPPORTED_ORDERS.stop - 1}")
    if order == 1:
        return np.array([1.0, 1.0]) / np.sqrt(2.0)
    pc = _binomial_half_band(order)
    yroots = np.roots(pc[::-1]).astype(complex)
    dpc = pc[1:] * np.arange(1, order)
    for _ in range(4):  # Newton polish on the exact binomial polynomial
        pv = np.polyval(pc[::-1], yroots)
        dv = np.polyval(dpc[::-1], yroots)
        yroots = yroots - pv / dv
    poly = np.array([1.0 + 0.0j])
    for _ in range(order):
        poly = np.convolve(poly, [0.5, 0.5])
    for y in yroots:
        b = 4.0 * y - 2.0
        disc = np.sqrt(b * b - 4.0 + 0.0j)
        z1, z2 = (-b + disc) / 2.0, (-b - disc) / 2.0
        z0 = z1 if abs(z1) <= abs(z2) else z2
        poly = np.convolve(poly, [-z0, 1.0])
    h = np.real(poly)
    h *= np.sqrt(2.0) / h.sum()
    if abs(h[0]) < abs(h[-1]):  # extremal-phase ordering, largest taps first
        h = h[::-1].copy()
    return h


def quadrature_mirror(h: np.ndarray) -> np.ndarray:
    """High-pass companion g[k] = (-1)^k h[M-1-k]."""
    signs = (-1.0) ** np.arange(len(h))
    return signs * h[::-1]


@lru_cache(maxsize=None)
def sobolev_regularity(order: int) -> float:
    """L2-Sobolev smoothness exponent of the scaling function.

    Computed from the spectral radius of the transfer operator of the
    half-band polynomial restricted to its invariant polynomial subspace
    (the classical transfer-operator smoothness estimate):
    r = order - log4(rho).  Exact values at the low end: 0.5 for order 1,
    1.0 for order 2.
    """
    pc = _binomial_half_band(order)

    def pval(u):
        return np.polyval(pc[::-1], u)

    m = order
    ws = (np.arange(1, m + 1)) / (m + 1.0)  # sample points in (0, 1)
    us = (1.0 - np.sqrt(1.0 - ws)) / 2.0
    powers = np.arange(m)
    vand = ws[:, None] ** powers[None, :]
    gmat = np.empty((m, m))
    for jcol in range(m):
        gmat[:, jcol] = pval(us) * us ** jcol + pval(1.0 - us) * (1.0 - us) ** jcol
    tmat = np.linalg.solve(vand, gmat)
    rho = float(np.abs(np.linalg.eigvals(tmat)).max())
    return float(order - np.log(rho) / np.log(4.0))


@dataclass(frozen=True)
class WaveletBasis:
    """Immutable filter pair plus metadata for a d-dimensional basis."""

    family: str
    order: int
    d: int
    h: np.ndarray
    g: np.ndarray
    regularity: float

    def orientations(self) -> list[tuple[int, ...]]:
        """Wavelet orientations: {0,1}^d minus the all-zero (scaling) one."""
        return [e for e in itertools.product((0, 1), repeat=self.d)
                if any(e)]


def build_basis(family: str, order: int, d: int) -> WaveletBasis:
    """Construct a basis; only the Daubechies family is built in."""
    name = family.lower()
    if name in ("haar",):
        name, order = "daubechies", 1
    if name not in ("daubechies", "db"):
        raise ValueError(f"unsupported wavelet family {family!r}")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    h = daubechies_filter(order)
    h.setflags(write=False)
    g = quadrature_mirror(h)
    g.setflags(write=False)
    return WaveletBasis("daubechies", order, d, h, g, sobolev_regularity(order))


@dataclass(frozen=True)
class DyadicIndex:
    """Index (j, k, e) of one atom: scale, translate vector, orientation."""

    j: int
    k: tuple[int, ...]
    e: tuple[int, ...]

    def __post_init__(self):
        if len(self.k) != len(self.e):
            raise ValueError("translate and orientation must share the dimension")
        if any(b not in (0, 1) for b in self.e):
            raise ValueError("orientation entries must be 0 or 1")


def dyadic_cube(index: DyadicIndex) -> tuple[np.ndarray, np.ndarray]:
    """Half-open cube 2^-j * (k + [0,1)^d) as (lower, upper) corner arrays."""
    k = np.asarray(index.k, dtype=np.float64)
    side = 2.0 ** (-index.j)
    return side * k, side * (k + 1.0)


class CoeffField:
    """Per-scale dense coefficient arrays with sparse-map accessors.

    detail[(j, e)] is the array of coefficients of scale j and orientation
    e (shape (2^j,)*d); ``scaling`` holds the coarsest-level scaling
    coefficients.  Supports dict-style access by :class:`DyadicIndex`.
    """

    def __init__(self, d, j_min, j_max, detail, scaling, length=1.0):
        self.d = d
        self.j_min = j_min
        self.j_max = j_max
        self.detail = detail
        self.scaling = scaling
        self.length = length

    @classmethod
    def zeros(cls, d: int, j_min: int, j_max: int, length: float = 1.0) -> "CoeffField":
        orients = [e for e in itertools.product((0, 1), repeat=d) if any(e)]
        detail = {(j, e): np.zeros((2 ** j,) * d)
                  for j in range(j_min, j_max + 1) for e in orients}
        return cls(d, j_min, j_max, detail, np.zeros((2 ** j_min,) * d), length)

    def _slot(self, index: DyadicIndex):
        if not any(index.e):
            if index.j != self.j_min:
                raise KeyError("scaling coefficients exist only at the coarsest scale")
            return self.scaling, index.k
        return self.detail[(index.j, index.e)], index.k

    def __getitem__(self, index: DyadicIndex) -> float:
        arr, k = self._slot(index)
        return float(arr[k])

    def __setitem__(self, index: DyadicIndex, value: float):
        arr, k = self._slot(index)
        arr[k] = value

    def items(self):
        """Iterate (DyadicIndex, value) over every stored coefficient."""
        for kt in itertools.product(*(range(s) for s in self.scaling.shape)):
            yield DyadicIndex(self.j_min, kt, (0,) * self.d), float(self.scaling[kt])
        for (j, e) in sorted(self.detail):
            arr = self.detail[(j, e)]
            for kt in itertools.product(*(range(s) for s in arr.shape)):
                yield DyadicIndex(j, kt, e), float(arr[kt])

    def lp_mass(self, p: float, include_scaling: bool = True,
                scales=None) -> float:
        """Sum of |coefficient|^p, optionally restricted to given scales."""
        total = 0.0
        for (j, e), arr in self.detail.items():
            if scales is not None and j not in scales:
                continue
            total += float((np.abs(arr) ** p).sum())
        if include_scaling and (scales is None or self.j_min in scales):
            total += float((np.abs(self.scaling) ** p).sum())
        return total

    def norm_lp(self, p: float, include_scaling: bool = True) -> float:
        return self.lp_mass(p, include_scaling) ** (1.0 / p)

    def energy(self) -> float:
        return self.lp_mass(2.0)

    def flat_values(self, include_scaling: bool = True, orientations=None) -> np.ndarray:
        """Deterministic flattening: scaling block first, then ascending scales."""
        parts = []
        if include_scaling:
            parts.append(self.scaling.ravel())
        for (j, e) in sorted(self.detail):
            if orientations is not None and e not in orientations:
                continue
            parts.append(self.detail[(j, e)].ravel())
        return np.concatenate(parts) if parts else np.empty(0)


def _axis_to_mat(arr: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(arr, axis, -1)
    return np.ascontiguousarray(moved.reshape(-1, arr.shape[axis])), moved.shape


def _mat_to_axis(mat: np.ndarray, moved_shape: tuple, axis: int) -> np.ndarray:
    new_shape = moved_shape[:-1] + (mat.shape[1],)
    return np.moveaxis(np.asarray(mat).reshape(new_shape), -1, axis)


def _split_level(arr: np.ndarray, h: np.ndarray, g: np.ndarray) -> dict:
    """One analysis level in d dimensions: {orientation e: block array}."""
    blocks = {(): arr}
    for axis in range(arr.ndim):
        nxt = {}
        for e, block in blocks.items():
            mat, moved_shape = _axis_to_mat(block, axis)
            lo, hi = kernels.dwt_analyze_level(mat, h, g)
            nxt[e + (0,)] = _mat_to_axis(lo, moved_shape, axis)
            nxt[e + (1,)] = _mat_to_axis(hi, moved_shape, axis)
        blocks = nxt
    return blocks


def _merge_level(blocks: dict, h: np.ndarray, g: np.ndarray) -> np.ndarray:
    d = len(next(iter(blocks)))
    current = blocks
    for axis in reversed(range(d)):
        nxt = {}
        for e in {key[:-1] for key in current}:
            lo, hi = current[e + (0,)], current[e + (1,)]
            mat_lo, moved_shape = _axis_to_mat(lo, axis)
            mat_hi, _ = _axis_to_mat(hi, axis)
            merged = kernels.dwt_synthesize_level(mat_lo, mat_hi, h, g)
            nxt[e] = _mat_to_axis(merged, moved_shape[:-1] + (merged.shape[1],), axis)
        current = nxt
    return current[()]


def analyze(field: SampledField, basis: WaveletBasis,
            j_range: tuple[int, int] | None = None) -> CoeffField:
    """Periodized multi-level forward transform.

    With the full range (default) the coefficient set is a complete
    orthonormal system for the grid, so
    sum(detail^2) + sum(scaling^2) == sum(field^2) * h^d exactly up to
    rounding.  Scales finer than j_max are discarded (lossy restriction).
    """
    if basis.d != field.d:
        raise ValueError("basis dimension does not match the field")
    big_j = require_power_of_two(field)
    j_min, j_max = j_range if j_range is not None else (0, big_j - 1)
    if not (0 <= j_min <= j_max):
        raise ValueError(f"bad scale range [{j_min}, {j_max}]")
    if j_max > big_j - 1:
        raise ValueError(
            f"scale range exceeds grid resolution: j_max={j_max} needs side "
            f">= {2 ** (j_max + 1)}, grid has {field.n}")
    weight = field.cell_volume() ** 0.5
    current = field.values * weight
    detail = {}
    for j in range(big_j - 1, j_min - 1, -1):
        blocks = _split_level(current, basis.h, basis.g)
        current = blocks[(0,) * field.d]
        if j <= j_max:
            for e, block in blocks.items():
                if any(e):
                    detail[(j, e)] = block
    return CoeffField(field.d, j_min, j_max, detail, current, field.length)


def synthesize(coeffs: CoeffField, basis: WaveletBasis, n: int | None = None) -> SampledField:
    """Inverse transform onto a grid of side n (defaults to 2^(j_max+1)).

    Exact inverse of :func:`analyze` over the same scale range; scales
    absent from the coefficient field enter as zeros.
    """
    if basis.d != coeffs.d:
        raise ValueError("basis dimension does not match the coefficients")
    if n is None:
        n = 2 ** (coeffs.j_max + 1)
    if n < 2 or n & (n - 1):
        raise ValueError(f"target grid side must be a power of two, got {n}")
    big_j = n.bit_length() - 1
    if coeffs.j_max > big_j - 1:
        raise ValueError(
            f"scale range exceeds grid resolution: j_max={coeffs.j_max} "
            f"needs side >= {2 ** (coeffs.j_max + 1)}, requested {n}")
    d = coeffs.d
    current = coeffs.scaling
    for j in range(coeffs.j_min, big_j):
        blocks = {(0,) * d: current}
        shape = (2 ** j,) * d
        for e in basis.orientations():
            blocks[e] = coeffs.detail.get((j, e), np.zeros(shape))
        current = _merge_level(blocks, basis.h, basis.g)
    h_cell = (coeffs.length / n) ** (d / 2.0)
    return SampledField(current / h_cell, length=coeffs.length)
