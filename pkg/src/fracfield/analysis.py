"""Measurement and verification: norm sandwiches, distribution bounds,
spectral slopes, goodness of fit, and graph-dimension estimates."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from fracfield import _kernels as kernels
from fracfield import fracop, stable, synthesis, wavelet
from fracfield.errors import ParameterWindowError
from fracfield.grid import SampledField, TestFunction, standard_corpus
from fracfield.stable import StableLaw
from fracfield.synthesis import TruncationSpec
from fracfield.wavelet import WaveletBasis

_REL_SLACK = 1e-10  # rounding slack for exact sequence-space inequalities


@dataclass(frozen=True)
class BoundReport:
    """A lower <= value <= upper check with its parameters echoed."""

    lower: float
    value: float
    upper: float
    params: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        ok_low = self.lower <= self.value * (1.0 + _REL_SLACK) + 1e-300
        ok_high = self.value <= self.upper * (1.0 + _REL_SLACK) + 1e-300
        return bool(ok_low and ok_high)


@dataclass(frozen=True)
class DimensionEstimate:
    """Graph-dimension estimate with the fit's standard error and scale band."""

    estimate: float
    stderr: float
    scale_range: tuple[int, int]
    method: str = "box"


def _as_field(f, n: int) -> SampledField:
    if isinstance(f, TestFunction):
        return f.sample(n)
    return f


def _check_frame_window(p: float, s: float, d: int, regularity: float):
    if p == 2.0:
        if s < 0:
            raise ParameterWindowError(f"p=2 requires s >= 0, got s={s}")
        return
    if not (1.0 < p < 2.0):
        raise ParameterWindowError(
            f"coefficient bounds require 1 < p <= 2, got p={p}")
    lo = d * (1.0 / p - 0.5)
    if not (lo < s < regularity):
        raise ParameterWindowError(
            f"coefficient bounds require d(1/p-1/2) < s < regularity "
            f"(= {lo:.6g} < s < {regularity:.6g}), got s={s}")


_FRAME_CONSTANT_CACHE: dict = {}


def empirical_frame_constant(p: float, s: float, basis: WaveletBasis,
                             n: int = 512, corpus=None) -> float:
    """Largest corpus ratio of the coefficient l^p sum to the Sobolev norm.

    The upper coefficient bound holds with a non-constructive constant;
    this calibrates it empirically (corpus maxima, cached per
    (p, s, basis, n)) as the package-wide substitute.
    """
    key = (round(p, 12), round(s, 12), basis.family, basis.order, basis.d,
           n, corpus is None)
    if corpus is None and key in _FRAME_CONSTANT_CACHE:
        return _FRAME_CONSTANT_CACHE[key]
    fns = corpus if corpus is not None else standard_corpus(basis.d)
    best = 0.0
    for fn in fns:
        f = _as_field(fn, n)
        value = wavelet.analyze(f, basis).norm_lp(p)
        best = max(best, value / fracop.sobolev_norm(f, p, s))
    if corpus is None:
        _FRAME_CONSTANT_CACHE[key] = best
    return best


def t1_bounds(f, p: float, s: float, basis: WaveletBasis, n: int = 512,
              c_ps: float | None = None) -> BoundReport:
    """Norm sandwich for the wavelet coefficients of f.

    lower = discrete L2 norm (holds unconditionally: the l^p sum of the
    coefficients dominates their l^2 sum, which is the L2 norm by the energy
    identity); value = coefficient l^p sum; upper = C * Sobolev norm with C
    the calibrated constant (see :func:`empirical_frame_constant`).
    """
    f = _as_field(f, n)
    _check_frame_window(p, s, f.d, basis.regularity)
    lower = f.norm_l2()
    value = wavelet.analyze(f, basis).norm_lp(p)
    h_norm = fracop.sobolev_norm(f, p, s)
    const = c_ps if c_ps is not None else empirical_frame_constant(p, s, basis, f.n)
    return BoundReport(lower, value, const * h_norm,
                       params={"p": p, "s": s, "h_norm": h_norm,
                               "c_emp": value / h_norm, "c_used": const})


def square_function_norm(f, p: float, s: float, basis: WaveletBasis,
                         n: int = 512) -> float:
    """L^p norm of the dyadic square function.

    Each coefficient contributes |c|^2 * 2^(dj) over its dyadic cube, with
    the extra factor (1 + 4^(sj)) in the smoothness-weighted variant
    (s > 0); at s = 0 and p = 2 the result equals the L2 norm exactly.
    """
    f = _as_field(f, n)
    if s < 0 or s > basis.regularity:
        raise ParameterWindowError(
            f"square function needs 0 <= s <= regularity "
            f"(= {basis.regularity:.4g}), got s={s}")
    coeffs = wavelet.analyze(f, basis)
    grid_n = f.n
    acc = np.zeros(f.values.shape)

    def splat(arr, j):
        w = 2.0 ** (f.d * j)
        if s > 0:
            w *= 1.0 + 4.0 ** (s * j)
        block = arr ** 2 * w
        reps = grid_n // arr.shape[0]
        for axis in range(f.d):
            block = np.repeat(block, reps, axis=axis)
        return block

    acc += splat(coeffs.scaling, coeffs.j_min)
    for (j, _e), arr in coeffs.detail.items():
        acc += splat(arr, j)
    return SampledField(np.sqrt(acc), f.length).norm_lp(p)


_WEIGHTED_CONSTANT_CACHE: dict = {}


def _support_in_quarter_cube(f: SampledField) -> bool:
    coords = f.axis_coords()
    dist = np.minimum(coords, f.length - coords)  # torus distance to 0
    outside_axis = dist >= f.length / 4.0
    mask = np.zeros(f.values.shape, dtype=bool)
    for axis in range(f.d):
        shape = [1] * f.d
        shape[axis] = f.n
        mask |= outside_axis.reshape(shape)
    total = np.abs(f.values).sum()
    if total == 0.0:
        return True
    return float(np.abs(f.values[mask]).sum()) / float(total) < 1e-9


def weighted_sampling_bound(f, p: float, oversample: int = 8,
                            c_pd: float | None = None,
                            n: int = 256) -> BoundReport:
    """Continuum-vs-lattice comparison of the weighted spectral mass.

    For f supported in the centered quarter cube, the weighted L^p mass of
    the continuous spectrum (value; oversampled lattice quadrature) is
    controlled by the integer-lattice sum (upper, times the calibrated
    constant).  lower is 0.
    """
    f = _as_field(f, n)
    if not (1.0 <= p <= 2.0):
        raise ParameterWindowError(f"weighted bound requires 1 <= p <= 2, got p={p}")
    if not _support_in_quarter_cube(f):
        raise ValueError("field must be supported in the centered quarter cube")
    lhs = fracop.weighted_fourier_norm(f, p, oversample=oversample) ** p
    rhs = fracop.weighted_fourier_norm(f, p) ** p
    if c_pd is None:
        key = (round(p, 12), f.d, f.n, oversample)
        if key not in _WEIGHTED_CONSTANT_CACHE:
            from fracfield.grid import bump, modulated_bump
            probes = [bump(f.d, center=(0.0,) * f.d, radius=r)
                      for r in (0.05, 0.1, 0.15, 0.2)]
            probes += [modulated_bump(f.d, center=(0.0,) * f.d, radius=0.15,
                                      freq=q) for q in (4.0, 9.0)]
            best = 0.0
            for fn in probes:
                probe = fn.sample(f.n)
                num = fracop.weighted_fourier_norm(probe, p, oversample=oversample) ** p
                den = fracop.weighted_fourier_norm(probe, p) ** p
                best = max(best, num / den)
            _WEIGHTED_CONSTANT_CACHE[key] = best
        c_pd = _WEIGHTED_CONSTANT_CACHE[key]
    return BoundReport(0.0, lhs, c_pd * rhs,
                       params={"p": p, "ratio": lhs / rhs if rhs else np.inf,
                               "c_used": c_pd})


def ss_bounds(phi: TestFunction, gamma: float, p: float, s: float, a: float,
              basis: WaveletBasis, trunc: TruncationSpec | None = None,
              c_ps: float | None = None) -> BoundReport:
    """Scale ordering for the rescaled dilated pairing.

    In scale terms (larger stable scale means smaller CDF on the positive
    axis):  ||I_gamma phi||_L2  <=  sigma(a)  <=
    C * (a^A ||I_gamma phi||_p + a^(A+s) ||I_(gamma-s) phi||_p)
    with A = d(1/2 - 1/p).  C is calibrated from the coefficient-bound
    corpus plus this test function at a = 1, so the content of the check is
    the dilation sweep.
    """
    d = basis.d
    check = synthesis.check_pairing_window(gamma, p, d, basis.regularity)
    if not (s > gamma):
        raise ParameterWindowError(f"bounds require s > gamma, got s={s}, gamma={gamma}")
    if not (s < basis.regularity):
        raise ParameterWindowError(
            f"s must stay below the basis regularity {basis.regularity:.4g}, got s={s}")
    if trunc is None:
        trunc = TruncationSpec(0, 10 if d == 1 else 7)
    result = synthesis.pair_scale(phi, gamma, p, a, basis, trunc)
    nbase = trunc.grid_side()
    samples = phi.sample(nbase)
    ig = fracop.riesz_apply(samples, gamma)
    igs = fracop.riesz_apply(samples, gamma - s)
    lower = ig.norm_l2()
    term1 = ig.norm_lp(p)
    term2 = igs.norm_lp(p)
    const = c_ps if c_ps is not None else empirical_frame_constant(p, s, basis, nbase)
    sigma_at_1 = synthesis.pair_scale(phi, gamma, p, 1.0, basis, trunc).sigma
    const = max(const, sigma_at_1 / (term1 + term2))
    expo = d * (0.5 - 1.0 / p)
    upper = const * (a ** expo * term1 + a ** (expo + s) * term2)
    return BoundReport(lower, result.sigma, upper,
                       params={"p": p, "s": s, "gamma": gamma, "a": a,
                               "c_used": const, "violations": check})


def ecdf_ks(samples: np.ndarray, law: StableLaw) -> float:
    """One-sample Kolmogorov-Smirnov distance to the stable law."""
    xs = np.sort(np.asarray(samples, dtype=np.float64))
    n = xs.size
    if n < 100:
        raise ValueError(f"KS needs at least 100 samples, got {n}")
    cdf = stable.cdf_values(law, xs)
    up = (np.arange(1, n + 1) / n - cdf).max()
    down = (cdf - np.arange(0, n) / n).max()
    return float(max(up, down))


def periodogram_slope(field: SampledField, band: tuple[float, float]) -> float:
    """Log-log slope of the (radially averaged) periodogram over a band.

    band = (lo, hi] in continuous frequency units; d >= 2 averages the
    spectrum over integer-radius rings before fitting.
    """
    lo, hi = band
    nyquist = field.n / (2.0 * field.length)
    if not (0.0 <= lo < hi <= nyquist):
        raise ValueError(f"bad fit band ({lo}, {hi}]; nyquist is {nyquist}")
    power = np.abs(np.fft.fftn(field.values)) ** 2
    if field.d == 1:
        lam = np.fft.fftfreq(field.n, d=field.spacing)
        mask = (lam > lo) & (lam <= hi)
        lams, powers = lam[mask], power[mask]
    else:
        lam2 = fracop._lambda_sq(field.values.shape, field.length)
        ring = np.rint(np.sqrt(lam2) * field.length).astype(int)
        counts = np.bincount(ring.ravel())
        sums = np.bincount(ring.ravel(), weights=power.ravel())
        radii = np.arange(counts.size) / field.length
        mask = (radii > lo) & (radii <= hi) & (counts > 0)
        lams, powers = radii[mask], sums[mask] / counts[mask]
    good = powers > 0
    lams, powers = lams[good], powers[good]
    if lams.size < 2:
        raise ValueError("empty fit band")
    return float(np.polyfit(np.log(lams), np.log(powers), 1)[0])


def frostman_energy(field: SampledField, rho: float, block: int = 2048) -> float:
    """Quadrature of (|x-x'|^2 + |f(x)-f(x')|^2)^(-rho/2) over grid pairs.

    Pairs at identical grid points (distance below one spacing) are
    excluded; the sub-grid contribution is what the refinement trend of this
    quantity probes, so it is never extrapolated here.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if field.d == 1:
        return float(kernels.graph_energy_1d(
            np.ascontiguousarray(field.values), field.spacing, rho))
    coords = np.stack(np.meshgrid(*([field.axis_coords()] * field.d),
                                  indexing="ij"), axis=-1).reshape(-1, field.d)
    vals = field.values.ravel()
    m = vals.size
    total = 0.0
    for start in range(0, m, block):
        stop = min(start + block, m)
        dx2 = ((coords[start:stop, None, :] - coords[None, :, :]) ** 2).sum(-1)
        dv = vals[start:stop, None] - vals[None, :]
        r2 = dx2 + dv * dv
        idx = np.arange(start, stop)
        r2[idx - start, idx] = 1.0
        w = r2 ** (-rho / 2.0)
        w[idx - start, idx] = 0.0
        total += float(w.sum())
    return total * field.cell_volume() ** 2


def box_dimension(field: SampledField) -> DimensionEstimate:
    """Box-counting dimension of the graph of a 1-d sample path.

    Counts eps-grid boxes met by the graph column by column
    (floor(max/eps) - floor(min/eps) + 1 vertical boxes per column of width
    eps) for eps = 2^-m, and fits log N against log(1/eps).  The fit band
    drops the three coarsest and the two finest available octaves
    (m = 3 .. J-5).
    """
    if field.d != 1:
        raise ValueError("box dimension implemented for d = 1 graphs")
    big_j = int(np.log2(field.n))
    if 2 ** big_j != field.n or big_j < 12:
        raise ValueError("insufficient resolution: need side 2^J with J >= 12")
    ms = np.arange(3, big_j - 4)
    counts = []
    v = field.values
    for m in ms:
        ncols = 2 ** int(m)
        eps = field.length / ncols
        width = field.n // ncols
        cols = v.reshape(ncols, width)
        # closed columns: the graph is continuous, so each column also meets
        # the box of the next column's first sample
        nxt = np.roll(v, -1).reshape(ncols, width)[:, -1]
        top = np.floor(np.maximum(cols.max(axis=1), nxt) / eps)
        bot = np.floor(np.minimum(cols.min(axis=1), nxt) / eps)
        counts.append(float((top - bot + 1.0).sum()))
    xs = ms * np.log(2.0)  # log(1/eps) with unit length
    ys = np.log(np.asarray(counts))
    coeffs, residuals, *_ = np.polyfit(xs, ys, 1, full=True)
    dof = len(xs) - 2
    resid = float(residuals[0]) if len(residuals) else 0.0
    var = resid / dof if dof > 0 else 0.0
    stderr = float(np.sqrt(var / ((xs - xs.mean()) ** 2).sum()))
    return DimensionEstimate(float(coeffs[0]), stderr,
                             (int(ms[0]), int(ms[-1])), "box")


def excess_kurtosis(samples: np.ndarray) -> float:
    """Pooled excess kurtosis; diverges with n for heavy-tailed inputs."""
    z = np.asarray(samples, dtype=np.float64).ravel()
    z = z - z.mean()
    m2 = (z ** 2).mean()
    if m2 == 0.0:
        return 0.0
    return float((z ** 4).mean() / m2 ** 2 - 3.0)
