"""Random-series synthesis: pairings of the generalized noise field and
pointwise sampling of its anchored (origin-pinned) integral.

The random objects are finite truncations of
``sum_{j,k,e} eta_{j,k,e} * (operator psi_{j,k,e})`` with i.i.d. symmetric
p-stable coefficients.  Every finite truncation is exactly stable, so
pairings and increments have closed-form scale parameters; Monte Carlo here
only exercises the samplers, never defines the law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fracfield import fracop, stable, wavelet
from fracfield.errors import ParameterWindowError, TruncationError
from fracfield.grid import SampledField, TestFunction
from fracfield.stable import StableLaw
from fracfield.wavelet import CoeffField, WaveletBasis

_SAMPLE_CHUNK_SCALARS = 1 << 22  # eta draws per Monte Carlo chunk


@dataclass(frozen=True)
class TruncationSpec:
    """Scale window [j_min, j_max] of a truncated wavelet series.

    Translates always run over the full torus at each scale; the coarse tail
    of the series is represented by the scaling coefficients at j_min, which
    are randomized like every other coefficient unless ``include_scaling``
    is off.
    """

    j_min: int
    j_max: int
    include_scaling: bool = True

    def __post_init__(self):
        if self.j_min < 0 or self.j_min > self.j_max:
            raise ValueError(f"bad truncation window [{self.j_min}, {self.j_max}]")

    def grid_side(self) -> int:
        return 2 ** (self.j_max + 1)

    def nested_in(self, other: "TruncationSpec") -> bool:
        # the coarse scaling space at j_min spans every coarser detail scale
        # plus the other window's scaling space, so scaling inclusion must
        # propagate to the enclosing window
        return (other.j_min <= self.j_min and self.j_max <= other.j_max
                and (not self.include_scaling or other.include_scaling))


def default_truncation(n: int) -> TruncationSpec:
    """Full window for a grid of side n: scales 0 .. log2(n)-1."""
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid side must be a power of two, got {n}")
    return TruncationSpec(0, n.bit_length() - 2)


def check_pairing_window(gamma: float, p: float, d: int, regularity: float,
                         unsafe: bool = False):
    """Admissibility of (gamma, p) for pairings of the noise field.

    p = 2: 0 <= gamma <= d/2.  Otherwise 4/3 <= p <= 2 and
    d*(1/p - 1/2) < gamma <= d*(1 - 1/p).  Always gamma < basis regularity.
    With ``unsafe`` the violations are ignored (negative controls).
    """
    problems = []
    if p == 2.0:
        if not (0.0 <= gamma <= d / 2.0):
            problems.append(f"p=2 requires 0 <= gamma <= d/2 = {d / 2.0}, got gamma={gamma}")
    else:
        if not (4.0 / 3.0 <= p <= 2.0):
            problems.append(f"pairing requires 4/3 <= p <= 2, got p={p}")
        else:
            lo, hi = d * (1.0 / p - 0.5), d * (1.0 - 1.0 / p)
            if not (lo < gamma <= hi):
                problems.append(
                    f"pairing requires d(1/p-1/2) < gamma <= d(1-1/p) "
                    f"(= {lo:.6g} < gamma <= {hi:.6g}), got gamma={gamma}")
    if not (gamma < regularity):
        problems.append(
            f"gamma must stay below the basis regularity {regularity:.4g}, got gamma={gamma}")
    if problems and not unsafe:
        raise ParameterWindowError("; ".join(problems))
    return problems


def check_pointwise_window(gamma: float, p: float, d: int, regularity: float,
                           unsafe: bool = False):
    """Admissibility of (gamma, p) for the pointwise anchored field.

    p = 2: d/2 <= gamma <= d/2 + 1.  Otherwise 1 < p <= 2 and
    d/2 < gamma <= d*(1 - 1/p) + 1 (p > 1 is required by the kernel-norm
    lemma even though p = 1 appears admissible at first sight).
    """
    problems = []
    if p == 2.0:
        if not (d / 2.0 <= gamma <= d / 2.0 + 1.0):
            problems.append(
                f"p=2 requires d/2 <= gamma <= d/2+1 "
                f"(= {d / 2.0} <= gamma <= {d / 2.0 + 1.0}), got gamma={gamma}")
    else:
        if not (1.0 < p <= 2.0):
            problems.append(f"pointwise field requires 1 < p <= 2, got p={p}")
        else:
            hi = d * (1.0 - 1.0 / p) + 1.0
            if not (d / 2.0 < gamma <= hi):
                problems.append(
                    f"pointwise field requires d/2 < gamma <= d(1-1/p)+1 "
                    f"(= {d / 2.0} < gamma <= {hi:.6g}), got gamma={gamma}")
    if not (gamma < regularity):
        problems.append(
            f"gamma must stay below the basis regularity {regularity:.4g}, got gamma={gamma}")
    if problems and not unsafe:
        raise ParameterWindowError("; ".join(problems))
    return problems


@dataclass(frozen=True)
class PairingResult:
    """Exact stable scale of a (rescaled, dilated) pairing.

    ``sigma`` is the scale of a^(d/2+gamma) * <X, phi(a .)> for a unit-scale
    coefficient law; multiply by the law's sigma for general laws.
    ``coefficients`` holds the wavelet coefficients of the fractional
    integral of the dilated test function.
    """

    sigma: float
    coefficients: CoeffField
    p: float
    a: float
    gamma: float
    tail_fraction: float


def _restricted_mass(coeffs: CoeffField, trunc: TruncationSpec, p: float) -> float:
    scales = range(trunc.j_min, trunc.j_max + 1)
    return coeffs.lp_mass(p, include_scaling=trunc.include_scaling, scales=scales)


def _pairing_coefficients(phi: TestFunction, gamma: float, a: float,
                          basis: WaveletBasis, trunc: TruncationSpec) -> CoeffField:
    n = trunc.grid_side()
    phi_a = phi.sample(n, length=1.0, dilation=a)
    integrated = fracop.riesz_apply(phi_a, gamma)
    return wavelet.analyze(integrated, basis, (trunc.j_min, trunc.j_max))


def pair_scale(phi: TestFunction, gamma: float, p: float, a: float,
               basis: WaveletBasis, trunc: TruncationSpec | None = None,
               unsafe: bool = False, tail_threshold: float = 0.01) -> PairingResult:
    """Exact stable scale of the self-similarity-rescaled pairing.

    The dilated test function is sampled analytically and fractionally
    integrated on the grid; by the operator's scaling identity this equals
    dilating the integrated function and restoring a^gamma, so
    sigma = a^(d/2+gamma) * (sum |<I phi_a, psi>|^p)^(1/p).  At p = 2,
    sigma is independent of a up to discretization.
    """
    if phi.d != basis.d:
        raise ValueError("test function and basis dimensions differ")
    if a <= 0:
        raise ValueError("dilation factor must be positive")
    check_pairing_window(gamma, p, basis.d, basis.regularity, unsafe)
    if trunc is None:
        trunc = TruncationSpec(0, 10 if basis.d == 1 else 7)
    coeffs = _pairing_coefficients(phi, gamma, a, basis, trunc)
    mass = _restricted_mass(coeffs, trunc, p)
    tail = 0.0
    if mass > 0.0:
        tail = coeffs.lp_mass(p, include_scaling=False,
                              scales={trunc.j_max}) / mass
        if tail > tail_threshold and not unsafe:
            raise TruncationError(
                f"finest-scale coefficient mass fraction {tail:.3g} exceeds "
                f"{tail_threshold:.3g}; enlarge the truncation window")
    sigma = a ** (basis.d / 2.0 + gamma) * mass ** (1.0 / p)
    return PairingResult(sigma, coeffs, p, a, gamma, tail)


def pair_sample(phi: TestFunction, gamma: float, law: StableLaw,
                basis: WaveletBasis, trunc: TruncationSpec | None = None,
                n: int = 1000, seed: int = 0, a: float = 1.0,
                unsafe: bool = False) -> np.ndarray:
    """Monte Carlo draws of a^(d/2+gamma) * <X, phi(a .)>.

    Each draw honestly sums eta-weighted coefficients; by stability of
    finite weighted sums the marginal law is exactly symmetric p-stable with
    scale law.sigma * pair_scale(...).sigma.  Chunks draw from successive
    RNG streams of the seed; identical (seed, n) gives identical draws.
    """
    if n == 0:
        return np.empty(0)
    if n < 0:
        raise ValueError("number of draws must be non-negative")
    result = pair_scale(phi, gamma, law.p, a, basis, trunc, unsafe)
    trunc_eff = trunc if trunc is not None else TruncationSpec(
        result.coefficients.j_min, result.coefficients.j_max)
    weights = result.coefficients.flat_values(
        include_scaling=trunc_eff.include_scaling)
    weights = weights * a ** (basis.d / 2.0 + gamma)
    chunk = max(1, _SAMPLE_CHUNK_SCALARS // max(1, weights.size))
    out = np.empty(n)
    for stream, start in enumerate(range(0, n, chunk)):
        m = min(chunk, n - start)
        eta = stable.sample_sps(law, m * weights.size, seed, stream=stream)
        out[start:start + m] = eta.reshape(m, weights.size) @ weights
    return out


def _draw_coefficients(law: StableLaw, d: int, trunc: TruncationSpec,
                       seed: int) -> CoeffField:
    coeffs = CoeffField.zeros(d, trunc.j_min, trunc.j_max)
    counts = [coeffs.scaling.size] + [
        coeffs.detail[key].size for key in sorted(coeffs.detail)]
    draws = stable.sample_sps(law, int(np.sum(counts)), seed, stream=0)
    pos = coeffs.scaling.size
    # the scaling block is always drawn so that detail draws stay aligned
    # when ablating include_scaling under a shared seed
    if trunc.include_scaling:
        coeffs.scaling[...] = draws[:pos].reshape(coeffs.scaling.shape)
    for key in sorted(coeffs.detail):
        arr = coeffs.detail[key]
        arr[...] = draws[pos:pos + arr.size].reshape(arr.shape)
        pos += arr.size
    return coeffs


def field_y(gamma: float, law: StableLaw, d: int, n: int, basis: WaveletBasis,
            trunc: TruncationSpec | None = None, seed: int = 0,
            unsafe: bool = False) -> SampledField:
    """Sample the anchored pointwise field on an n^d grid.

    Draws i.i.d. stable coefficients over the truncation window, synthesizes
    the wavelet sum with one inverse transform, and applies the anchored
    fractional integral; by linearity this equals summing the transformed
    atoms.  The value at the origin is exactly zero.  Deterministic in
    (seed, trunc, n).
    """
    check_pointwise_window(gamma, law.p, d, basis.regularity, unsafe)
    if basis.d != d:
        raise ValueError("basis dimension mismatch")
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid side must be a power of two, got {n}")
    if trunc is None:
        trunc = default_truncation(n)
    if trunc.grid_side() > n:
        raise ValueError(
            f"truncation window needs grid side >= {trunc.grid_side()}, got {n}")
    coeffs = _draw_coefficients(law, d, trunc, seed)
    rough = wavelet.synthesize(coeffs, basis, n)
    return fracop.modified_apply(rough, gamma)


def increment_scale(gamma: float, law: StableLaw, x, x_prime,
                    basis: WaveletBasis, trunc: TruncationSpec | None = None,
                    unsafe: bool = False) -> float:
    """Exact stable scale of Y(x) - Y(x_prime) for the truncated field.

    The increment's coefficient against atom psi equals the atom's pairing
    with the translated difference kernel, which is computed spectrally as
    the fractional integral of a two-point charge; the scale is the l^p norm
    of those coefficients over the window, times the law's sigma.
    """
    check_pointwise_window(gamma, law.p, basis.d, basis.regularity, unsafe)
    if trunc is None:
        trunc = TruncationSpec(0, 10 if basis.d == 1 else 7)
    d = basis.d
    n = trunc.grid_side()
    h = 1.0 / n
    ix = tuple(int(round(float(c) / h)) % n for c in np.atleast_1d(x))
    ixp = tuple(int(round(float(c) / h)) % n for c in np.atleast_1d(x_prime))
    if len(ix) != d or len(ixp) != d:
        raise ValueError("points must have the basis dimension")
    if ix == ixp:
        return 0.0
    charge = np.zeros((n,) * d)
    charge[ix] += 1.0 / h ** d
    charge[ixp] -= 1.0 / h ** d
    diff_kernel = fracop.riesz_apply(SampledField(charge), gamma)
    coeffs = wavelet.analyze(diff_kernel, basis, (trunc.j_min, trunc.j_max))
    mass = _restricted_mass(coeffs, trunc, law.p)
    return law.sigma * mass ** (1.0 / law.p)


def tail_diagnostic(subject, gamma: float, law: StableLaw,
                    basis: WaveletBasis, trunc_ladder: list[TruncationSpec],
                    reference: TruncationSpec | None = None,
                    a: float = 1.0, unsafe: bool = False) -> np.ndarray:
    """Truncation residuals along a nested ladder of windows.

    For a test function (pairing mode) the residual of a rung is the
    p-th-power coefficient mass inside the reference window but outside the
    rung.  For an integer grid side (field mode) it is the excluded band's
    per-scale weighted-spectral mass: the count of atoms at each excluded
    scale times the weighted Fourier norm (p-th power) of one transformed
    atom.  Admissible parameters give fast decay; rough subjects outside the
    window plateau.
    """
    if not trunc_ladder:
        raise ValueError("empty truncation ladder")
    for fine, coarse in zip(trunc_ladder[1:], trunc_ladder[:-1]):
        if not coarse.nested_in(fine):
            raise ValueError("truncation ladder must be nested and ascending")
    ref = reference if reference is not None else trunc_ladder[-1]
    for rung in trunc_ladder:
        if not rung.nested_in(ref):
            raise ValueError("every rung must be nested in the reference window")
    p = law.p
    if isinstance(subject, TestFunction):
        check_pairing_window(gamma, p, basis.d, basis.regularity, unsafe)
        coeffs = _pairing_coefficients(subject, gamma, a, basis, ref)
        residuals = []
        for rung in trunc_ladder:
            outside = [j for j in range(ref.j_min, ref.j_max + 1)
                       if not (rung.j_min <= j <= rung.j_max)]
            residuals.append(coeffs.lp_mass(p, include_scaling=False,
                                            scales=outside))
        return np.asarray(residuals)
    if isinstance(subject, (int, np.integer)):
        check_pointwise_window(gamma, p, basis.d, basis.regularity, unsafe)
        n = max(int(subject), ref.grid_side())
        level_mass = {}
        for j in range(ref.j_min, ref.j_max + 1):
            for e in basis.orientations():
                unit = CoeffField.zeros(basis.d, j, j)
                unit.detail[(j, e)][(0,) * basis.d] = 1.0
                atom = wavelet.synthesize(unit, basis, n)
                transformed = fracop.riesz_apply(atom, gamma)
                wnorm = fracop.weighted_fourier_norm(transformed, p)
                level_mass[j] = level_mass.get(j, 0.0) + \
                    (2 ** (j * basis.d)) * wnorm ** p
        residuals = []
        for rung in trunc_ladder:
            residuals.append(sum(mass for j, mass in level_mass.items()
                                 if j > rung.j_max))
        return np.asarray(residuals)
    raise TypeError("subject must be a TestFunction (pairing mode) or an "
                    "integer grid side (field mode)")
