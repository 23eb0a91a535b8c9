"""Symmetric p-stable laws: sampling, characteristic function, CDF, moments.

The scale convention follows the characteristic function
``E exp(i*xi*eta) = exp(-(sigma**p)*|xi|**p)`` throughout.  Note that for
p = 2 this makes eta Gaussian with variance ``2*sigma**2`` (standard
deviation ``sqrt(2)*sigma``), not ``sigma**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy import integrate, interpolate, special

from fracfield.errors import InfiniteMomentError, QuadratureError

_SERIES_SWITCH = 10.0  # |x|/sigma beyond which the tail series is used
_SERIES_MAX_TERMS = 16


@dataclass(frozen=True)
class StableLaw:
    """Parameters (p, sigma) of a symmetric p-stable distribution."""

    p: float
    sigma: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p <= 2.0):
            raise ValueError(f"stability index p must be in (0, 2], got {self.p}")
        if not (self.sigma > 0.0):
            raise ValueError(f"scale sigma must be positive, got {self.sigma}")


def char_fn(law: StableLaw, xi) -> np.ndarray | float:
    """Characteristic function exp(-(sigma^p)|xi|^p); real, even, total."""
    out = np.exp(-(law.sigma ** law.p) * np.abs(xi) ** law.p)
    return float(out) if np.isscalar(xi) else out


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for the (seed, stream) reproducibility contract."""
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative integers")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(seed=ss))


def sample_sps(law: StableLaw, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """Draw n i.i.d. variates by the Chambers-Mallows-Stuck symmetric form.

    eta = sigma * sin(p*U)/cos(U)^(1/p) * (cos((1-p)*U)/W)^((1-p)/p) with
    U ~ Uniform(-pi/2, pi/2) and W ~ Exp(1).  The single formula is exact for
    every p in (0, 2]: at p=1 it reduces to sigma*tan(U) (Cauchy) and at p=2
    it is distributed as sqrt(2)*sigma*N(0,1), matching the characteristic
    function convention.  Deterministic given (seed, stream).
    """
    if n < 1:
        raise ValueError(f"need n >= 1 draws, got {n}")
    rng = _rng(seed, stream)
    u = rng.uniform(-np.pi / 2, np.pi / 2, size=n)
    w = rng.standard_exponential(size=n)
    p = law.p
    x = np.sin(p * u) / np.cos(u) ** (1.0 / p)
    x *= (np.cos((1.0 - p) * u) / w) ** ((1.0 - p) / p)
    return law.sigma * x


def _tail_series(p: float, z: np.ndarray) -> tuple[np.ndarray, float]:
    """Upper-tail probability P(eta_1 > z) for large z (sigma = 1).

    Alternating series sum_k (-1)^(k+1) Gamma(k p) sin(k pi p / 2) z^(-k p)
    / (pi k!); truncated at the smallest term.  Returns (tail, error
    estimate); the estimate is twice the smallest term, since the plain
    first-omitted-term bound was observed to understate by ~25% near the
    switch point.
    """
    z = np.asarray(z, dtype=np.float64)
    total = np.zeros_like(z)
    prev_mag = np.inf
    err = 0.0
    for k in range(1, _SERIES_MAX_TERMS + 1):
        coeff = special.gamma(k * p) * np.sin(k * np.pi * p / 2.0) / factorial(k)
        if coeff == 0.0:  # k*p even: the term vanishes, not a turning point
            continue
        term = ((-1.0) ** (k + 1) / np.pi) * coeff * z ** (-k * p)
        mag = float(np.max(np.abs(term))) if term.size else 0.0
        if mag >= prev_mag:  # asymptotic series turned: stop before it grows
            err = mag
            break
        total += term
        prev_mag = mag
        err = mag
    return total, 2.0 * err


def _gil_pelaez(p: float, z: float, tol: float) -> float:
    """F(z) for sigma = 1, 0 < z < series switch, by inversion quadrature.

    Split at t = 1; the oscillatory piece runs to the point where the
    characteristic function has decayed below 1e-18, with that remainder
    added to the reported error estimate.
    """
    f1, e1 = integrate.quad(
        lambda t: np.sin(z * t) * np.exp(-t ** p) / t if t > 0 else z,
        0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    cutoff = min(42.0 ** (1.0 / p), 1e6)
    f2, e2 = integrate.quad(
        lambda t: np.exp(-t ** p) / t, 1.0, cutoff,
        weight="sin", wvar=z, limit=800)
    achieved = e1 + e2 + np.exp(-min(cutoff ** p, 700.0))
    if achieved > tol:
        raise QuadratureError("stable CDF inversion did not converge", achieved)
    return 0.5 + (f1 + f2) / np.pi


def sps_cdf(law: StableLaw, x: float, tol: float = 1e-6) -> float:
    """Distribution function F(x).

    Closed forms for p = 1 (Cauchy) and p = 2 (Gaussian, variance
    2*sigma^2); otherwise characteristic-function inversion in the bulk and
    the power-tail series for |x|/sigma beyond the switch point.
    """
    z = float(x) / law.sigma
    p = law.p
    if p == 1.0:
        return 0.5 + np.arctan(z) / np.pi
    if p == 2.0:
        return 0.5 * (1.0 + special.erf(z / 2.0))
    if z == 0.0:
        return 0.5
    if z < 0.0:
        return 1.0 - sps_cdf(law, -x, tol)
    if z >= _SERIES_SWITCH:
        tail, err = _tail_series(p, np.array([z]))
        if err > tol:
            raise QuadratureError("stable CDF tail series did not converge", err)
        return 1.0 - float(tail[0])
    return _gil_pelaez(p, z, tol)


_NODE_CACHE: dict[float, interpolate.PchipInterpolator] = {}


def _bulk_interpolant(p: float) -> interpolate.PchipInterpolator:
    if p not in _NODE_CACHE:
        u = np.linspace(0.0, np.arcsinh(_SERIES_SWITCH), 321)
        z = np.sinh(u)
        law1 = StableLaw(p, 1.0)
        vals = np.array([sps_cdf(law1, zz) for zz in z])
        _NODE_CACHE[p] = interpolate.PchipInterpolator(u, vals)
    return _NODE_CACHE[p]


def cdf_values(law: StableLaw, xs: np.ndarray) -> np.ndarray:
    """Vectorized F(x) for goodness-of-fit work.

    Same routes as :func:`sps_cdf`; for p outside {1, 2} the bulk goes
    through a monotone interpolant of the inversion values (node error well
    below 1e-7).
    """
    xs = np.asarray(xs, dtype=np.float64)
    z = xs / law.sigma
    p = law.p
    if p == 1.0:
        return 0.5 + np.arctan(z) / np.pi
    if p == 2.0:
        return 0.5 * (1.0 + special.erf(z / 2.0))
    out = np.empty(z.shape)
    az = np.abs(z)
    bulk = az < _SERIES_SWITCH
    interp = _bulk_interpolant(p)
    out[bulk] = interp(np.arcsinh(az[bulk]))
    if (~bulk).any():
        tail, _ = _tail_series(p, az[~bulk])
        out[~bulk] = 1.0 - tail
    neg = z < 0
    out[neg] = 1.0 - out[neg]
    return out


def fractional_moment(law: StableLaw, r: float) -> float:
    """(E|eta|^r)^(1/r) = C_r * sigma for 0 < r < p.

    C_r^r = E|eta_1|^r has the closed Gamma-function form
    2^r * Gamma((r+1)/2) * Gamma(1 - r/p) / (Gamma(1 - r/2) * sqrt(pi)),
    which the tests verify against direct density quadrature.
    """
    if r <= 0:
        raise ValueError(f"moment order r must be positive, got {r}")
    if r >= law.p:
        raise InfiniteMomentError(
            f"E|eta|^r is infinite for r >= p (r={r}, p={law.p})")
    c_r_pow_r = (2.0 ** r * special.gamma((r + 1) / 2.0)
                 * special.gamma(1.0 - r / law.p)
                 / (special.gamma(1.0 - r / 2.0) * np.sqrt(np.pi)))
    return law.sigma * c_r_pow_r ** (1.0 / r)


def scale_of_sum(laws: list[StableLaw]) -> float:
    """Scale of a sum of independent draws: the l^p norm of the sigmas."""
    if not laws:
        raise ValueError("need at least one law")
    p = laws[0].p
    if any(law.p != p for law in laws):
        raise ValueError("cannot sum stable laws with mixed stability indices")
    sigmas = np.array([law.sigma for law in laws])
    return float((sigmas ** p).sum() ** (1.0 / p))
