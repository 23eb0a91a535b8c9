"""Regular-grid fields on the torus [0, L)^d and analytic test functions."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class SampledField:
    """Samples of a function on the regular grid of the torus [0, L)^d.

    values[i0, ..., i_{d-1}] is the sample at x = (i0*h, ..., i_{d-1}*h)
    with h = L/n.  Grids are cubic: every axis has the same point count.
    Instances are immutable and safe to share across threads.
    """

    values: np.ndarray
    length: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", v)
        if v.ndim < 1:
            raise ValueError("field must have at least one axis")
        if any(s != v.shape[0] for s in v.shape):
            raise ValueError(f"grid must be cubic, got shape {v.shape}")
        if self.length <= 0:
            raise ValueError("length must be positive")

    @property
    def d(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def spacing(self) -> float:
        return self.length / self.n

    def axis_coords(self) -> np.ndarray:
        return self.spacing * np.arange(self.n)

    def cell_volume(self) -> float:
        return self.spacing ** self.d

    def norm_lp(self, p: float) -> float:
        """Discrete L^p(torus) norm, cell-volume quadrature weights."""
        if not np.isfinite(p) or p <= 0:
            raise ValueError("p must be a positive real")
        return float((np.abs(self.values) ** p).sum() * self.cell_volume()) ** (1.0 / p)

    def norm_l2(self) -> float:
        return float(np.sqrt((self.values ** 2).sum() * self.cell_volume()))

    def with_values(self, values: np.ndarray) -> "SampledField":
        return replace(self, values=values)


def require_power_of_two(field: SampledField) -> int:
    """Return J with field.n == 2**J, or raise."""
    n = field.n
    if n < 2 or n & (n - 1):
        raise ValueError(f"grid side must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported smooth function with an analytic evaluator.

    ``profile`` maps an (m, d) array of points in R^d to values; it must
    vanish outside the ball of ``support_radius`` around ``center``.  Keeping
    the evaluator analytic lets dilated copies x -> phi(a*x) be sampled
    exactly (with torus wrap-around) for any dilation factor a > 0.
    """

    profile: Callable[[np.ndarray], np.ndarray]
    d: int
    center: tuple
    support_radius: float
    smoothness: str = "C-inf"
    label: str = "testfn"

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.asarray(self.profile(pts), dtype=np.float64)

    def sample(self, n: int, length: float = 1.0, dilation: float = 1.0) -> SampledField:
        """Sample the periodization of x -> phi(dilation * x) on the grid.

        The dilated support must fit in the torus: support_radius/dilation
        <= length/2.
        """
        if dilation <= 0:
            raise ValueError("dilation must be positive")
        if self.support_radius / dilation > length / 2 + 1e-12:
            raise ValueError(
                f"dilated support radius {self.support_radius / dilation:.4g} "
                f"exceeds half the torus length {length / 2:.4g}")
        axes = [length / n * np.arange(n)] * self.d
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.d)
        out = np.zeros(mesh.shape[0])
        m_max = int(np.ceil(dilation)) + 1
        shifts = np.arange(-m_max, m_max + 1) * length
        for offset in np.stack(np.meshgrid(*([shifts] * self.d), indexing="ij"),
                               axis=-1).reshape(-1, self.d):
            pts = dilation * (mesh + offset)
            r = np.linalg.norm(pts - np.asarray(self.center), axis=-1)
            hit = r < self.support_radius
            if hit.any():
                out[hit] += self.profile(pts[hit])
        return SampledField(out.reshape((n,) * self.d), length=length)

    def scaled(self, amplitude: float) -> "TestFunction":
        prof = self.profile
        return replace(self, profile=lambda pts: amplitude * prof(pts),
                       label=f"{amplitude}*{self.label}")


def bump(d: int, center=None, radius: float = 0.0625, amplitude: float = 1.0) -> TestFunction:
    """Standard C-infinity bump: A*exp(1 - 1/(1 - (r/radius)^2)) inside the ball."""
    if center is None:
        center = (0.5,) * d
    center = tuple(float(c) for c in center)

    def profile(pts):
        r2 = ((pts - np.asarray(center)) ** 2).sum(axis=-1) / radius ** 2
        out = np.zeros(pts.shape[0])
        inside = r2 < 1.0
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out

    return TestFunction(profile, d, center, radius,
                        label=f"bump(r={radius},c={center})")


def modulated_bump(d: int, center=None, radius: float = 0.0625,
                   freq: float = 8.0, axis: int = 0,
                   amplitude: float = 1.0) -> TestFunction:
    """Bump multiplied by cos(2*pi*freq*(x_axis - center_axis)): oscillatory corpus member."""
    if center is None:
        center = (0.5,) * d
    center = tuple(float(c) for c in center)
    base = bump(d, center, radius, amplitude)

    def profile(pts):
        osc = np.cos(2 * np.pi * freq * (pts[..., axis] - center[axis]))
        return base.profile(pts) * osc

    return TestFunction(profile, d, center, radius,
                        label=f"modbump(r={radius},f={freq})")


def standard_corpus(d: int, count: int = 20) -> list[TestFunction]:
    """Deterministic corpus of smooth compactly supported functions.

    Mixes plain bumps of several widths/positions, oscillatory bumps, and
    two-bump superpositions; used wherever an inequality is checked over a
    corpus.
    """
    fns: list[TestFunction] = []
    radii = [0.04, 0.06, 0.09, 0.12]
    offsets = [0.42, 0.5, 0.58]
    for r in radii:
        for c in offsets:
            fns.append(bump(d, (c,) * d, r))
    for f in [3.0, 6.0, 11.0, 17.0]:
        fns.append(modulated_bump(d, (0.5,) * d, 0.1, freq=f))
    for r, c1, c2, amp in [(0.05, 0.35, 0.6, 0.7), (0.07, 0.4, 0.62, -1.3),
                           (0.04, 0.47, 0.55, 2.0), (0.08, 0.33, 0.58, 0.5)]:
        b1 = bump(d, (c1,) * d, r)
        b2 = bump(d, (c2,) * d, r, amplitude=amp)

        def profile(pts, b1=b1, b2=b2):
            return b1.profile(pts) + b2.profile(pts)

        lo = min(c1, c2) - r
        hi = max(c2, c1) + r
        mid = (lo + hi) / 2
        fns.append(TestFunction(profile, d, (mid,) * d, (hi - lo) / 2 + 1e-9,
                                label=f"twobump({c1},{c2},r={r})"))
    return fns[:count]
