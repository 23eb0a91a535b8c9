"""Pure-python (numpy) reference kernels.

These mirror ``fracfield._fastkern`` exactly.  The wavelet filter loops
accumulate tap-by-tap in the same order as the compiled loops (and the
extension is built with FP contraction off), so both backends produce
bit-identical transforms.  The pair-energy sum uses a different summation
order and agrees with the compiled one to rounding only.
"""

import numpy as np


def dwt_analyze_level(mat, h, g):
    """One periodized analysis level along the last axis of a 2-d array.

    mat has shape (m, n) with n even; returns (low, high), each (m, n//2),
    where low[:, i] = sum_t h[t] * mat[:, (2i+t) mod n] and likewise for g.
    """
    m, n = mat.shape
    half = n // 2
    base = 2 * np.arange(half)
    low = np.zeros((m, half))
    high = np.zeros((m, half))
    for t in range(len(h)):
        col = mat[:, (base + t) % n]
        low += h[t] * col
        high += g[t] * col
    return low, high


def dwt_synthesize_level(low, high, h, g):
    """Inverse of :func:`dwt_analyze_level` (adjoint of the orthogonal map).

    out[(2i+t) mod n] accumulates h[t]*low[i] + g[t]*high[i]; the even and
    odd output combs are disjoint, so per-element accumulation order is the
    ascending-tap order of the compiled loop.
    """
    m, half = low.shape
    n = 2 * half
    even = np.zeros((m, half))
    odd = np.zeros((m, half))
    for t in range(len(h)):
        shift = t // 2
        dst = even if t % 2 == 0 else odd
        dst += np.roll(h[t] * low, shift, axis=1)
        dst += np.roll(g[t] * high, shift, axis=1)
    out = np.empty((m, n))
    out[:, 0::2] = even
    out[:, 1::2] = odd
    return out


def graph_energy_1d(values, spacing, rho, block=2048):
    """Double-sum energy of the graph of a 1-d sample path.

    Sums h^2 * (dx^2 + dv^2)^(-rho/2) over ordered pairs i != j, where
    dx = (i-j)*h.  Pairs closer than one grid spacing do not exist off the
    diagonal, so the diagonal is the only exclusion.
    """
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    x = spacing * np.arange(n)
    total = 0.0
    for start in range(0, n, block):
        stop = min(start + block, n)
        dx = x[start:stop, None] - x[None, :]
        dv = v[start:stop, None] - v[None, :]
        r2 = dx * dx + dv * dv
        idx = np.arange(start, stop)
        r2[idx - start, idx] = 1.0  # placeholder; masked out below
        w = r2 ** (-rho / 2.0)
        w[idx - start, idx] = 0.0
        total += float(w.sum())
    return total * spacing * spacing
