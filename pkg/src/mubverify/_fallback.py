"""Pure numpy implementations of the hot kernels.

Same signatures and the same floating-point decisions as ``_kernels.pyx``,
so the two backends agree bit-for-bit on sampling.
"""

import numpy as np

NAME = "python"


def sample_outcomes(uniforms, cdf, last):
    """Map pairs of uniforms to (setting, joint outcome) indices.

    ``uniforms[c, 0]`` picks the setting ``floor(u * S)`` out of ``S`` rows,
    ``uniforms[c, 1]`` picks the first outcome ``j`` with ``u < cdf[s, j]``,
    capped at ``last[s]`` (the last outcome with nonzero probability).
    """
    uniforms = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdf = np.ascontiguousarray(cdf, dtype=np.float64)
    last = np.ascontiguousarray(last, dtype=np.int64)
    n_settings = cdf.shape[0]
    settings = (uniforms[:, 0] * n_settings).astype(np.int64)
    np.minimum(settings, n_settings - 1, out=settings)
    outcomes = np.empty(len(uniforms), dtype=np.int64)
    for s in range(n_settings):
        mask = settings == s
        picked = np.searchsorted(cdf[s], uniforms[mask, 1], side="right")
        outcomes[mask] = np.minimum(picked, last[s])
    return settings, outcomes


def kl_divergence(x, y):
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    x, y = np.broadcast_arrays(x, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(x > 0, x * np.log(x / y), 0.0)
        second = np.where(x < 1, (1 - x) * np.log((1 - x) / (1 - y)), 0.0)
    return first + second


def solve_y(x, c, tol, max_iter):
    """Largest y in [0, x] with D(x || y) >= c, by bisection.

    Returns ``(y, iterations)``; y is NaN where x <= 0.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    lo = np.zeros_like(x)
    hi = x.copy()
    active = (x > 0) & (c > 0)
    iterations = 0
    while iterations < max_iter:
        open_ = active & (hi - lo > tol)
        if not open_.any():
            break
        idx = np.flatnonzero(open_)
        mid = 0.5 * (lo[idx] + hi[idx])
        above = kl_divergence(x[idx], mid) >= c[idx]
        lo[idx[above]] = mid[above]
        hi[idx[~above]] = mid[~above]
        iterations += 1
    y = np.where(c > 0, lo, x)
    y[x <= 0] = np.nan
    return y, iterations
