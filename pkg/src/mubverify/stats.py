"""Chernoff-bound confidence, infidelity inversion and scaling fits.

All divergences are in nats: the exponent is exp(-N D(m/N || 1 - Delta)).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _scipy_stats

from . import _backend
from .errors import DegenerateFit, DomainError, GridMismatch, NonConvergence, NotAchievable

BISECTION_TOL = 1e-15
BISECTION_MAX_ITER = 200
STANDARD_QUANTUM_LIMIT = -0.5
HEISENBERG_LIMIT = -1.0
PLATEAU_FACTOR = 1.1
SHOT_NOISE_POINTS = 20


def kl_divergence(x, y):
    """Bernoulli relative entropy D(x || y) in nats.

    Uses 0 ln(0/y) = 0. A boundary ``y`` (0 or 1) is accepted only together
    with ``x`` on the matching side, giving +inf or 0.
    """
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    if not 0.0 <= y <= 1.0:
        raise DomainError(f"y must lie in [0, 1], got {y}")
    if y in (0.0, 1.0) and x not in (0.0, 1.0):
        raise DomainError(f"y={y} is on the boundary while x={x} is not")
    if x == y:
        return 0.0
    if y in (0.0, 1.0):
        return math.inf
    total = 0.0
    if x > 0:
        total += x * math.log(x / y)
    if x < 1:
        total += (1 - x) * math.log((1 - x) / (1 - y))
    return max(total, 0.0)


def _check_record(n, m):
    if n < 1 or not 0 <= m <= n:
        raise DomainError(f"need 0 <= m <= n and n >= 1, got n={n}, m={m}")


def _check_lambda2(lambda2):
    if not 0.0 <= lambda2 < 1.0:
        raise DomainError(f"lambda2 must lie in [0, 1), got {lambda2}")


def confidence_delta(n, m, epsilon, lambda2) -> float:
    """delta such that 1 - delta is the confidence in average fidelity > 1 - epsilon.

    Returns 1 when the pass rate does not exceed 1 - (1 - lambda2) epsilon.
    """
    _check_record(n, m)
    _check_lambda2(lambda2)
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    threshold = 1.0 - (1.0 - lambda2) * epsilon
    rate = m / n
    if rate <= threshold:
        return 1.0
    return math.exp(-n * kl_divergence(rate, threshold))


def confidence_curve(n, m, epsilon, lambda2):
    """Vectorized ``confidence_delta`` over arrays of (n, m)."""
    n = np.asarray(n, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    _check_lambda2(lambda2)
    threshold = 1.0 - (1.0 - lambda2) * epsilon
    rate = m / n
    delta = np.exp(-n * _backend.kl_divergence(rate, np.full_like(rate, threshold)))
    return np.where(rate <= threshold, 1.0, delta)


def epsilon_curve(n, m, delta, lambda2):
    """Vectorized ``solve_epsilon``; NaN where no record can certify (m = 0)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    _check_lambda2(lambda2)
    n = np.asarray(n, dtype=np.float64)
    m = np.asarray(m, dtype=np.float64)
    c = math.log(1.0 / delta) / n
    y, iterations = _backend.solve_y(m / n, c, BISECTION_TOL, BISECTION_MAX_ITER)
    if iterations >= BISECTION_MAX_ITER:
        raise NonConvergence(f"bisection hit the {BISECTION_MAX_ITER}-iteration cap")
    return (1.0 - y) / (1.0 - lambda2)


def solve_epsilon(n, m, delta, lambda2) -> float:
    """Smallest epsilon certified at confidence 1 - delta by m passes out of n.

    Solves n D(m/n || y) = ln(1/delta) for y below m/n by bisection and maps
    back through y = 1 - (1 - lambda2) epsilon. The result exceeds 1 when the
    record is too short to certify any meaningful fidelity.
    """
    _check_record(n, m)
    if m == 0:
        raise NotAchievable("no passing copies: no threshold below the pass rate exists")
    return float(epsilon_curve([n], [m], delta, lambda2)[0])


def asymptotic_epsilon(pass_rate, lambda2) -> float:
    """Infidelity implied by a pass rate taken as 1 - (1 - lambda2) epsilon."""
    _check_lambda2(lambda2)
    if not lambda2 <= pass_rate <= 1.0:
        raise DomainError(f"pass rate must lie in [lambda2, 1] = [{lambda2}, 1], got {pass_rate}")
    return (1.0 - pass_rate) / (1.0 - lambda2)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    slope_stderr: float
    intercept: float
    fit_window: tuple
    n_points: int


def fit_scaling(points, window=None) -> ScalingFit:
    """OLS of ln(epsilon) on ln(n) over the points with n inside ``window``."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n, eps = pts[:, 0], pts[:, 1]
    keep = np.isfinite(eps) & (eps > 0)
    if window is not None:
        lo, hi = window
        keep &= (n >= lo) & (n <= hi)
    n, eps = n[keep], eps[keep]
    if np.unique(n).size < 3:
        raise DegenerateFit(f"need at least 3 distinct n inside the window, got {np.unique(n).size}")
    res = _scipy_stats.linregress(np.log(n), np.log(eps))
    return ScalingFit(
        slope=float(res.slope),
        slope_stderr=float(res.stderr),
        intercept=float(res.intercept),
        fit_window=(int(n.min()), int(n.max())),
        n_points=int(n.size),
    )


def window_mask(n, eps, final_pass_rate, lambda2):
    """Points of an epsilon(N) curve that belong to its falling part.

    Skips the first ``SHOT_NOISE_POINTS`` grid points and every point at or
    below ``PLATEAU_FACTOR`` times the plateau level implied by the final
    pass rate.
    """
    eps = np.asarray(eps, dtype=np.float64)
    plateau = (1.0 - final_pass_rate) / (1.0 - lambda2)
    keep = np.isfinite(eps) & (eps > PLATEAU_FACTOR * plateau)
    keep[:SHOT_NOISE_POINTS] = False
    return keep


def default_fit_window(n, eps, final_pass_rate, lambda2):
    """(n_low, n_high) span of ``window_mask``, or None when it is empty."""
    keep = window_mask(n, eps, final_pass_rate, lambda2)
    if not keep.any():
        return None
    n = np.asarray(n)[keep]
    return int(n.min()), int(n.max())


def slope_sigma_excess(slope, stderr, bound=STANDARD_QUANTUM_LIMIT) -> float:
    """How many standard errors a slope lies below ``bound`` (0 if not below)."""
    if not stderr > 0:
        raise DomainError(f"stderr must be positive, got {stderr}")
    if slope >= bound:
        return 0.0
    return (bound - slope) / stderr


def aggregate_trials(curves):
    """Pointwise mean and sample stddev across trials sharing one n grid.

    ``curves`` is a sequence of (n, values) pairs. NaN entries are skipped
    point by point; the stddev is NaN where fewer than two values remain.
    Returns (n, mean, stddev).
    """
    curves = list(curves)
    if not curves:
        raise GridMismatch("no curves to aggregate")
    grid = np.asarray(curves[0][0])
    stack = []
    for t, (n, values) in enumerate(curves):
        if not np.array_equal(np.asarray(n), grid):
            raise GridMismatch(f"trial {t} uses a different n grid")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != grid.shape:
            raise GridMismatch(f"trial {t} has {values.size} values for {grid.size} grid points")
        stack.append(values)
    return (grid,) + _mean_std(np.vstack(stack))


def _mean_std(stack):
    finite = np.isfinite(stack)
    count = finite.sum(axis=0)
    filled = np.where(finite, stack, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = filled.sum(axis=0) / count
        dev = np.where(finite, stack - mean, 0.0)
        std = np.sqrt((dev**2).sum(axis=0) / (count - 1))
    std = np.where(count >= 2, std, np.nan)
    mean = np.where(count >= 1, mean, np.nan)
    return mean, std


def aggregate_slopes(slopes):
    """Mean and sample stddev of per-trial slopes."""
    slopes = np.asarray(slopes, dtype=np.float64)
    if slopes.size == 0:
        raise DegenerateFit("no slopes to aggregate")
    mean, std = _mean_std(slopes[:, None])
    return float(mean[0]), float(std[0])
