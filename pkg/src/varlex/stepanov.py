"""Stepanov window norms and the decay tests built on them.

The window norm of f at offset t is the Luxemburg norm of x -> f(x+t) on
[0, 1]; its sup over offsets is the Stepanov norm.  Suprema over an
unbounded index set are approximated on a declared grid plus a local
golden-section refinement around the grid argmax -- window norms of the
registry functions are continuous in the offset, so grid-and-refine is
sound at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .exponents import ExponentFunction
from .functions import VectorFunction
from .modular import ModularPlan, luxemburg_norm
from .reports import FALSE, INCONCLUSIVE, TRUE, TestReport, fit_loglog_slope

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def window_norm(f: VectorFunction, p: ExponentFunction, t: float, *,
                rel_tol: float = 1e-10) -> float:
    """Luxemburg norm of x -> f(x+t) over [0, 1]."""
    lo, hi = f.domain
    if t < lo - 1e-9 or t + 1.0 > hi + 1e-9:
        raise DomainError(f"window [{t:g}, {t + 1:g}] outside the domain of {f.name}")
    return luxemburg_norm(f.translate(t), p, (0.0, 1.0), rel_tol=rel_tol).value


@dataclass
class WindowNormSeries:
    base_points: np.ndarray
    values: np.ndarray
    exponent: ExponentFunction
    sup_estimate: float
    argmax: float = math.nan
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(self.values < -1e-15):
            raise ValueError("window norms are nonnegative")


def stepanov_norm(f: VectorFunction, p: ExponentFunction, t_grid, *,
                  refine: bool = True, rel_tol: float = 1e-8) -> WindowNormSeries:
    """Window norms over t_grid with a refined sup estimate."""
    t_grid = np.asarray(t_grid, dtype=float)
    vals = np.array([window_norm(f, p, t, rel_tol=rel_tol) for t in t_grid])
    i = int(np.argmax(vals))
    sup, arg = float(vals[i]), float(t_grid[i])
    if refine and t_grid.size >= 2:
        lo = t_grid[max(i - 1, 0)]
        hi = t_grid[min(i + 1, t_grid.size - 1)]
        sup, arg = _golden_max(lambda t: window_norm(f, p, t, rel_tol=rel_tol),
                               lo, hi, seed=(arg, sup))
    return WindowNormSeries(t_grid, vals, p, sup, arg)


def _golden_max(fn, lo, hi, seed, iters: int = 24):
    best_t, best_v = seed
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
        else:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        for t, v in ((c, fc), (d, fd)):
            if v > best_v:
                best_t, best_v = t, v
    return best_v, best_t


def _decay_grid(horizon: float) -> np.ndarray:
    """0, 0.5, 1, 2, 4, ... up to the horizon."""
    pts = [0.0, 0.5]
    t = 1.0
    while t < horizon:
        pts.append(t)
        t *= 2.0
    pts.append(float(horizon))
    return np.unique(np.asarray(pts))


def c0_decay_test(w: VectorFunction, p: ExponentFunction, horizon: float, *,
                  tolerance: float = 1e-3, t_grid=None) -> TestReport:
    """Do the window norms of w vanish at infinity?

    true: the last norms sit below the tolerance and the log-log tail slope
    is negative.  false: the tail is flat or growing well above tolerance.
    Anything else (including a horizon too short to tell) is inconclusive.
    """
    lo, hi = w.domain
    grid = np.asarray(t_grid, dtype=float) if t_grid is not None else _decay_grid(horizon)
    if grid.size and grid[-1] + 1.0 > hi + 1e-9:
        return TestReport("c0-decay", INCONCLUSIVE, tolerance=tolerance,
                          details={"cause": "samples do not reach the horizon"})
    norms = np.array([window_norm(w, p, t, rel_tol=1e-8) for t in grid])
    series = list(zip(grid.tolist(), norms.tolist()))
    tail = max(2, grid.size // 2)
    slope = fit_loglog_slope(np.maximum(grid[-tail:], 1e-6), norms[-tail:])
    last = float(norms[-1])
    # a tail sitting entirely below tolerance counts as decayed even when the
    # slope fit is dominated by a sub-tolerance noise floor
    if (last <= tolerance and (slope < -0.1 or last == 0.0)) or \
            bool(np.all(norms[-tail:] <= tolerance)):
        verdict = TRUE
    elif float(np.min(norms[-tail:])) > 10.0 * tolerance and not (slope < -0.02):
        verdict = FALSE
    else:
        verdict = INCONCLUSIVE
    return TestReport("c0-decay", verdict, value=last, series=series,
                      tolerance=tolerance, details={"tail_slope": slope})


def ergodic_mean_test(phi: VectorFunction, r_max: float, *,
                      tolerance: float = 1e-2, sample_step: float = 0.01) -> TestReport:
    """Does the symmetric Cesaro mean of ||phi|| vanish?

    M(r) = (1/2r) * integral of ||phi|| over [-r, r], evaluated on doubling
    radii.  The integrand has kinks at the zeros of phi, so a dense
    trapezoid rule is used; accuracy needs here are modest.
    """
    radii = []
    r = 1.0
    while r < r_max:
        radii.append(r)
        r *= 2.0
    radii.append(float(r_max))
    radii = np.unique(np.asarray(radii))
    means = []
    for r in radii:
        ts = np.arange(-r, r + sample_step, sample_step)
        vals = phi.norm_values(ts)
        means.append(float(np.trapezoid(vals, ts) / (2.0 * r)))
    means = np.asarray(means)
    series = list(zip(radii.tolist(), means.tolist()))
    tail = max(2, radii.size // 2)
    slope = fit_loglog_slope(radii[-tail:], means[-tail:])
    decreasing = bool(np.all(np.diff(means[-tail:]) <= 1e-12))
    last = float(means[-1])
    if last <= tolerance and slope < -0.1 and decreasing:
        verdict = TRUE
    elif last > 10.0 * tolerance and not (slope < -0.02):
        verdict = FALSE
    else:
        verdict = INCONCLUSIVE
    return TestReport("ergodic-mean", verdict, value=last, series=series,
                      tolerance=tolerance, details={"tail_slope": slope})
