"""Composition principles: membership of t -> f(t, u(t)) in window-norm
classes, via exponent arithmetic and Lipschitz window estimates.

Relative compactness of a trajectory's range is replaced by the decidable
surrogate "bounded grid range" (bounded subsets of R^d are relatively
compact, so this is faithful at desk scale); the report records the
surrogate.  Empirical Lipschitz constants are max difference quotients
over sample pairs and may underestimate; that risk is disclosed in the
report rather than papered over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .almost_automorphy import ShiftTestReport, bochner_shift_test
from .errors import ContractError, DomainError
from .exponents import ExponentFunction, composition_exponent
from .functions import VectorFunction, from_grid
from .reports import FALSE, INCONCLUSIVE, TRUE, TestReport
from .stepanov import WindowNormSeries, c0_decay_test, stepanov_norm


@dataclass(frozen=True)
class TwoParameterFunction:
    """f(t, y) with t real and y scalar (stands in for a compact range in a
    general state space).  ``lipschitz`` optionally declares an exact
    Lipschitz function t -> L_f(t)."""

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    y_range: tuple[float, float] = (-1.0, 1.0)
    lipschitz: VectorFunction | None = None

    def values(self, ts, ys) -> np.ndarray:
        ts = np.asarray(ts, dtype=float)
        ys = np.asarray(ys, dtype=float)
        lo, hi = self.y_range
        if ys.size and (ys.min() < lo - 1e-9 or ys.max() > hi + 1e-9):
            raise DomainError(
                f"{self.name}: state outside declared range [{lo:g}, {hi:g}]")
        return np.asarray(self.fn(ts, ys), dtype=float)


def product_two_parameter(name="sin-gain") -> TwoParameterFunction:
    """f(t, y) = sin(t) * y, with exact Lipschitz function |sin t|."""
    from .functions import _Closed

    L = VectorFunction(_Closed(lambda ts: np.abs(np.sin(ts))), (-math.inf, math.inf),
                       name="abs-sin")
    return TwoParameterFunction(name, lambda ts, ys: np.sin(ts) * ys, (-5.0, 5.0), L)


def identity_in_y() -> TwoParameterFunction:
    from .functions import constant

    return TwoParameterFunction("identity-y", lambda ts, ys: ys, (-10.0, 10.0),
                                constant(1.0))


def tanh_gain() -> TwoParameterFunction:
    """(sin t + sin sqrt2 t) * tanh(y)."""
    s2 = math.sqrt(2.0)
    return TwoParameterFunction(
        "two-sine-tanh",
        lambda ts, ys: (np.sin(ts) + np.sin(s2 * ts)) * np.tanh(ys),
        (-5.0, 5.0))


def compose(f: TwoParameterFunction, u: VectorFunction, t_grid) -> VectorFunction:
    """Grid function t -> f(t, u(t))."""
    if u.dim != 1:
        raise ContractError("composition drives a scalar state")
    t_grid = np.asarray(t_grid, dtype=float)
    ys = u.values(t_grid)[:, 0]
    vals = f.values(t_grid, ys)
    return from_grid(t_grid, vals)


def empirical_lipschitz(f: TwoParameterFunction, t_grid, y_samples,
                        min_gap: float = 1e-6) -> VectorFunction:
    """max over sample pairs of |f(t,y_i) - f(t,y_j)| / |y_i - y_j|."""
    t_grid = np.asarray(t_grid, dtype=float)
    ys = np.asarray(y_samples, dtype=float)
    if ys.size < 2:
        raise ContractError("need at least two state samples")
    table = np.stack([f.values(t_grid, np.full(t_grid.shape, y)) for y in ys])
    L = np.zeros(t_grid.size)
    for i in range(ys.size):
        for j in range(i + 1, ys.size):
            gap = abs(ys[i] - ys[j])
            if gap < min_gap:
                continue
            L = np.maximum(L, np.abs(table[i] - table[j]) / gap)
    return from_grid(t_grid, L)


def lipschitz_window_check(f: TwoParameterFunction, r: ExponentFunction, t_grid,
                           y_samples) -> WindowNormSeries:
    """Stepanov r(x) window norms of the empirical Lipschitz function."""
    t_grid = np.asarray(t_grid, dtype=float)
    L = empirical_lipschitz(f, t_grid, y_samples)
    win_grid = t_grid[t_grid <= t_grid.max() - 1.0]
    series = stepanov_norm(L, r, win_grid[:: max(1, win_grid.size // 64)], rel_tol=1e-7)
    series.details["empirical"] = True
    series.details["underestimation_risk"] = "difference quotients over finite samples"
    if f.lipschitz is not None:
        declared = f.lipschitz.values(t_grid)[:, 0]
        series.details["exceeds_declared"] = bool(
            np.any(L.values(t_grid)[:, 0] > declared + 1e-8))
    series.details["bounded"] = bool(math.isfinite(series.sup_estimate))
    return series


@dataclass
class CompositionReport:
    q_exponent: ExponentFunction
    lipschitz_window_norms: WindowNormSeries | None
    composed: VectorFunction | None  # None when a precondition already failed
    membership: ShiftTestReport | TestReport
    verdict: str
    details: dict = field(default_factory=dict)


def composition_membership_test(f: TwoParameterFunction, u: VectorFunction,
                                p: ExponentFunction, r: ExponentFunction,
                                shifts, t_grid=None, *, tolerance: float = 0.1,
                                grid_step: float = 1.0 / 64.0,
                                y_samples=None,
                                also_constant_floor: bool = True) -> CompositionReport:
    """Does f(., u(.)) inherit u's almost automorphy at the composed exponent?

    Preconditions checked: u passes the shift test at exponent p and has
    bounded grid range (the compactness surrogate).  The composed exponent
    is q = p*r/(p+r); because the hypothesis-vs-conclusion exponent is
    stated ambiguously in parts of the literature, the test optionally also
    reports the verdict at the constant floor exponent q-.
    """
    t_grid = np.asarray(t_grid if t_grid is not None else np.arange(-2.0, 2.5, 0.5))
    shifts = [float(s) for s in shifts]
    q = composition_exponent(p, r)

    u_pre = bochner_shift_test(u, p, shifts, t_grid, tolerance=tolerance)
    span = (min(t_grid.min(), 0.0) + min(shifts + [0.0]) - 1.0,
            max(t_grid.max(), 0.0) + max(shifts + [0.0]) + 2.0)
    dense = np.arange(span[0], span[1] + grid_step, grid_step)
    u_dense = u.values(dense)[:, 0]
    y_lo, y_hi = f.y_range
    in_range = bool(u_dense.min() >= y_lo - 1e-9 and u_dense.max() <= y_hi + 1e-9)
    details = {
        "u_verdict": u_pre.verdict,
        "range_bounded": in_range,
        "range": (float(u_dense.min()), float(u_dense.max())),
    }
    if u_pre.verdict != TRUE or not in_range:
        details["cause"] = "precondition failed: " + (
            "u shift test " + u_pre.verdict if u_pre.verdict != TRUE
            else "trajectory leaves the declared state range")
        return CompositionReport(q, None, None, u_pre, INCONCLUSIVE, details)
    composed = compose(f, u, dense)
    lw = None
    if y_samples is not None:
        lw = lipschitz_window_check(f, r, dense, y_samples)

    membership = bochner_shift_test(composed, q, shifts, t_grid, tolerance=tolerance)
    details["q_bounds"] = q.essential_bounds()
    if also_constant_floor:
        q_floor = q.essential_bounds()[0]
        from .exponents import constant as const_exp

        floor_rep = bochner_shift_test(composed, const_exp(max(1.0, q_floor)),
                                       shifts, t_grid, tolerance=tolerance)
        details["constant_floor_verdict"] = floor_rep.verdict
    return CompositionReport(q, lw, composed, membership, membership.verdict, details)


def asymptotic_composition_test(g: TwoParameterFunction, v: VectorFunction,
                                perturbations, p: ExponentFunction,
                                r: ExponentFunction, shifts, t_grid=None, *,
                                tolerance: float = 0.1, horizon: float = 60.0,
                                decay_tolerance: float = 1e-3) -> CompositionReport:
    """Asymptotic variant: f = g + q_pert, u = v + omega.

    Runs the membership test on the principal pair (g, v), then checks that
    the residual f(., u(.)) - g(., v(.)) has vanishing window norms at the
    composed exponent.
    """
    q_pert, omega = perturbations
    base = composition_membership_test(g, v, p, r, shifts, t_grid, tolerance=tolerance)
    if base.verdict == INCONCLUSIVE:
        return base
    grid_step = 1.0 / 64.0
    dense = np.arange(0.0, horizon + 1.0 + grid_step, grid_step)
    u_vals = v.values(dense)[:, 0]
    if omega is not None:
        u_vals = u_vals + omega.values(dense)[:, 0]
    g_vals = g.values(dense, v.values(dense)[:, 0])
    f_vals = g_vals + (q_pert.values(dense, u_vals) if q_pert is not None else 0.0)
    # f evaluated along the perturbed trajectory
    f_along_u = (g.values(dense, u_vals)
                 + (q_pert.values(dense, u_vals) if q_pert is not None else 0.0))
    residual = from_grid(dense, f_along_u - g_vals)
    decay = c0_decay_test(residual, base.q_exponent, horizon, tolerance=decay_tolerance)
    if base.verdict == TRUE and decay.verdict == TRUE:
        verdict = TRUE
    elif FALSE in (base.verdict, decay.verdict):
        verdict = FALSE
    else:
        verdict = INCONCLUSIVE
    base.details["residual_decay"] = decay.to_dict()
    return CompositionReport(base.q_exponent, base.lipschitz_window_norms,
                             base.composed, base.membership, verdict, base.details)
