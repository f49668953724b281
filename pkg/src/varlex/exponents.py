"""Variable exponents p(x) on a closed interval.

An exponent is a measurable map into [1, inf].  Infinite values are
structural, not limits: they live in an explicit ``infinite_set`` (a finite
union of, possibly degenerate, intervals) and evaluation returns
``math.inf`` exactly there.  Closed forms carry their monotonicity so
essential bounds can be read off the endpoints; everything else falls back
to a dense evaluation grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractError, DomainError

INF = math.inf

#: Default density of the evaluation grid used for essential bounds, class
#: checks and pointwise preconditions.
GRID_POINTS = 10001


def _in_intervals(xs: np.ndarray, intervals) -> np.ndarray:
    mask = np.zeros(xs.shape, dtype=bool)
    for lo, hi in intervals:
        mask |= (xs >= lo) & (xs <= hi)
    return mask


@dataclass(frozen=True)
class ExponentFunction:
    """A variable exponent with structured metadata.

    ``fn`` evaluates the finite branch vectorized; points inside
    ``infinite_set`` are overridden to inf.  Instances are immutable and all
    operations on them are pure.
    """

    name: str
    fn: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (0.0, 1.0)
    params: dict = field(default_factory=dict)
    infinite_set: tuple[tuple[float, float], ...] = ()
    monotone: str | None = None  # "increasing" | "decreasing" | None

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ContractError(f"exponent domain must be a proper interval, got {self.domain}")
        xs = np.linspace(lo, hi, 501)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            raw = np.asarray(self.fn(xs), dtype=float)  # unclamped: catch real dips
        finite = raw[np.isfinite(raw)]
        if finite.size and finite.min() < 1.0 - 1e-9:
            raise ContractError(
                f"exponent {self.name!r} dips below 1 (min {finite.min():.6g} on check grid)"
            )

    # -- evaluation ---------------------------------------------------------

    def values(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        lo, hi = self.domain
        if xs.size and (xs.min() < lo - 1e-12 or xs.max() > hi + 1e-12):
            raise DomainError(
                f"exponent {self.name!r} evaluated outside its domain [{lo}, {hi}]"
            )
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = np.asarray(self.fn(xs), dtype=float)
        out = np.maximum(out, 1.0)  # guards roundoff at the p=1 boundary
        if self.infinite_set:
            out = np.where(_in_intervals(xs, self.infinite_set), INF, out)
        return out

    def eval(self, x: float) -> float:
        return float(self.values(np.array([x]))[0])

    __call__ = eval

    # -- essential bounds and classes ---------------------------------------

    def essential_bounds(self, grid_points: int = GRID_POINTS) -> tuple[float, float]:
        """(p-, p+) over the domain.

        Exact at the endpoints for monotone closed forms, otherwise the
        inf/sup over a dense grid.
        """
        lo, hi = self.domain
        if self.monotone in ("increasing", "decreasing"):
            ends = self.values(np.array([lo, hi]))
            return float(min(ends)), float(max(ends))
        vals = self.values(np.linspace(lo, hi, grid_points))
        return float(np.min(vals)), float(np.max(vals))

    def infinite_measure(self) -> float:
        return sum(hi - lo for lo, hi in self.infinite_set)

    def classify(self) -> str:
        """Coarsest class first: "C+" (1 < p- <= p+ < inf), "D+"
        (1 <= p- <= p+ < inf a.e.), or the generic "P"."""
        p_minus, p_plus = self.essential_bounds()
        if p_plus < INF and self.infinite_measure() == 0.0:
            return "C+" if p_minus > 1.0 else "D+"
        return "P"

    def is_constant(self, tol: float = 1e-12) -> bool:
        p_minus, p_plus = self.essential_bounds(513)
        if p_minus == p_plus:
            return True
        return math.isfinite(p_plus) and p_plus - p_minus <= tol * max(1.0, p_plus)


# -- registry closed forms ---------------------------------------------------


def constant(value: float, domain=(0.0, 1.0)) -> ExponentFunction:
    if value < 1.0:
        raise ContractError(f"constant exponent must be >= 1, got {value}")
    inf_set = (tuple(domain),) if value == INF else ()
    return ExponentFunction(
        name="constant",
        fn=lambda xs: np.full(np.shape(xs), min(value, 1e308)),
        domain=tuple(domain),
        params={"value": value},
        infinite_set=inf_set,
        monotone="increasing",  # trivially monotone: endpoint evaluation is exact
    )


def one_minus_log(domain=(0.0, 1.0)) -> ExponentFunction:
    """p(x) = 1 - ln x on (0, 1], with p(0) = inf."""
    lo, hi = domain
    if lo < 0.0 or hi > 1.0:
        raise ContractError("1 - ln x is an exponent only on subintervals of [0, 1]")

    def fn(xs):
        with np.errstate(divide="ignore"):
            return 1.0 - np.log(xs)

    inf_set = ((0.0, 0.0),) if lo == 0.0 else ()
    return ExponentFunction(
        name="one-minus-log",
        fn=fn,
        domain=tuple(domain),
        infinite_set=inf_set,
        monotone="decreasing",
    )


def affine(intercept: float, slope: float, domain=(0.0, 1.0)) -> ExponentFunction:
    return ExponentFunction(
        name="affine",
        fn=lambda xs: intercept + slope * np.asarray(xs, dtype=float),
        domain=tuple(domain),
        params={"intercept": intercept, "slope": slope},
        monotone="increasing" if slope >= 0 else "decreasing",
    )


def sinusoidal(offset: float = 2.0, amplitude: float = 1.0, frequency: float = 1.0,
               phase: float = 0.0, domain=(0.0, 1.0)) -> ExponentFunction:
    """p(x) = offset + amplitude * sin(2*pi*frequency*x + phase)."""
    return ExponentFunction(
        name="sinusoidal",
        fn=lambda xs: offset + amplitude * np.sin(2 * np.pi * frequency * np.asarray(xs) + phase),
        domain=tuple(domain),
        params={"offset": offset, "amplitude": amplitude, "frequency": frequency, "phase": phase},
    )


def from_grid(xs, ps, domain=None) -> ExponentFunction:
    """Piecewise-linear exponent through sample points (xs, ps)."""
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0):
        raise ContractError("exponent grid needs at least 2 strictly increasing abscissae")
    dom = tuple(domain) if domain is not None else (float(xs[0]), float(xs[-1]))
    return ExponentFunction(
        name="grid",
        fn=lambda q: np.interp(np.asarray(q, dtype=float), xs, ps),
        domain=dom,
        params={"n": int(xs.size)},
    )


def from_callable(name: str, fn, domain=(0.0, 1.0), infinite_set=()) -> ExponentFunction:
    """Wrap an arbitrary vectorized callable (used for derived exponents)."""
    return ExponentFunction(name=name, fn=fn, domain=tuple(domain), infinite_set=tuple(infinite_set))


# -- derived exponents --------------------------------------------------------


def _scan_level_set(p: ExponentFunction, level: float, tol: float = 1e-11):
    """Intervals (possibly degenerate) where p == level on a dense grid."""
    lo, hi = p.domain
    xs = np.linspace(lo, hi, GRID_POINTS)
    hit = np.abs(p.values(xs) - level) <= tol
    out = []
    i = 0
    while i < xs.size:
        if hit[i]:
            j = i
            while j + 1 < xs.size and hit[j + 1]:
                j += 1
            out.append((float(xs[i]), float(xs[j])))
            i = j + 1
        else:
            i += 1
    return tuple(out)


def conjugate(p: ExponentFunction) -> ExponentFunction:
    """q with 1/p(x) + 1/q(x) = 1; p=1 maps to q=inf and p=inf to q=1."""

    def fn(xs):
        vals = p.values(xs)
        out = np.empty_like(vals)
        one = np.isclose(vals, 1.0, rtol=0.0, atol=1e-13)
        infinite = np.isinf(vals)
        reg = ~(one | infinite)
        out[one] = INF
        out[infinite] = 1.0
        out[reg] = vals[reg] / (vals[reg] - 1.0)
        return out

    return ExponentFunction(
        name=f"conjugate({p.name})",
        fn=fn,
        domain=p.domain,
        infinite_set=_scan_level_set(p, 1.0),
    )


def combine_harmonic(p: ExponentFunction, r: ExponentFunction) -> ExponentFunction:
    """q with 1/q = 1/p + 1/r pointwise (the Hoelder exponent of p and r)."""
    if p.domain != r.domain:
        raise ContractError("exponents must share a domain")

    def fn(xs):
        pv, rv = p.values(xs), r.values(xs)
        with np.errstate(invalid="ignore"):
            inv = np.where(np.isinf(pv), 0.0, 1.0 / pv) + np.where(np.isinf(rv), 0.0, 1.0 / rv)
        return np.where(inv == 0.0, INF, 1.0 / np.maximum(inv, 1e-308))

    return ExponentFunction(name=f"harmonic({p.name},{r.name})", fn=fn, domain=p.domain)


def composition_exponent(p: ExponentFunction, r: ExponentFunction,
                         grid_points: int = 2001) -> ExponentFunction:
    """The exponent q = p*r/(p+r), with q = p wherever r = inf.

    Precondition (checked on the evaluation grid): r >= max(p, p/(p-1))
    pointwise.  The output satisfies 1 <= q < p wherever r is finite.
    """
    if p.domain != r.domain:
        raise ContractError("exponents must share a domain")
    xs = np.linspace(p.domain[0], p.domain[1], grid_points)
    pv, rv = p.values(xs), r.values(xs)
    with np.errstate(divide="ignore", invalid="ignore"):
        conj = np.where(pv == 1.0, INF, pv / np.maximum(pv - 1.0, 1e-308))
        conj = np.where(np.isinf(pv), 1.0, conj)
    required = np.maximum(pv, conj)
    bad = rv < required - 1e-9
    if np.any(bad):
        x_bad = xs[bad][0]
        raise ContractError(
            f"composition exponent needs r >= max(p, p/(p-1)); violated at x={x_bad:.6g} "
            f"(r={rv[bad][0]:.6g} < {required[bad][0]:.6g})"
        )

    def fn(qs):
        pq, rq = p.values(qs), r.values(qs)
        out = np.where(np.isinf(rq), pq, np.nan)
        both = ~np.isinf(rq)
        with np.errstate(invalid="ignore"):
            out[both] = pq[both] * rq[both] / (pq[both] + rq[both])
        return out

    q = ExponentFunction(name=f"composition({p.name},{r.name})", fn=fn, domain=p.domain)
    qv = q.values(xs)
    finite_r = ~np.isinf(rv)
    if np.any(qv[finite_r] >= pv[finite_r] + 1e-9) or np.any(qv[finite_r] < 1.0 - 1e-9):
        raise ContractError("composition exponent left [1, p(x)) on the check grid")
    return q


REGISTRY = {
    "constant": constant,
    "one-minus-log": one_minus_log,
    "affine": affine,
    "sinusoidal": sinusoidal,
    "grid": from_grid,
}
