"""Fractional kernels, Mittag-Leffler functions, and resolvent families.

Mittag-Leffler evaluation is split by argument.  The power series with
compensated summation is used wherever double precision survives the
alternating cancellation, i.e. roughly |z|**(1/alpha) <= 9 (the spec'd
fixed threshold breaks down for small alpha, so the radius adapts).  For
real z < 0 and 0 < alpha < 1 the spectral representation

    E_{a,b}(z) = int_0^inf K(r) dr,
    K(r) = r^((1-b)/a)/(a*pi) * exp(-r^(1/a))
           * [r sin(pi(1-b)) - z sin(pi(1-b+a))] / (r^2 - 2rz cos(a pi) + z^2)

covers the rest; after u = r^(1/a) the integrand is smooth times
u^(a-b) e^(-u) and a graded panel rule reaches ~1e-12 relative.  Large
negative arguments can also use the algebraic asymptotic series
-sum z^-k / Gamma(b - a k); it is kept as an independent cross-check and
as the error estimate.  b >= 1+a is reduced first through
E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ContractError
from .functions import REAL, VectorFunction, _Closed
from .quadrature import integrate, integrate_power_weighted, panel_points
from .reports import FALSE, INCONCLUSIVE, TRUE, TestReport, fit_loglog_slope


def g_kernel(zeta: float, t) -> float | np.ndarray:
    """g_zeta(t) = t**(zeta-1) / Gamma(zeta) for zeta > 0, t > 0."""
    if zeta <= 0:
        raise ContractError("g kernel needs zeta > 0")
    ts = np.asarray(t, dtype=float)
    if np.any(ts <= 0):
        raise ContractError("g kernel is evaluated for t > 0")
    out = ts ** (zeta - 1.0) / math.gamma(zeta)
    return float(out) if np.isscalar(t) else out


def _series_radius(alpha: float) -> float:
    # keep max |term| ~ exp(|z|**(1/alpha)) below ~1e4: |z| <= 9.2**alpha
    return max(1.0, 9.2 ** alpha)


def _gamma_or_inf(x: float) -> float:
    if x <= 0.0 and x == math.floor(x):
        return math.inf  # poles of Gamma: reciprocal terms vanish
    try:
        return math.gamma(x)
    except (OverflowError, ValueError):
        return math.inf


def _ml_series(alpha, beta, zs, max_terms=300):
    """Kahan-compensated power series, vectorized over zs."""
    zs = np.asarray(zs, dtype=float)
    acc = np.zeros_like(zs)
    comp = np.zeros_like(zs)
    power = np.ones_like(zs)
    for k in range(max_terms):
        g = _gamma_or_inf(alpha * k + beta)
        if math.isinf(g):
            term = np.zeros_like(zs)
        else:
            term = power / g
        y = term - comp
        t = acc + y
        comp = (t - acc) - y
        acc = t
        power = power * zs
        if k > 4 and np.all(np.abs(term) <= 1e-18 * np.maximum(np.abs(acc), 1e-300)):
            break
    return acc


def _ml_asymptotic(alpha, beta, zs, terms=10):
    """-sum_{k=1..terms} z^-k / Gamma(beta - alpha k); error ~ first omitted
    term.  Valid for large negative z, 0 < alpha < 1."""
    zs = np.asarray(zs, dtype=float)
    acc = np.zeros_like(zs)
    err = np.zeros_like(zs)
    for k in range(1, terms + 1):
        g = _gamma_or_inf(beta - alpha * k)
        if not math.isinf(g):
            acc -= zs ** (-k) / g
    g_next = _gamma_or_inf(beta - alpha * (terms + 1))
    if not math.isinf(g_next):
        err = np.abs(zs ** (-(terms + 1)) / g_next)
    return acc, err


@lru_cache(maxsize=64)
def _spectral_nodes(depth: int = 88, upper: float = 60.0, panels: int = 140):
    """Quadrature nodes on (0, upper] for the u-substituted spectral kernel:
    dyadic toward 0 plus uniform panels."""
    ladder = 2.0 ** -np.arange(depth, -1, -1, dtype=float)
    edges = np.concatenate((ladder, np.linspace(1.0, upper, panels + 1)[1:]))
    pts, wts = panel_points(edges)
    return pts, wts, float(ladder[0])


def _ml_spectral(alpha, beta, zs):
    """Spectral integral for real zs < 0, 0 < alpha < 1, beta < 1 + alpha."""
    zs = np.asarray(zs, dtype=float)
    pts, wts, delta = _spectral_nodes()
    s1 = math.sin(math.pi * (1.0 - beta))
    s2 = math.sin(math.pi * (1.0 - beta + alpha))
    c = math.cos(math.pi * alpha)
    ua = pts ** alpha
    pref = pts ** (alpha - beta) * np.exp(-pts) / math.pi * wts
    z = zs[:, None]
    numer = ua[None, :] * s1 - z * s2
    denom = ua[None, :] ** 2 - 2.0 * ua[None, :] * c * z + z * z
    vals = (pref[None, :] * numer / denom).sum(axis=1)
    # innermost-cell moment of the u**(alpha-beta) weight (integrand limit
    # -s2/(pi z) as u -> 0); without it beta > alpha loses ~1e-6
    expo = alpha - beta + 1.0
    head = (delta ** expo / expo) * (-s2 / (math.pi * zs))
    return vals + head


def _reduce_beta(alpha, beta, zs, evaluator):
    """Apply E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a))/z until b < 1+a."""
    steps = 0
    b = beta
    while b >= 1.0 + alpha - 1e-12:
        steps += 1
        b -= alpha
    vals = evaluator(alpha, b, zs)
    for _ in range(steps):
        g = _gamma_or_inf(b)
        vals = (vals - (0.0 if math.isinf(g) else 1.0 / g)) / zs
        b += alpha
    return vals


def ml_values(alpha: float, beta: float, zs) -> np.ndarray:
    """Vectorized E_{alpha,beta} on real arguments (hot path for kernels)."""
    if not 0.0 < alpha <= 2.0:
        raise ContractError("alpha must lie in (0, 2]")
    if beta <= 0.0:
        raise ContractError("beta must be positive")
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    out = np.empty_like(zs)
    if alpha == 1.0 and beta == 1.0:
        return np.exp(zs)
    radius = _series_radius(alpha)
    small = np.abs(zs) <= radius
    neg = ~small & (zs < 0.0)
    rest = ~small & ~neg
    if np.any(small):
        out[small] = _ml_series(alpha, beta, zs[small])
    if np.any(neg):
        if 0.0 < alpha < 1.0:
            out[neg] = _reduce_beta(alpha, beta, zs[neg], _ml_spectral)
        else:
            out[neg] = _ml_series(alpha, beta, zs[neg], max_terms=500)
    if np.any(rest):
        out[rest] = _ml_series(alpha, beta, zs[rest], max_terms=500)
    return out


def mittag_leffler(alpha: float, beta: float, z: float) -> float:
    """E_{alpha,beta}(z) for real z."""
    return float(ml_values(alpha, beta, np.array([z]))[0])


def mittag_leffler_detailed(alpha: float, beta: float, z: float) -> dict:
    """Value plus method tag and an error estimate from an independent route."""
    value = mittag_leffler(alpha, beta, z)
    radius = _series_radius(alpha)
    degraded = False
    if abs(z) <= radius:
        method = "series"
        if z < 0 and 0 < alpha < 1:
            other = float(_reduce_beta(alpha, beta, np.array([z]), _ml_spectral)[0])
        else:
            other = value
    elif z < 0 and 0 < alpha < 1:
        method = "spectral-integral"
        asym, asym_err = _ml_asymptotic(alpha, beta, np.array([z]))
        other = float(asym[0] + math.copysign(min(float(asym_err[0]), abs(asym[0])), 0.0))
        other = float(asym[0])
        if abs(z) < 12.0:
            other = value  # asymptotic unreliable this close in
    else:
        method = "series-extended"
        other = value
        degraded = abs(z) > radius and not (alpha == 1.0 and beta == 1.0)
    err = abs(value - other) / max(abs(value), 1e-300)
    return {"value": value, "method": method, "error_estimate": err,
            "accuracy_degraded": bool(degraded or err > 1e-6)}


# -- resolvent families ---------------------------------------------------------


@dataclass(frozen=True)
class DecayModel:
    """Certified upper bound for ||R(t)||: C*exp(-rate*t) or C*t**exponent
    (the latter valid from t0 on and summable only when exponent < -1)."""

    kind: str
    C: float
    rate: float = 0.0
    exponent: float = 0.0
    t0: float = 1.0

    def bound(self, t):
        ts = np.asarray(t, dtype=float)
        if self.kind == "exponential":
            return self.C * np.exp(-self.rate * ts)
        return self.C * np.maximum(ts, self.t0) ** self.exponent

    def window_tail(self, start: float) -> float:
        """Bound on sum_{k>=0} sup_{[start+k, start+k+1]} ||R||."""
        if self.kind == "exponential":
            return self.C * math.exp(-self.rate * start) / (1.0 - math.exp(-self.rate))
        if self.exponent >= -1.0:
            return math.inf
        s = max(start, self.t0)
        # decreasing summand: first term + integral bound for the rest
        return self.C * s ** self.exponent + self.C * s ** (self.exponent + 1.0) / (-self.exponent - 1.0)


@dataclass(frozen=True)
class ResolventFamily:
    """Scalar or diagonal kernel family.

    kind "S": E_{g,1}(-a t**g); "P": E_{g,g}(-a t**g); "R": t**(g-1) P(t);
    "kernel": an explicit scalar kernel function.  gamma = 1 collapses all
    of S, P, R to exp(-a t).  beta enters decay estimates only.
    """

    kind: str
    gamma: float = 1.0
    generator: tuple = (1.0,)
    beta: float = 1.0
    kernel: VectorFunction | None = None
    decay: DecayModel | None = None

    def __post_init__(self):
        if self.kind not in ("S", "P", "R", "kernel"):
            raise ContractError(f"unknown resolvent kind {self.kind!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ContractError("gamma must lie in (0, 1]")
        gen = np.asarray(self.generator, dtype=float)
        if self.kind != "kernel" and np.any(gen <= 0):
            raise ContractError("generator entries must be positive (stable diagonal)")
        if self.kind == "kernel" and self.kernel is None:
            raise ContractError("kind='kernel' requires an explicit kernel")

    @property
    def dim(self) -> int:
        return self.kernel.dim if self.kind == "kernel" else len(self.generator)

    @property
    def singular_at_zero(self) -> bool:
        return self.kind == "R" and self.gamma < 1.0

    def values(self, ts) -> np.ndarray:
        """Kernel entries at positive times, shape (n, dim)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        if np.any(ts <= 0) and self.singular_at_zero:
            raise ContractError("R_gamma has a t**(gamma-1) singularity at t = 0")
        if self.kind == "kernel":
            return self.kernel.values(ts)
        gen = np.asarray(self.generator, dtype=float)
        cols = []
        for a in gen:
            z = -a * ts ** self.gamma
            if self.kind == "S":
                cols.append(ml_values(self.gamma, 1.0, z))
            elif self.kind == "P":
                cols.append(ml_values(self.gamma, self.gamma, z))
            else:
                cols.append(ts ** (self.gamma - 1.0) * ml_values(self.gamma, self.gamma, z))
        return np.stack(cols, axis=-1)

    def norm_values(self, ts) -> np.ndarray:
        return np.max(np.abs(self.values(ts)), axis=-1)

    def norm_function(self) -> VectorFunction:
        """||R(t)|| as a VectorFunction on (0, inf) for window norms."""
        return VectorFunction(_Closed(lambda ts: self.norm_values(ts)),
                              (0.0, math.inf), name=f"norm({self.kind}_gamma)")

    def decay_model(self) -> DecayModel:
        if self.decay is not None:
            return self.decay
        if self.gamma == 1.0 or self.kind == "kernel":
            if self.kind == "kernel":
                raise ContractError("explicit kernels need an explicit decay model")
            a_min = float(np.min(self.generator))
            return DecayModel("exponential", C=1.0, rate=a_min)
        probe = np.linspace(1.0, 80.0, 400)
        expo = {"S": -self.gamma, "P": -2.0 * self.gamma, "R": -1.0 - self.gamma}[self.kind]
        C = 1.25 * float(np.max(self.norm_values(probe) * probe ** (-expo)))
        return DecayModel("polynomial", C=C, exponent=expo)


def resolvent_eval(rf: ResolventFamily, t: float):
    """Kernel value at one time: a float for scalar families, else the
    diagonal entries."""
    out = rf.values(np.array([float(t)]))[0]
    return float(out[0]) if out.size == 1 else out


def exponential_kernel(rate: float = 1.0) -> ResolventFamily:
    """R(t) = exp(-rate t) packaged with its exact decay model."""
    from .functions import exp_decay

    return ResolventFamily(kind="kernel", gamma=1.0, kernel=exp_decay(rate, (0.0, math.inf)),
                           decay=DecayModel("exponential", C=1.0, rate=rate))


def decay_check(rf: ResolventFamily, t_grid=None, slope_horizon: float = 1e6) -> TestReport:
    """Verify the algebraic decay of S_gamma and P_gamma.

    Checks sup_t ||S(t)|| t**(gamma(1-beta)) over the full grid and, on
    [1, T], sup ||S|| t**gamma and sup ||P|| t**(2 gamma); fits the tail
    slopes, which should sit near -gamma and -2 gamma.  The slopes are the
    asymptotic rates, so the fit runs on a geometric grid out to
    ``slope_horizon``: the asymptotic regime needs t**gamma >> 1, which for
    small gamma lies far beyond the sup window.
    """
    ts = np.asarray(t_grid if t_grid is not None else np.geomspace(1.0, 100.0, 200))
    g = rf.gamma
    S = ResolventFamily("S", g, rf.generator, rf.beta)
    P = ResolventFamily("P", g, rf.generator, rf.beta)
    s_vals, p_vals = S.norm_values(ts), P.norm_values(ts)
    sup_pre = float(np.max(s_vals * ts ** (g * (1.0 - rf.beta))))
    on1 = ts >= 1.0
    M_s = float(np.max(s_vals[on1] * ts[on1] ** g))
    M_p = float(np.max(p_vals[on1] * ts[on1] ** (2.0 * g)))
    fit_ts = np.geomspace(max(1.0, float(ts.max())), slope_horizon, 120)
    slope_s = fit_loglog_slope(fit_ts, S.norm_values(fit_ts))
    slope_p = fit_loglog_slope(fit_ts, P.norm_values(fit_ts))
    ok = (math.isfinite(M_s) and math.isfinite(M_p)
          and abs(slope_s + g) <= 0.1 and abs(slope_p + 2.0 * g) <= 0.1)
    if g == 1.0:
        ok = math.isfinite(M_s) and math.isfinite(M_p)  # exponential beats any power
    return TestReport("resolvent-decay", TRUE if ok else FALSE,
                      value=max(M_s, M_p),
                      details={"M_S": M_s, "M_P": M_p, "sup_prefactor": sup_pre,
                               "slope_S": slope_s, "slope_P": slope_p,
                               "expected_slopes": (-g, -2.0 * g)})


# -- fractional derivatives ------------------------------------------------------


def caputo_derivative(u: VectorFunction, gamma: float, t: float, *,
                      h: float = 1e-3, full: bool = False):
    """Caputo derivative of order gamma in (0, 1] at time t.

    Computes the weakly singular convolution c(tau) = g_{1-gamma} * (u - u(0))
    on a graded mesh, then differentiates by a centered difference; gamma = 1
    short-circuits to du/dt.
    """
    if not 0.0 < gamma <= 1.0:
        raise ContractError("gamma must lie in (0, 1]")
    if t <= 0:
        raise ContractError("the Caputo derivative is evaluated at t > 0")
    if gamma == 1.0:
        val = (u.values(np.array([t + h]))[0] - u.values(np.array([t - h]))[0]) / (2 * h)
        return {"value": val, "error_estimate": 0.0, "accuracy_degraded": False} if full else val
    u0 = u.values(np.array([0.0]))[0]
    dim = u.dim
    coeff = 1.0 / math.gamma(1.0 - gamma)

    def conv(tau):
        comps = []
        errs = []
        for j in range(dim):
            fn = lambda s, j=j: u.values(tau - np.asarray(s))[:, j] - u0[j]
            v, e = integrate_power_weighted(fn, -gamma, tau, rel_tol=1e-12)
            comps.append(v)
            errs.append(e)
        return coeff * np.asarray(comps), coeff * float(np.max(errs))

    hi, e1 = conv(t + h)
    lo, e2 = conv(t - h)
    val = (hi - lo) / (2.0 * h)
    err = (e1 + e2) / (2.0 * h)
    val = val if dim > 1 else float(val[0])
    if full:
        degraded = err > 1e-6 * max(1.0, float(np.max(np.abs(val))))
        return {"value": val, "error_estimate": err, "accuracy_degraded": degraded}
    return val


def _dominant_half_period(u: VectorFunction, t: float, span: float = 60.0) -> float:
    lo = max(u.domain[0], t - span)
    ts = np.arange(lo, t, 0.01)
    if ts.size < 10:
        return math.pi
    vals = u.values(ts)[:, 0]
    vals = vals - vals.mean()
    s = np.sign(vals)
    crossings = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if crossings.size < 4:
        return math.pi
    return float(np.mean(np.diff(ts[crossings])))


def weyl_derivative(u: VectorFunction, gamma: float, t: float, *,
                    truncation: float = 200.0, h: float = 1e-3,
                    averaging_levels: int = 24, full: bool = False):
    """Weyl-Liouville derivative of order gamma in (0, 1] at time t.

    The tail convolution W(tau) = int_0^inf g_{1-gamma}(r) u(tau - r) dr
    converges only through oscillation, so a sharp cutoff at the truncation
    length leaves an O(T**-gamma) boundary wave.  The cutoff is therefore
    extended in half-period steps and the partial integrals are averaged
    repeatedly (Euler-style), which damps the wave to the recorded spread.
    The derivative is a centered difference; gamma = 1 is the sign-flipped
    ordinary derivative -du/dt.
    """
    if not 0.0 < gamma <= 1.0:
        raise ContractError("gamma must lie in (0, 1]")
    if gamma == 1.0:
        val = -(u.values(np.array([t + h]))[0] - u.values(np.array([t - h]))[0]) / (2 * h)
        val = val if u.dim > 1 else float(val[0])
        return {"value": val, "error_estimate": 0.0, "accuracy_degraded": False} if full else val
    coeff = 1.0 / math.gamma(1.0 - gamma)
    delta = _dominant_half_period(u, t)
    m = averaging_levels

    def tail_convolution(tau):
        comps = np.empty(u.dim)
        spreads = np.empty(u.dim)
        for j in range(u.dim):
            fn = lambda s, j=j: u.values(tau - np.asarray(s))[:, j]
            base, _ = integrate_power_weighted(fn, -gamma, truncation, rel_tol=1e-12)
            partials = [base]
            for i in range(m):
                lo = truncation + i * delta
                seg, _ = integrate(lambda s, j=j: np.asarray(s) ** -gamma * fn(s),
                                   lo, lo + delta, rel_tol=1e-12, max_doublings=6)
                partials.append(partials[-1] + seg)
            row = np.asarray(partials)
            while row.size > 1:
                row = 0.5 * (row[:-1] + row[1:])
            final_rows = np.asarray(partials)
            for _ in range(max(m - 3, 1)):
                final_rows = 0.5 * (final_rows[:-1] + final_rows[1:])
            comps[j] = coeff * float(row[0])
            spreads[j] = coeff * float(final_rows.max() - final_rows.min())
        return comps, float(spreads.max())

    hi, s1 = tail_convolution(t + h)
    lo_v, s2 = tail_convolution(t - h)
    val = (hi - lo_v) / (2.0 * h)
    tail_bound = (s1 + s2) / (2.0 * h)
    val = val if u.dim > 1 else float(val[0])
    if full:
        return {"value": val, "error_estimate": tail_bound,
                "accuracy_degraded": tail_bound > 1e-3}
    return val
