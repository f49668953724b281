"""Independent oracles.

Everything here deliberately avoids the library's own code paths: classical
norms go through scipy's QUADPACK, Mittag-Leffler references through
adaptive-precision mpmath series (switching to Talbot Laplace inversion when
the series cancellation exceeds the precision budget), and the fractional
relaxation equation through an L1 finite-difference stepper.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate as spi


def lp_norm_quad(fn, p0: float, a: float = 0.0, b: float = 1.0, vec=None) -> float:
    """(int |fn|**p0)**(1/p0) via adaptive QUADPACK.

    |fn| has corners at sign changes; QUADPACK needs them as breakpoints or
    its own error estimate climbs to ~1e-8.  They are located here with a
    sign scan plus scipy's brentq, independent of the library's machinery.
    ``vec`` optionally supplies vectorized evaluation for the scan.
    """
    from scipy import optimize

    xs = np.linspace(a, b, 16385)
    vals = vec(xs) if vec is not None else np.array([fn(x) for x in xs])
    s = np.sign(vals)
    zeros = []
    for i in np.nonzero(s[:-1] * s[1:] < 0)[0]:
        zeros.append(optimize.brentq(fn, xs[i], xs[i + 1], xtol=1e-14))
    val, _ = spi.quad(lambda x: abs(fn(x)) ** p0, a, b,
                      points=zeros or None, limit=500)
    return val ** (1.0 / p0)


def one_minus_log_modular(c: float) -> float:
    """int_0^1 c**(1 - ln x) dx = c / (1 - ln c); infinite for ln c >= 1."""
    if c <= 0:
        return 0.0
    if math.log(c) >= 1.0:
        return math.inf
    return c / (1.0 - math.log(c))


def ml_reference(alpha: float, beta: float, z: float) -> float:
    """High-precision E_{alpha,beta}(z) on the real axis.

    Power series with the working precision sized to the cancellation
    (max term ~ exp(|z|**(1/alpha))); beyond a 100-digit budget, Talbot
    numerical Laplace inversion of s**(a-b)/(s**a + x).
    """
    if z == 0.0:
        return 1.0 / math.gamma(beta)
    u = abs(z) ** (1.0 / alpha)
    if z > 0 or u < 100.0:
        mp.mp.dps = int(60 + 0.5 * u)
        aa, bb, zz = mp.mpf(alpha), mp.mpf(beta), mp.mpf(z)
        s = mp.mpf(0)
        for k in range(100000):
            t = zz ** k / mp.gamma(aa * k + bb)
            s += t
            if k > 50 and abs(t) < mp.mpf(10) ** -55 * max(abs(s), mp.mpf(10) ** -40):
                break
        return float(s)
    mp.mp.dps = 60
    fp = lambda s: s ** (mp.mpf(alpha) - mp.mpf(beta)) / (s ** mp.mpf(alpha) + mp.mpf(-z))
    return float(mp.invertlaplace(fp, 1.0, method="talbot", degree=100))


def l1_relaxation(gamma: float, a: float, x0: float, forcing, ts: np.ndarray) -> np.ndarray:
    """L1 scheme for D^gamma u = -a u + f, u(0) = x0, on a uniform grid."""
    n = ts.size
    dt = ts[1] - ts[0]
    b = np.array([(j + 1) ** (1 - gamma) - j ** (1 - gamma) for j in range(n)])
    f_vals = np.array([forcing(t) for t in ts])
    u = np.zeros(n)
    u[0] = x0
    c0 = dt ** gamma * math.gamma(2.0 - gamma)
    for k in range(1, n):
        hist = 0.0
        for j in range(1, k):
            hist += (b[k - j - 1] - b[k - j]) * u[j]
        rhs = b[k - 1] * u[0] + hist + c0 * f_vals[k]
        u[k] = rhs / (1.0 + c0 * a)
    return u


def sin_window_sq(t: float) -> float:
    """int_t^{t+1} sin(x)**2 dx = 1/2 - cos(2t+1) sin(1) / 2."""
    return 0.5 - math.cos(2.0 * t + 1.0) * math.sin(1.0) / 2.0


def exp_kernel_M(p0: float, rate: float = 1.0) -> float:
    """sum_k ||exp(-rate(.+k))||_{L^{p0}[0,1]} in closed form."""
    window = ((1.0 - math.exp(-p0 * rate)) / (p0 * rate)) ** (1.0 / p0)
    return window / (1.0 - math.exp(-rate))


def pell_shift_multipliers(count: int, limit: int = 20000) -> list[int]:
    """Integers k whose multiples of sqrt(2) approach integers: each kept k
    beats the previous record distance, so defects decrease along the list."""
    best = 1.0
    ks = []
    for k in range(2, limit):
        d = abs(k * math.sqrt(2.0) - round(k * math.sqrt(2.0)))
        if d < 0.8 * best:
            best = d
            ks.append(k)
    return ks[-count:]
