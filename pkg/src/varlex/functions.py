"""Functions under analysis: forcing terms, counterexamples, perturbations.

A ``VectorFunction`` maps an interval of the line into R^d.  It is either a
registry closed form, a uniformly sampled grid (linear interpolation), or a
derived combination (translate, reflect, sign, linear combination, product,
average of translates).  Derived forms keep enough structure for the
quadrature layer to ask two questions: evaluate me on these points, and
where do I jump inside [a, b]?
"""

from __future__ import annotations

import csv
import math

import numpy as np

from .errors import ContractError, DomainError

REAL = (-math.inf, math.inf)
HALF = (0.0, math.inf)

SQRT2 = math.sqrt(2.0)


# -- internal nodes -----------------------------------------------------------


class _Closed:
    """Closed-form node: vectorized callable plus optional jump knowledge."""

    def __init__(self, fn, dim=1, jump_fn=None):
        self.fn = fn
        self.dim = dim
        self.jump_fn = jump_fn

    def values(self, ts):
        out = np.asarray(self.fn(ts), dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        return out

    def jumps(self, a, b):
        return self.jump_fn(a, b) if self.jump_fn else np.empty(0)


class _Grid:
    def __init__(self, ts, samples):
        self.ts = np.asarray(ts, dtype=float)
        self.samples = np.asarray(samples, dtype=float)
        if self.samples.ndim == 1:
            self.samples = self.samples[:, None]
        if self.ts.ndim != 1 or self.ts.size != self.samples.shape[0]:
            raise ContractError("grid abscissae and samples must align")
        if self.ts.size < 2 or np.any(np.diff(self.ts) <= 0):
            raise ContractError("grid abscissae must be strictly increasing")
        if not np.all(np.isfinite(self.samples)):
            raise ContractError("grid samples must be finite")
        self.dim = self.samples.shape[1]

    def values(self, ts):
        ts = np.asarray(ts, dtype=float)
        cols = [np.interp(ts, self.ts, self.samples[:, j]) for j in range(self.dim)]
        return np.stack(cols, axis=-1)

    def jumps(self, a, b):
        return np.empty(0)


class _Affine:
    """Evaluation-point reparametrization t -> orient*t + offset."""

    def __init__(self, base, orient, offset):
        if isinstance(base, _Affine):  # collapse towers
            orient, offset, base = orient * base.orient, base.orient * offset + base.offset, base.base
        self.base, self.orient, self.offset = base, orient, offset
        self.dim = base.dim

    def values(self, ts):
        return self.base.values(self.orient * np.asarray(ts, dtype=float) + self.offset)

    def jumps(self, a, b):
        u, v = sorted((self.orient * a + self.offset, self.orient * b + self.offset))
        inner = self.base.jumps(u, v)
        return np.sort((np.asarray(inner) - self.offset) / self.orient)


class _Sign:
    def __init__(self, base):
        if base.dim != 1:
            raise ContractError("sign is defined for scalar functions only")
        self.base = base
        self.dim = 1

    def values(self, ts):
        return np.sign(self.base.values(ts))

    def jumps(self, a, b):
        return _bracket_roots(lambda ts: self.base.values(ts)[:, 0], a, b)


class _LinComb:
    def __init__(self, terms):
        dims = {node.dim for _, node in terms}
        if len(dims) != 1:
            raise ContractError("linear combination needs matching dimensions")
        self.terms = terms
        self.dim = dims.pop()

    def values(self, ts):
        acc = self.terms[0][0] * self.terms[0][1].values(ts)
        for c, node in self.terms[1:]:
            acc = acc + c * node.values(ts)
        return acc

    def jumps(self, a, b):
        parts = [node.jumps(a, b) for _, node in self.terms]
        return np.unique(np.concatenate([np.asarray(p, dtype=float) for p in parts]))


class _Product:
    def __init__(self, u, v):
        if u.dim != 1 and v.dim != 1:
            raise ContractError("product needs at least one scalar factor")
        self.u, self.v = u, v
        self.dim = max(u.dim, v.dim)

    def values(self, ts):
        return self.u.values(ts) * self.v.values(ts)

    def jumps(self, a, b):
        return np.unique(np.concatenate([np.asarray(self.u.jumps(a, b), dtype=float),
                                         np.asarray(self.v.jumps(a, b), dtype=float)]))


class _MeanOfTranslates:
    def __init__(self, base, taus):
        self.base = base
        self.taus = np.asarray(taus, dtype=float)
        self.dim = base.dim

    def values(self, ts):
        ts = np.asarray(ts, dtype=float)
        acc = self.base.values(ts + self.taus[0])
        for tau in self.taus[1:]:
            acc = acc + self.base.values(ts + tau)
        return acc / self.taus.size

    def jumps(self, a, b):
        return np.empty(0)  # averaged jumps are smeared; treated as regular


def _bracket_roots(f, a, b, step=0.005, refine=48):
    """Zero crossings of f on [a, b]: coarse sign scan, then bisection run
    simultaneously over all bracketed crossings."""
    if b <= a:
        return np.empty(0)
    n = max(int(math.ceil((b - a) / step)), 8)
    xs = np.linspace(a, b, n + 1)
    vals = f(xs)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    roots = []
    if flips.size:
        lo, hi = xs[flips].copy(), xs[flips + 1].copy()
        flo = vals[flips].copy()
        for _ in range(refine):
            mid = 0.5 * (lo + hi)
            fmid = f(mid)
            left = flo * fmid <= 0
            hi = np.where(left, mid, hi)
            lo = np.where(left, lo, mid)
            flo = np.where(left, flo, fmid)
        roots.extend(0.5 * (lo + hi))
    # exact zeros on the scan grid count only when isolated (plateaus of an
    # identically-zero stretch are not discontinuities)
    zero = vals == 0.0
    for i in np.nonzero(zero)[0]:
        left_nz = i > 0 and vals[i - 1] != 0.0
        right_nz = i < n and vals[i + 1] != 0.0
        if left_nz or right_nz:
            roots.append(xs[i])
    return np.unique(np.asarray(roots, dtype=float))


# -- public wrapper -----------------------------------------------------------


class VectorFunction:
    """A function I -> R^d with translation/reflection and sampling."""

    def __init__(self, node, domain=REAL, name="anonymous"):
        self.node = node
        self.domain = (float(domain[0]), float(domain[1]))
        self.name = name

    @property
    def dim(self) -> int:
        return self.node.dim

    def _check(self, ts):
        lo, hi = self.domain
        if ts.size and (ts.min() < lo - 1e-9 or ts.max() > hi + 1e-9):
            raise DomainError(
                f"{self.name}: evaluation outside domain [{lo:g}, {hi:g}] "
                f"(requested [{ts.min():g}, {ts.max():g}])"
            )

    def values(self, ts) -> np.ndarray:
        """Vectorized evaluation, shape (len(ts), dim)."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        self._check(ts)
        return self.node.values(ts)

    def norm_values(self, ts) -> np.ndarray:
        vals = self.values(ts)
        return np.abs(vals[:, 0]) if self.dim == 1 else np.linalg.norm(vals, axis=1)

    def evaluate(self, t: float) -> np.ndarray:
        return self.values(np.array([t]))[0]

    def __call__(self, t: float):
        out = self.evaluate(t)
        return float(out[0]) if self.dim == 1 else out

    def jumps(self, a: float, b: float) -> np.ndarray:
        return np.asarray(self.node.jumps(a, b), dtype=float)

    def norm_kinks(self, a: float, b: float) -> np.ndarray:
        """Zero crossings of a scalar function: corners of t -> |f(t)| that
        quadrature panels must break at.  Higher-dimensional norms only kink
        where every component vanishes at once; that coincidence is ignored.

        A cancellation residue (a difference of nearly equal functions) flips
        sign at roundoff scale in almost every scan cell; such noise-dominated
        profiles return no kinks -- their integrals are negligible anyway."""
        if self.dim != 1:
            return np.empty(0)
        roots = _bracket_roots(lambda ts: self.node.values(ts)[:, 0], a, b)
        if roots.size > 32.0 * max(1.0, b - a):
            return np.empty(0)
        return roots

    # -- derived functions --------------------------------------------------

    def translate(self, tau: float) -> "VectorFunction":
        """t -> f(t + tau); the domain shifts by -tau."""
        lo, hi = self.domain
        return VectorFunction(_Affine(self.node, 1.0, tau), (lo - tau, hi - tau),
                              name=f"{self.name}(.+{tau:g})")

    def reflect(self) -> "VectorFunction":
        """t -> f(-t)."""
        lo, hi = self.domain
        return VectorFunction(_Affine(self.node, -1.0, 0.0), (-hi, -lo),
                              name=f"{self.name}(-.)")

    def __add__(self, other):
        return lincomb([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return lincomb([(1.0, self), (-1.0, other)])

    def __rmul__(self, c):
        return lincomb([(float(c), self)])

    def restrict(self, domain) -> "VectorFunction":
        lo, hi = self.domain
        nlo, nhi = max(lo, domain[0]), min(hi, domain[1])
        if nlo >= nhi:
            raise DomainError("restriction is empty")
        return VectorFunction(self.node, (nlo, nhi), name=self.name)


def lincomb(terms) -> VectorFunction:
    lo = max(f.domain[0] for _, f in terms)
    hi = min(f.domain[1] for _, f in terms)
    if lo >= hi:
        raise DomainError("linear combination has empty common domain")
    node = _LinComb([(float(c), f.node) for c, f in terms])
    return VectorFunction(node, (lo, hi), name="+".join(f"{c:g}*{f.name}" for c, f in terms))


def product(u: VectorFunction, v: VectorFunction) -> VectorFunction:
    lo = max(u.domain[0], v.domain[0])
    hi = min(u.domain[1], v.domain[1])
    return VectorFunction(_Product(u.node, v.node), (lo, hi), name=f"{u.name}*{v.name}")


def sign_of(f: VectorFunction) -> VectorFunction:
    """Pointwise sign with sign(0) = 0; scalar functions only."""
    return VectorFunction(_Sign(f.node), f.domain, name=f"sign({f.name})")


def average_of_translates(f: VectorFunction, taus) -> VectorFunction:
    """t -> mean_k f(t + tau_k), the Bochner-style candidate limit."""
    taus = np.asarray(taus, dtype=float)
    lo, hi = f.domain
    dom = (lo - taus.min() if math.isfinite(lo) else lo,
           hi - taus.max() if math.isfinite(hi) else hi)
    return VectorFunction(_MeanOfTranslates(f.node, taus), dom,
                          name=f"mean-translates({f.name},k={taus.size})")


# -- registry -----------------------------------------------------------------


def fourier(c0=0.0, terms=((1.0, 1.0, 0.0),), domain=REAL) -> VectorFunction:
    """c0 + sum of a*sin(omega*t + phase) terms."""
    terms = tuple((float(a), float(w), float(ph)) for a, w, ph in terms)

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        acc = np.full(ts.shape, float(c0))
        for a, w, ph in terms:
            acc = acc + a * np.sin(w * ts + ph)
        return acc

    return VectorFunction(_Closed(fn), domain, name="fourier")


def make_sin(domain=REAL):
    f = fourier(terms=((1.0, 1.0, 0.0),), domain=domain)
    f.name = "sin"
    return f


def make_cos(domain=REAL):
    f = fourier(terms=((1.0, 1.0, math.pi / 2),), domain=domain)
    f.name = "cos"
    return f


def two_sine(domain=REAL):
    """sin t + sin(sqrt2 t): the workhorse almost periodic specimen."""
    f = fourier(terms=((1.0, 1.0, 0.0), (1.0, SQRT2, 0.0)), domain=domain)
    f.name = "two-sine"
    return f


def sign_two_sine(domain=REAL):
    return sign_of(two_sine(domain))


def exp_decay(rate=1.0, domain=REAL):
    return VectorFunction(_Closed(lambda ts: np.exp(-rate * np.asarray(ts, dtype=float))),
                          domain, name=f"exp-decay({rate:g})")


def rational_decay(domain=REAL):
    return VectorFunction(_Closed(lambda ts: 1.0 / (1.0 + np.asarray(ts, dtype=float) ** 2)),
                          domain, name="rational-decay")


def constant(value, domain=REAL):
    vec = np.atleast_1d(np.asarray(value, dtype=float))
    return VectorFunction(
        _Closed(lambda ts: np.tile(vec, (np.asarray(ts).size, 1)), dim=vec.size),
        domain, name=f"constant({value})")


def step(lo=0.0, hi=1.0, domain=REAL):
    """Indicator of [lo, hi)."""

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        return ((ts >= lo) & (ts < hi)).astype(float)

    return VectorFunction(_Closed(fn, jump_fn=lambda a, b: np.array(
        [x for x in (lo, hi) if a < x < b])), domain, name="step")


def ramp(domain=REAL):
    f = VectorFunction(_Closed(lambda ts: np.asarray(ts, dtype=float)), domain, name="ramp")
    return f


def zero(domain=REAL):
    return constant(0.0, domain)


def power(exponent: float, domain=(0.0, 1.0)):
    """t**exponent on (0, b]; unbounded at 0 when exponent < 0."""

    def fn(ts):
        with np.errstate(divide="ignore"):
            return np.asarray(ts, dtype=float) ** exponent

    return VectorFunction(_Closed(fn), domain, name=f"power({exponent:g})")


def aa_exemplar(domain=REAL):
    """sin(1/(2 + cos t + cos(sqrt2 t))): almost automorphic but not
    compactly so; the denominator has infimum 0 but no zeros."""

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        return np.sin(1.0 / (2.0 + np.cos(ts) + np.cos(SQRT2 * ts)))

    return VectorFunction(_Closed(fn), domain, name="aa-exemplar")


def circle(domain=REAL):
    """(sin t, cos t): a 2-d specimen for exercising vector plumbing."""

    def fn(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([np.sin(ts), np.cos(ts)], axis=-1)

    return VectorFunction(_Closed(fn, dim=2), domain, name="circle")


def from_grid(ts, samples, domain=None) -> VectorFunction:
    node = _Grid(ts, samples)
    dom = domain if domain is not None else (float(node.ts[0]), float(node.ts[-1]))
    return VectorFunction(node, dom, name="grid")


def from_csv(path) -> VectorFunction:
    """Load a grid function from CSV with header t, v1..vd."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0].strip() != "t":
            raise ContractError(f"{path}: expected header starting with 't'")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    return from_grid(data[:, 0], data[:, 1:])


REGISTRY = {
    "sin": make_sin,
    "cos": make_cos,
    "two-sine": two_sine,
    "sign-two-sine": sign_two_sine,
    "exp-decay": exp_decay,
    "rational-decay": rational_decay,
    "constant": constant,
    "step": step,
    "ramp": ramp,
    "zero": zero,
    "power": power,
    "aa-exemplar": aa_exemplar,
    "circle": circle,
    "fourier": fourier,
}
