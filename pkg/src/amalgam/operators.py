"""Fractional maximal operator and potential-type convolution operator.

The maximal operator is scanned over a two-parameter candidate family in
measure coordinates: an interval containing x is determined by the mass
u to the left of x and v to the right, so candidates are (total mass,
left fraction) pairs.  Every reported value is a certified lower bound
of the true supremum; a coordinate golden-section polish in (log u,
log v) tightens the grid winner.

The potential K f(x) = int k(x - y) f(y) dmu(y) integrates in measure
coordinates with the panel layout split at x, at the support edges and
at the declared singular points of f, grading dyadically toward each
singular endpoint.  Non-decaying graded sums raise DivergenceError.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .functions import (RealFunction, power_twist, riesz_kernel_function,
                        table_function)
from .measure import (DivergenceError, IntervalRC, RadonMeasure,
                      _integrate_t, gk_panels, lebesgue, make_interval,
                      power_measure)
from .norms import Exponent, LqTable, weak_norm

__all__ = [
    "Kernel",
    "riesz_kernel",
    "table_kernel",
    "make_kernel",
    "MaximalQuery",
    "default_query",
    "maximal",
    "maximal_profile",
    "potential",
    "potential_profile",
    "riesz_potential",
    "riesz_via_power_measure",
    "farfield_bound_check",
]


@dataclass
class Kernel:
    """Even kernel, nonincreasing on the positive half line.

    singular_exponent is the local power behaviour at 0 (e.g. gamma - 1
    for the Riesz kernel) or None for bounded kernels.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    label: str
    singular_exponent: float | None = None
    window: float = 1e6   # half-width used when viewed as a function
    _fn_cache: dict = field(default_factory=dict, repr=False)
    _weak_cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, u):
        return self.eval(np.asarray(u, float))

    def as_function(self, half_width: float | None = None) -> RealFunction:
        R = float(half_width or self.window)
        if R not in self._fn_cache:
            self._fn_cache[R] = self._build_function(R)
        return self._fn_cache[R]

    def _build_function(self, R: float) -> RealFunction:
        raise NotImplementedError

    def weak_eta_norm(self, m: RadonMeasure, eta) -> float:
        """Weak L^eta(mu) norm of the kernel, cached per (measure, eta)."""
        eta = Exponent.of(eta)
        key = (m.kind, getattr(m, "a", 0.0), eta.value)
        if key not in self._weak_cache:
            self._weak_cache[key] = weak_norm(m, self.as_function(), eta)
        return self._weak_cache[key]


class _RieszKernel(Kernel):
    def _build_function(self, R: float) -> RealFunction:
        gamma = self.singular_exponent + 1.0
        return riesz_kernel_function(gamma, (-R, R))


class _TableKernel(Kernel):
    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        def ev(u):
            return np.interp(np.abs(u), xs, ys, right=0.0)

        super().__init__(eval=ev, label=f"table-kernel[0,{xs[-1]}]",
                         singular_exponent=None, window=float(xs[-1]))
        self._xs, self._ys = xs, ys

    def _build_function(self, R: float) -> RealFunction:
        xs, ys = self._xs, self._ys
        full = np.concatenate([-xs[::-1], xs[1:]])
        vals = np.concatenate([ys[::-1], ys[1:]])
        return table_function(np.column_stack([full, vals]),
                              label=f"sym({self.label})")


def riesz_kernel(gamma: float) -> Kernel:
    """k(u) = |u|^(gamma-1), 0 < gamma < 1."""
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"Riesz exponent gamma must lie in (0, 1), got {gamma}")

    def ev(u):
        with np.errstate(divide="ignore"):
            return np.abs(u) ** (gamma - 1.0)

    return _RieszKernel(eval=ev, label=f"riesz({gamma})",
                        singular_exponent=gamma - 1.0)


def table_kernel(points: Sequence[Sequence[float]]) -> Kernel:
    """Even kernel from [u, k(u)] samples on u >= 0; must be nonincreasing."""
    pts = np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("kernel table needs at least two [u, k] pairs")
    xs, ys = pts[:, 0], pts[:, 1]
    if xs[0] != 0.0:
        raise ValueError("kernel table must start at u = 0")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("kernel table abscissae must be strictly increasing")
    if np.any(np.diff(ys) > 1e-12 * max(1.0, float(np.max(np.abs(ys))))):
        raise ValueError("kernel must be nonincreasing on the positive half line")
    if np.any(ys < 0):
        raise ValueError("kernel values must be nonnegative")
    return _TableKernel(xs.copy(), ys.copy())


def make_kernel(spec: dict) -> Kernel:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("kernel spec must be a dict with a 'kind' field")
    if spec["kind"] == "riesz":
        return riesz_kernel(spec["gamma"])
    if spec["kind"] == "table":
        if not spec.get("even", True):
            raise ValueError("only even kernels are supported")
        return table_kernel(spec["points"])
    raise ValueError(f"unknown kernel kind {spec['kind']!r}")


@dataclass(frozen=True)
class MaximalQuery:
    """Candidate family for the maximal operator at a point."""

    x: float
    mass_grid: np.ndarray      # total masses u + v of candidate intervals
    split_count: int = 17      # left-fraction resolution per total mass

    def fractions(self) -> np.ndarray:
        n = self.split_count
        return (np.arange(n) + 1.0) / (n + 1.0)


def default_mass_grid(m: RadonMeasure, f: RealFunction, xs,
                      count: int = 64) -> np.ndarray:
    """Masses from tiny (well below the support mass) to well past the
    measure distance between the query points and the support."""
    t_supp = (m.cdf(f.support.a), m.cdf(f.support.b))
    txs = np.atleast_1d(np.asarray(m.cdf(xs), float))
    ms = max(t_supp[1] - t_supp[0], 1e-12)
    d = float(np.max(np.maximum(np.abs(txs - t_supp[0]), np.abs(txs - t_supp[1]))))
    return np.geomspace(ms / 256.0, 4.0 * (ms + d), count)


def default_query(m: RadonMeasure, f: RealFunction, x: float,
                  count: int = 64, split_count: int = 17) -> MaximalQuery:
    return MaximalQuery(x=float(x), mass_grid=default_mass_grid(m, f, x, count),
                        split_count=split_count)


def _candidate_value(table: LqTable, t_x, u, v, expo: float, rq: float):
    """Value of the candidate interval with mass u left / v right of x."""
    mass = u + v
    lq = table.mass_between(t_x - u, t_x + v) ** rq
    return mass ** expo * lq


def maximal(m: RadonMeasure, f: RealFunction, q, beta, x: float,
            query: MaximalQuery | None = None, refine: bool = True,
            table: LqTable | None = None) -> float:
    """Fractional maximal function sup_{I containing x} mu(I)^(1/beta-1/q) |f 1_I|_q.

    A lower bound by construction, up to the qth-mean table error
    (about 1e-8 relative on very short intervals); refine=True polishes
    the grid argmax coordinate-wise in (log u, log v).
    """
    q, beta = Exponent.of(q), Exponent.of(beta)
    if q.recip < beta.recip:
        raise ValueError(f"maximal operator needs q <= beta "
                         f"(got q={q.value:g}, beta={beta.value:g})")
    if query is None:
        query = default_query(m, f, x)
    t_x = m.cdf(x)
    expo = beta.recip - q.recip
    if q.is_inf:
        return _maximal_sup_kind(m, f, beta, t_x, query)
    if table is None:
        table = LqTable(m, f, q)
    rq = 1.0 / q.value
    fracs = query.fractions()
    M = query.mass_grid[:, None]
    u = M * fracs[None, :]
    v = M - u
    vals = _candidate_value(table, t_x, u, v, expo, rq)
    j = int(np.argmax(vals))
    best = float(vals.flat[j])
    if not refine or best == 0.0:
        return best
    u0, v0 = float(u.flat[j]), float(v.flat[j])
    # Below this size the table's interpolated masses are cancellation
    # noise, which would let averages exceed their true sup.
    span = float(table.t_edges[-1] - table.t_edges[0])
    size_floor = (abs(t_x) + span) * 1e-9

    def g(uu, vv):
        return float(_candidate_value(table, t_x, uu, vv, expo, rq))

    for _ in range(3):
        for which in (0, 1):
            cur = (u0, v0)[which]
            lo = np.log(max(cur * 1e-8, size_floor))
            hi = np.log(max(cur * 16.0, size_floor * 32.0))
            fn = (lambda w: g(np.exp(w), v0)) if which == 0 else \
                 (lambda w: g(u0, np.exp(w)))
            w_best, f_best = _scan_then_golden(fn, lo, hi)
            if f_best > best:
                best = f_best
                if which == 0:
                    u0 = float(np.exp(w_best))
                else:
                    v0 = float(np.exp(w_best))
    return best


def _scan_then_golden(fn, lo, hi, scan: int = 96):
    # Dense scan first: the objective can sit on a flat zero plateau
    # (candidate interval missing the support entirely), where golden
    # section alone stalls.
    ws = np.linspace(lo, hi, scan)
    vals = np.array([fn(w) for w in ws])
    j = int(np.argmax(vals))
    a = ws[max(j - 1, 0)]
    b = ws[min(j + 1, scan - 1)]
    w, fw = _golden(fn, a, b)
    if fw >= vals[j]:
        return w, fw
    return ws[j], float(vals[j])


def _golden(fn, lo, hi, iters: int = 60):
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def _maximal_sup_kind(m: RadonMeasure, f: RealFunction, beta: Exponent,
                      t_x: float, query: MaximalQuery) -> float:
    # q = inf: candidate value is mu(I)^(1/beta) * sup_I |f| (sampled sup).
    best = 0.0
    fracs = query.fractions()
    samples = (np.arange(257) + 0.5) / 257.0
    for M in query.mass_grid:
        for fr in fracs:
            lo, hi = t_x - fr * M, t_x + (1.0 - fr) * M
            ts = lo + (hi - lo) * samples
            with np.errstate(divide="ignore", over="ignore"):
                s = float(np.max(np.abs(np.asarray(f(m.inv_cdf(ts)), float))))
            best = max(best, M ** beta.recip * s)
    return best


def maximal_profile(m: RadonMeasure, f: RealFunction, q, beta,
                    xs: np.ndarray, mass_grid: np.ndarray | None = None,
                    split_count: int = 17,
                    table: LqTable | None = None) -> np.ndarray:
    """Vectorized maximal-function lower bound over many points.

    Shares one candidate family across all points so that level sets of
    the output are consistent under refinement.
    """
    q, beta = Exponent.of(q), Exponent.of(beta)
    if q.is_inf:
        raise ValueError("maximal_profile supports finite q only")
    if q.recip < beta.recip:
        raise ValueError("maximal operator needs q <= beta")
    xs = np.asarray(xs, float)
    if mass_grid is None:
        mass_grid = default_mass_grid(m, f, xs)
    if table is None:
        table = LqTable(m, f, q)
    t_xs = np.asarray(m.cdf(xs), float)
    expo = beta.recip - q.recip
    rq = 1.0 / q.value
    fracs = (np.arange(split_count) + 1.0) / (split_count + 1.0)
    out = np.zeros_like(t_xs)
    for M in mass_grid:
        coef = M ** expo
        for fr in fracs:
            u = fr * M
            vals = coef * table.mass_between(t_xs - u, t_xs + (M - u)) ** rq
            np.maximum(out, vals, out=out)
    return out


def _segment_panels(a: float, b: float, sing_a: bool, sing_b: bool,
                    base: int, levels: int = 40):
    """Panel edges for one segment; ladders grade toward singular ends.

    Returns (lo, hi, groups) where groups lists (slice, orientation) of
    ladder panels needing a geometric tail estimate.
    """
    los: list[np.ndarray] = []
    his: list[np.ndarray] = []
    groups: list[tuple[int, int]] = []
    n0 = 0

    def ladder(t_sing, t_far):
        nonlocal n0
        h = t_far - t_sing
        scale = np.abs(h) * 2.0 ** -np.arange(levels)
        near = t_sing + np.sign(h) * scale / 2.0
        far = t_sing + np.sign(h) * scale
        los.append(np.minimum(near, far))
        his.append(np.maximum(near, far))
        groups.append((n0, n0 + levels))
        n0 += levels

    if sing_a and sing_b:
        mid = 0.5 * (a + b)
        ladder(a, mid)
        ladder(b, mid)
    elif sing_a:
        ladder(a, b)
    elif sing_b:
        ladder(b, a)
    else:
        edges = np.linspace(a, b, base + 1)
        los.append(edges[:-1])
        his.append(edges[1:])
        n0 += base
    return los, his, groups


def _fixed_quadrature(phi, t_lo: float, t_hi: float,
                      sing_ts: Sequence[float], break_ts: Sequence[float],
                      base_panels: int = 24) -> float:
    """Non-adaptive graded quadrature used by the profile scans."""
    if t_hi <= t_lo:
        return 0.0
    sing = sorted({t for t in sing_ts if t_lo <= t <= t_hi})
    cuts = sorted({t_lo, t_hi, *sing, *(t for t in break_ts if t_lo < t < t_hi)})
    los: list[np.ndarray] = []
    his: list[np.ndarray] = []
    groups: list[tuple[int, int]] = []
    offset = 0
    span = t_hi - t_lo
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        base = max(6, int(np.ceil(base_panels * (b - a) / span)))
        l, h, g = _segment_panels(a, b, a in sing, b in sing, base)
        n_here = sum(len(x) for x in l)
        los.extend(l)
        his.extend(h)
        groups.extend([(s + offset, e + offset) for s, e in g])
        offset += n_here
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    vals, _ = gk_panels(phi, lo, hi)
    total = float(np.sum(vals))
    for s, e in groups:
        p = vals[s:e]
        last, prev = abs(float(p[-1])), abs(float(p[-2]))
        scale = max(float(np.max(np.abs(p))), 1e-300)
        if last <= 1e-12 * scale:
            continue
        rho = last / max(prev, 1e-300)
        if rho >= 0.98:
            raise DivergenceError(
                "graded panel sums do not decay toward the singular endpoint",
                partial_sums=p)
        total += float(p[-1]) * rho / (1.0 - rho)
    return total


def _potential_layout(m: RadonMeasure, f: RealFunction, k: Kernel):
    t_lo, t_hi = m.cdf(f.support.a), m.cdf(f.support.b)
    sing_f = [m.cdf(s) for s in f.singularities]
    brk_f = [m.cdf(b) for b in f.breakpoints]
    return t_lo, t_hi, sing_f, brk_f


def potential(m: RadonMeasure, f: RealFunction, k: Kernel, x: float,
              tol: float = 1e-8) -> float:
    """K f(x) = int k(x - y) f(y) dmu(y) over the support of f."""
    if x in f.singularities:
        raise ValueError(f"potential evaluation at a singular point of f: x={x}")
    t_lo, t_hi, sing_f, brk_f = _potential_layout(m, f, k)
    t_x = m.cdf(x)

    def phi(t):
        y = m.inv_cdf(t)
        with np.errstate(divide="ignore", over="ignore"):
            return np.asarray(k(x - y), float) * np.asarray(f(y), float)

    sing = list(sing_f)
    brk = list(brk_f)
    if t_lo <= t_x <= t_hi:
        if k.singular_exponent is not None:
            sing.append(t_x)
        else:
            brk.append(t_x)   # |x - y| kink for bounded even kernels
    val, _ = _integrate_t(phi, t_lo, t_hi, tol, sing, brk)
    return val


def potential_profile(m: RadonMeasure, f: RealFunction, k: Kernel,
                      xs: np.ndarray, base_panels: int = 24) -> np.ndarray:
    """K f at many points with the fixed graded panel scheme."""
    xs = np.asarray(xs, float)
    t_lo, t_hi, sing_f, brk_f = _potential_layout(m, f, k)
    out = np.empty(xs.shape, float)
    for i, x in enumerate(xs):
        if x in f.singularities:
            out[i] = np.nan
            continue
        t_x = m.cdf(x)

        def phi(t, _x=x):
            y = m.inv_cdf(t)
            with np.errstate(divide="ignore", over="ignore"):
                return np.asarray(k(_x - y), float) * np.asarray(f(y), float)

        sing = list(sing_f)
        brk = list(brk_f)
        if t_lo <= t_x <= t_hi:
            if k.singular_exponent is not None:
                sing.append(t_x)
            else:
                brk.append(t_x)
        out[i] = _fixed_quadrature(phi, t_lo, t_hi, sing, brk, base_panels)
    return out


def riesz_potential(f: RealFunction, gamma: float, x: float,
                    tol: float = 1e-8) -> float:
    """I_gamma f(x) = int |x-y|^(gamma-1) f(y) dy (Lebesgue route)."""
    return potential(lebesgue(), f, riesz_kernel(gamma), x, tol=tol)


def riesz_via_power_measure(f: RealFunction, gamma: float, a: float, x: float,
                            tol: float = 1e-8) -> float:
    """Same Riesz potential through the measure |y|^-a dy.

    Writing dy = |y|^a dmu_a(y) moves the weight onto the data:
    I_gamma f = K(|y|^a f) with K the potential over mu_a.  Both routes
    must agree; this one exercises the singular-measure quadrature.
    """
    m = power_measure(a)
    twist = power_twist(f, a)
    return potential(m, twist, riesz_kernel(gamma), x, tol=tol)


def farfield_bound_check(m: RadonMeasure, f: RealFunction, q, beta,
                         y1: float, x1: float, x2: float, y2: float,
                         x: float, k: Kernel,
                         mass_tol: float = 1e-6) -> tuple[float, float]:
    """Far-field domination data: (K f(x), mass-ratio^(1/eta) * maximal).

    Geometry: y1 < x1 < x2 < y2 with the flanking masses equal and at
    least the core mass; f supported in [x1, x2]; x outside [y1, y2].
    """
    if not (y1 < x1 < x2 < y2):
        raise ValueError("need y1 < x1 < x2 < y2")
    left = m.mass(IntervalRC(y1, x1))
    right = m.mass(IntervalRC(x2, y2))
    core = m.mass(IntervalRC(x1, x2))
    scale = max(left, right, core)
    if abs(left - right) > mass_tol * scale:
        raise ValueError(f"flanking masses differ: {left} vs {right}")
    if min(left, right) < core * (1.0 - 1e-9):
        raise ValueError("flanking masses must be at least the core mass")
    if not (f.support.a >= x1 - 1e-12 and f.support.b <= x2 + 1e-12):
        raise ValueError("f must be supported inside [x1, x2]")
    if y1 <= x <= y2:
        raise ValueError("x must lie outside [y1, y2]")
    q, beta = Exponent.of(q), Exponent.of(beta)
    inv_eta = 1.0 - beta.recip
    lhs = potential(m, f, k, x)
    mval = maximal(m, f, q, beta, x)
    if x > y2:
        ratio = m.mass(IntervalRC(x2, x)) / m.mass(IntervalRC(0.0, x - x2))
    else:
        ratio = m.mass(IntervalRC(x, x1)) / m.mass(IntervalRC(x - x1, 0.0))
    return lhs, ratio ** inv_eta * mval
