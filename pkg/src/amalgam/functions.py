"""Concrete test functions with declared analytic structure.

A RealFunction bundles a vectorized evaluator with the structure the
numerics can exploit: effective support, kinks and jumps (breakpoints),
singular points, and ideally a closed-form description of the superlevel
sets of |f|.  Functions without declared level structure fall back to
root finding on monotone pieces, or to sampling.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .measure import IntervalRC

__all__ = [
    "RealFunction",
    "indicator",
    "tent",
    "power_function",
    "riesz_kernel_function",
    "table_function",
    "scaled",
    "product",
    "power_twist",
    "make_function",
    "level_set_intervals",
]


@dataclass(frozen=True)
class RealFunction:
    """A real function on the line with declared effective support.

    Outside `support` the magnitude is bounded by `tail_bound` (zero for
    every built-in family member).  `levels(lam, strict)` returns the
    x-intervals of {|f| > lam} (or {|f| >= lam}) when a closed form is
    known.  `monotone_pieces` lists intervals on which |f| is monotone,
    enabling bisection when no closed form exists.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    support: IntervalRC
    label: str
    tail_bound: float = 0.0
    singularities: tuple[float, ...] = ()
    breakpoints: tuple[float, ...] = ()
    monotone_pieces: tuple[tuple[float, float], ...] | None = None
    levels: Callable[[float, bool], list[tuple[float, float]]] | None = None

    def __call__(self, x):
        return self.eval(np.asarray(x, float))

    def __repr__(self):
        return f"RealFunction({self.label})"


def _clip_interval(lo: float, hi: float, a: float, b: float) -> list[tuple[float, float]]:
    lo, hi = max(lo, a), min(hi, b)
    return [(lo, hi)] if hi > lo else []


def indicator(a: float, b: float) -> RealFunction:
    """Characteristic function of [a, b)."""
    if b <= a:
        raise ValueError("indicator needs a < b")

    def ev(x):
        return ((x >= a) & (x < b)).astype(float)

    def levels(lam, strict):
        if (lam < 1.0) if strict else (lam <= 1.0):
            return [(a, b)]
        return []

    return RealFunction(eval=ev, support=IntervalRC(a, b), label=f"indicator[{a},{b})",
                        breakpoints=(a, b), levels=levels)


def table_function(points: Sequence[Sequence[float]], label: str | None = None) -> RealFunction:
    """Piecewise linear interpolant through [x, y] pairs, zero outside."""
    pts = np.asarray(points, float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
        raise ValueError("table function needs at least two [x, y] pairs")
    if np.any(np.diff(pts[:, 0]) <= 0):
        raise ValueError("table abscissae must be strictly increasing")
    xs, ys = pts[:, 0].copy(), pts[:, 1].copy()

    # Refine the knot list with the zero crossings of y so that |f| is
    # linear on every refined segment; level sets then come in closed form.
    rx, ry = [xs[0]], [ys[0]]
    for i in range(len(xs) - 1):
        y0, y1 = ys[i], ys[i + 1]
        if y0 * y1 < 0:
            xc = xs[i] - y0 * (xs[i + 1] - xs[i]) / (y1 - y0)
            rx.append(xc)
            ry.append(0.0)
        rx.append(xs[i + 1])
        ry.append(y1)
    rx = np.asarray(rx)
    ay = np.abs(ry)

    def ev(x):
        out = np.interp(x, xs, ys)
        return np.where((x >= xs[0]) & (x < xs[-1]), out, 0.0)

    def levels(lam, strict):
        out: list[tuple[float, float]] = []
        cur: float | None = None
        for i in range(len(rx) - 1):
            x0, x1, y0, y1 = rx[i], rx[i + 1], ay[i], ay[i + 1]
            ok0 = (y0 > lam) if strict else (y0 >= lam)
            ok1 = (y1 > lam) if strict else (y1 >= lam)
            if ok0 and cur is None:
                cur = x0
            if ok0 != ok1:
                xc = x0 + (lam - y0) / (y1 - y0) * (x1 - x0) if y1 != y0 else x1
                if ok0:
                    out.append((cur, xc))
                    cur = None
                else:
                    cur = xc
        if cur is not None:
            out.append((cur, rx[-1]))
        return [(float(lo), float(hi)) for lo, hi in out if hi > lo]

    lbl = label or f"table[{xs[0]},{xs[-1]})"
    return RealFunction(eval=ev, support=IntervalRC(float(xs[0]), float(xs[-1])),
                        label=lbl, breakpoints=tuple(float(v) for v in rx), levels=levels)


def tent(a: float, b: float, height: float = 1.0) -> RealFunction:
    """Triangular bump peaking at the Euclidean midpoint of [a, b]."""
    mid = 0.5 * (a + b)
    f = table_function([[a, 0.0], [mid, height], [b, 0.0]], label=f"tent[{a},{b}]")
    return f


def power_function(exponent: float, window: tuple[float, float],
                   coefficient: float = 1.0) -> RealFunction:
    """coefficient * |x|^exponent restricted to the window [w0, w1)."""
    w0, w1 = float(window[0]), float(window[1])
    if w1 <= w0:
        raise ValueError("power function window must have positive length")
    e, c = float(exponent), float(coefficient)
    sing = (0.0,) if (e < 0 and w0 <= 0.0 <= w1) else ()

    def ev(x):
        with np.errstate(divide="ignore"):
            out = c * np.abs(x) ** e
        return np.where((x >= w0) & (x < w1), out, 0.0)

    def levels(lam, strict):
        # |x|-threshold: |c| |x|^e > lam. Strictness is immaterial off
        # plateaus; e == 0 reduces to an indicator.
        if c == 0.0:
            return []
        if e == 0.0:
            ok = (abs(c) > lam) if strict else (abs(c) >= lam)
            return [(w0, w1)] if ok else []
        if lam <= 0.0:
            xc = 0.0 if e > 0 else np.inf
        else:
            xc = (lam / abs(c)) ** (1.0 / e)
        if e < 0:
            body = _clip_interval(-xc, xc, w0, w1)
        else:
            body = _clip_interval(xc, np.inf, w0, w1) + _clip_interval(-np.inf, -xc, w0, w1)
        return sorted(body)

    return RealFunction(eval=ev, support=IntervalRC(w0, w1),
                        label=f"|x|^{e}on[{w0},{w1})",
                        singularities=sing, breakpoints=(w0, w1) + ((0.0,) if w0 < 0 < w1 else ()),
                        levels=levels)


def riesz_kernel_function(gamma: float, window: tuple[float, float]) -> RealFunction:
    """|x|^(gamma-1) truncated to the window; 0 < gamma < 1."""
    if not (0.0 < gamma < 1.0):
        raise ValueError("Riesz exponent gamma must lie in (0, 1)")
    f = power_function(gamma - 1.0, window)
    return replace(f, label=f"riesz{gamma}on[{window[0]},{window[1]})")


def scaled(f: RealFunction, c: float) -> RealFunction:
    """c * f with level structure preserved."""
    c = float(c)
    base_levels = f.levels
    levels = None
    if base_levels is not None and c != 0.0:
        def levels(lam, strict, _b=base_levels, _c=abs(c)):
            return _b(lam / _c, strict)
    return replace(f, eval=(lambda x, _e=f.eval, _c=c: _c * _e(x)),
                   label=f"{c}*{f.label}",
                   tail_bound=abs(c) * f.tail_bound, levels=levels)


def product(f: RealFunction, g_eval: Callable, label: str,
            extra_singularities: Sequence[float] = (),
            extra_breakpoints: Sequence[float] = ()) -> RealFunction:
    """f times a plain vectorized factor; analytic level structure is lost."""
    return RealFunction(
        eval=(lambda x, _f=f.eval, _g=g_eval: _f(x) * _g(x)),
        support=f.support, label=label, tail_bound=0.0,
        singularities=tuple(sorted({*f.singularities, *map(float, extra_singularities)})),
        breakpoints=tuple(sorted({*f.breakpoints, *map(float, extra_breakpoints)})),
        levels=None)


def power_twist(f: RealFunction, a: float) -> RealFunction:
    """|x|^a * f(x); the factor that converts Lebesgue data to |x|^-a dx."""
    if a == 0.0:
        return f
    extra_break = (0.0,) if f.support.a < 0 < f.support.b else ()
    extra_sing = (0.0,) if a < 0 else ()
    return product(f, lambda x: np.abs(x) ** a, label=f"|x|^{a}*{f.label}",
                   extra_singularities=extra_sing, extra_breakpoints=extra_break)


def make_function(spec: dict) -> RealFunction:
    """Build a family member from its JSON-style spec block."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("function spec must be a dict with a 'kind' field")
    kind = spec["kind"]
    if kind == "indicator":
        return indicator(spec["a"], spec["b"])
    if kind == "tent":
        return tent(spec["a"], spec["b"], spec.get("height", 1.0))
    if kind == "power":
        return power_function(spec["exp"], tuple(spec["window"]),
                              spec.get("coefficient", 1.0))
    if kind == "riesz_kernel":
        window = tuple(spec.get("window", (-1.0, 1.0)))
        return riesz_kernel_function(spec["gamma"], window)
    if kind == "table":
        return table_function(spec["points"])
    raise ValueError(f"unknown function kind {kind!r}")


def _bisect_levels(f: RealFunction, lam: float) -> list[tuple[float, float]]:
    """Superlevel intervals via bisection on each declared monotone piece."""

    def val(x: float) -> float:
        if x in f.singularities:
            return np.inf
        return abs(float(f(np.array([x]))[0]))

    out = []
    for lo, hi in f.monotone_pieces:
        above_lo, above_hi = val(lo) > lam, val(hi) > lam
        if above_lo and above_hi:
            out.append((lo, hi))
            continue
        if not (above_lo or above_hi):
            continue
        a, b = lo, hi
        for _ in range(80):
            mid = 0.5 * (a + b)
            if (val(mid) > lam) == above_lo:
                a = mid
            else:
                b = mid
        xc = 0.5 * (a + b)
        out.append((lo, xc) if above_lo else (xc, hi))
    return sorted(out)


def level_set_intervals(f: RealFunction, lam: float,
                        strict: bool = True) -> list[tuple[float, float]] | None:
    """x-intervals of the superlevel set of |f|, or None if only sampling works."""
    if f.levels is not None:
        return f.levels(float(lam), strict)
    if f.monotone_pieces:
        return _bisect_levels(f, float(lam))
    return None
