"""Scenario runner for the inequality suite: config in, verdicts out.

A scenario is a JSON block naming a target inequality plus the measure,
function family, weight, kernel and exponents it should be tested with.
Running one means: validate the target's hypothesis block (bad
parameters are rejected before any numerics), evaluate both sides of
the inequality over a lambda grid and the function family, and reduce
everything to a report carrying the empirical constant, an argmax
witness and a verdict.  Reports serialize deterministically, so two
runs with the same scenario and seed are byte-identical.

Level sets of the sampled operators are measured by counting cells of a
midpoint grid in measure coordinates; weighted measures replace the
count with per-cell masses of the weight.  Grid densities are knobs
recorded in the report, not hidden constants.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .covering import random_family, select_cover
from .functions import (RealFunction, indicator, make_function, power_function,
                        power_twist, product, riesz_kernel_function, scaled,
                        tent)
from .measure import (DivergenceError, IntervalRC, QuadratureError,
                      growth_constant, lebesgue, make_interval, make_measure,
                      power_measure, RadonMeasure)
from .norms import (Exponent, LqTable, TrivialSpaceError, amalgam_norm,
                    default_r_grid, lq_norm, weak_norm)
from .operators import (Kernel, default_mass_grid, farfield_bound_check,
                        make_kernel, maximal_profile, potential_profile,
                        riesz_kernel)
from .weights import (SubsetSampler, Weight, a_infty_epsilon_delta,
                      default_interval_family, make_weight, thm21_condition)

TOOL_VERSION = "0.1.0"

TARGETS = ("thm21_part1", "thm21_part2", "cor23", "cor24", "thm31_goodlambda",
           "lem32", "lem33", "prop34", "cor35", "cor36", "prop41", "steinweiss",
           "norm_properties", "covering_trials")

DEFAULT_SAMPLES = 4096
DEFAULT_LAMBDA_COUNT = 64
DEFAULT_WINDOW_MASS = 8.0
DEFAULT_KAPPAS = (0.5, 1.0, 2.0)
DEFAULT_STABILITY_TOL = 0.2

_EPS = 1e-12


class ConfigError(ValueError):
    """Malformed scenario file or spec string; mapped to exit code 3."""


class HypothesisRejected(RuntimeError):
    """Scenario parameters fall outside the target's hypothesis block.

    Raised before any inequality is evaluated; mapped to exit code 2.
    """


class NumericalFailure(RuntimeError):
    """Divergent or unusable numerics in an admissible scenario (exit 1)."""


def _reject(msg: str):
    raise HypothesisRejected(msg)


def _require(cond: bool, msg: str):
    if not cond:
        _reject(msg)


def _le(a: float, b: float) -> bool:
    """Tolerant a <= b for derived reciprocals (1/q - 1/beta and friends)."""
    return a <= b + _EPS * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# scenario files


_ALLOWED_KEYS = {"name", "notes", "target", "measure", "functions", "weight",
                 "kernel", "exponents", "lambda_grid", "samples", "window_mass",
                 "kappas", "tolerances", "seed", "options"}


@dataclass
class Scenario:
    """Parsed scenario file; raw holds the original JSON block."""

    target: str
    measure: dict
    functions: list | None
    weight: dict | None
    kernel: dict | None
    exponents: dict
    lambda_count: int
    samples: int
    window_mass: float
    kappas: tuple
    tolerances: dict
    seed: int
    options: dict
    name: str
    raw: dict


def parse_scenario(block: dict, name: str = "scenario") -> Scenario:
    if not isinstance(block, dict):
        raise ConfigError(f"{name}: scenario must be a JSON object")
    unknown = sorted(set(block) - _ALLOWED_KEYS)
    if unknown:
        raise ConfigError(f"{name}: unknown field(s) {unknown}")
    target = block.get("target")
    if target not in TARGETS:
        raise ConfigError(
            f"{name}: field 'target' must be one of {list(TARGETS)}, got {target!r}")
    measure = block.get("measure")
    if not isinstance(measure, dict):
        raise ConfigError(f"{name}: field 'measure' must be a spec object")
    functions = block.get("functions")
    if functions is not None and not (
            isinstance(functions, list) and all(isinstance(f, dict) for f in functions)):
        raise ConfigError(f"{name}: field 'functions' must be a list of spec objects")
    for key in ("weight", "kernel"):
        v = block.get(key)
        if v is not None and not isinstance(v, dict):
            raise ConfigError(f"{name}: field {key!r} must be a spec object")
    exponents = block.get("exponents", {})
    if not isinstance(exponents, dict):
        raise ConfigError(f"{name}: field 'exponents' must be an object")
    lam = block.get("lambda_grid", {})
    if not isinstance(lam, dict):
        raise ConfigError(f"{name}: field 'lambda_grid' must be an object")
    lambda_count = lam.get("count", DEFAULT_LAMBDA_COUNT)
    if not (isinstance(lambda_count, int) and lambda_count >= 2):
        raise ConfigError(f"{name}: lambda_grid.count must be an int >= 2")
    samples = block.get("samples", DEFAULT_SAMPLES)
    if not (isinstance(samples, int) and samples >= 16):
        raise ConfigError(f"{name}: field 'samples' must be an int >= 16")
    window_mass = block.get("window_mass", DEFAULT_WINDOW_MASS)
    if not (isinstance(window_mass, (int, float)) and window_mass > 0):
        raise ConfigError(f"{name}: field 'window_mass' must be positive")
    kappas = tuple(float(k) for k in block.get("kappas", DEFAULT_KAPPAS))
    if any(k <= 0 for k in kappas):
        raise ConfigError(f"{name}: kappas must be positive")
    tolerances = dict(block.get("tolerances", {}))
    seed = block.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError(f"{name}: field 'seed' must be an int")
    options = block.get("options", {})
    if not isinstance(options, dict):
        raise ConfigError(f"{name}: field 'options' must be an object")
    return Scenario(target=target, measure=measure, functions=functions,
                    weight=block.get("weight"), kernel=block.get("kernel"),
                    exponents=exponents, lambda_count=lambda_count,
                    samples=samples, window_mass=float(window_mass),
                    kappas=kappas, tolerances=tolerances, seed=seed,
                    options=options, name=str(block.get("name", name)),
                    raw=block)


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(f"{path}: {e}") from e
    try:
        block = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return parse_scenario(block, name=p.stem)


# ---------------------------------------------------------------------------
# instantiation and common gating


def _exponent(scn: Scenario, key: str) -> Exponent:
    if key not in scn.exponents:
        raise ConfigError(f"{scn.name}: target {scn.target!r} needs exponents.{key}")
    try:
        return Exponent.of(scn.exponents[key])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{scn.name}: exponents.{key}: {e}") from e


def _real_param(scn: Scenario, key: str) -> float:
    if key not in scn.exponents:
        raise ConfigError(f"{scn.name}: target {scn.target!r} needs exponents.{key}")
    v = scn.exponents[key]
    if not isinstance(v, (int, float)):
        raise ConfigError(f"{scn.name}: exponents.{key} must be a number")
    return float(v)


def _scenario_measure(scn: Scenario) -> RadonMeasure:
    try:
        return make_measure(scn.measure)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"{scn.name}: measure: {e}") from e


def _scenario_weight(scn: Scenario) -> Weight:
    try:
        return make_weight(scn.weight if scn.weight is not None else {"kind": "one"})
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"{scn.name}: weight: {e}") from e


def _scenario_kernel(scn: Scenario) -> Kernel:
    if scn.kernel is None:
        raise ConfigError(f"{scn.name}: target {scn.target!r} needs a kernel block")
    try:
        return make_kernel(scn.kernel)
    except (ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"{scn.name}: kernel: {e}") from e


def default_family(alpha: Exponent | None = None) -> list[RealFunction]:
    """Stock test functions: plateaus, a kink, a tuned blow-up, a spike.

    The negative power is |x|^(-1/alpha') on a window away from zero, so
    it stresses the large-lambda regime while staying bounded; the spike
    is a genuinely singular member for the small-lambda end.
    """
    fs = [indicator(0.0, 1.0), indicator(-1.0, 1.0), tent(-1.0, 1.0, 1.0)]
    rec = 0.5 if alpha is None else alpha.recip
    conj = 1.0 - rec
    if conj > 0:
        fs.append(power_function(-conj, (0.05, 2.0)))
    fs.append(riesz_kernel_function(0.5, (-1.0, 1.0)))
    return fs


def _scenario_functions(scn: Scenario, alpha: Exponent | None = None) -> list[RealFunction]:
    if not scn.functions:
        return default_family(alpha)
    out = []
    for i, spec in enumerate(scn.functions):
        try:
            out.append(make_function(spec))
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"{scn.name}: functions[{i}]: {e}") from e
    return out


def _fv(f: RealFunction, wgt: Weight) -> RealFunction:
    """f * v; the identity weight short-circuits to f itself."""
    if wgt.spec.get("kind") == "one":
        return f
    v = wgt.fn
    return product(f, v.eval, label=f"{f.label}*{v.label}",
                   extra_singularities=v.singularities,
                   extra_breakpoints=v.breakpoints)


def _kernel_eta_gate(m: RadonMeasure, k: Kernel, beta: Exponent) -> float:
    """Require k in weak L^eta(mu) with 1/eta = 1 - 1/beta.

    For a power kernel the admissible eta is pinned exactly by the
    measure's scaling, so the gate is an exponent match rather than a
    sampled norm (a window-truncated sample hides half of the failure
    modes).  Bounded compactly supported kernels pass for every eta.
    """
    inv_eta = 1.0 - beta.recip
    _require(inv_eta > _EPS, f"beta must exceed 1, got {beta.value:g}")
    if k.singular_exponent is not None and m.kind in ("lebesgue", "power"):
        gamma = 1.0 + k.singular_exponent
        a = m.a if m.kind == "power" else 0.0
        required = (1.0 - gamma) / (1.0 - a)
        _require(abs(inv_eta - required) <= 1e-9,
                 f"kernel decay needs 1/eta = {required:g}, scenario beta "
                 f"gives {inv_eta:g}")
    return inv_eta


def _growth_gate(m: RadonMeasure) -> float:
    g = growth_constant(m)
    _require(math.isfinite(g), "measure growth constant is not finite")
    return g


def _gate_family(m: RadonMeasure, gs: int):
    return default_interval_family(m, span_mass=16.0, centers=12 * gs, scales=5)


def _weight_gate(scn: Scenario, m: RadonMeasure, wgt: Weight, q, q1, beta, gs: int):
    try:
        cond = thm21_condition(m, wgt, q, q1, beta, _gate_family(m, gs))
    except ValueError as e:
        raise HypothesisRejected(f"{scn.name}: weight: {e}") from e
    _require(math.isfinite(cond.constant) and not cond.diverging,
             f"{scn.name}: weight condition diverges over the interval family")
    return cond


# ---------------------------------------------------------------------------
# sample grids and lambda grids


@dataclass(frozen=True)
class SampleGrid:
    """Midpoint grid in measure coordinates over [-W, W] in mass."""

    ts: np.ndarray
    xs: np.ndarray
    cell: float
    t_lo: float
    t_hi: float


def sample_grid(m: RadonMeasure, window_mass: float, samples: int) -> SampleGrid:
    t_lo, t_hi = -float(window_mass), float(window_mass)
    cell = (t_hi - t_lo) / samples
    ts = t_lo + cell * (np.arange(samples) + 0.5)
    xs = np.asarray(m.inv_cdf(ts), float)
    return SampleGrid(ts=ts, xs=xs, cell=cell, t_lo=t_lo, t_hi=t_hi)


def weight_cell_masses(m: RadonMeasure, wfn: RealFunction,
                       grid: SampleGrid) -> np.ndarray:
    """Integral of the weight over each grid cell, via one cumulative table."""
    lo = float(m.inv_cdf(grid.t_lo))
    hi = float(m.inv_cdf(grid.t_hi))
    clipped = replace(wfn, support=make_interval(m, lo, hi), levels=None)
    tab = LqTable(m, clipped, Exponent.of(1), cells=max(2048, 2 * grid.ts.size))
    edges = np.concatenate([grid.ts - grid.cell / 2.0, [grid.t_hi]])
    return np.asarray(tab.mass_between(edges[:-1], edges[1:]), float)


def lambda_grid(top: float, count: int) -> np.ndarray:
    """Log grid over three decades below the observed peak."""
    if not math.isfinite(top) or top <= 0.0:
        return np.array([1.0])
    return np.geomspace(1e-3 * top, top, count)


def _top(prof: np.ndarray) -> float:
    vals = prof[np.isfinite(prof)]
    return float(vals.max()) if vals.size else 0.0


def _level_sums(values: np.ndarray, prof: np.ndarray, lams: np.ndarray) -> np.ndarray:
    """Sum of values over {prof > lam} for every lam at once."""
    mask = prof[None, :] > lams[:, None]
    return mask.astype(float) @ values


def _rgrid(m: RadonMeasure, f: RealFunction, gs: int) -> np.ndarray:
    return default_r_grid(m.mass(f.support), 64 * gs)


def _ratio(lhs: float, rhs: float) -> float:
    if lhs == 0.0:
        return 0.0
    if not (rhs > 0.0):
        return math.inf
    return lhs / rhs


def _row(function: str, lam, lhs: float, rhs: float, note: str = "") -> dict:
    return {"function": function, "lam": None if lam is None else float(lam),
            "lhs": float(lhs), "rhs_core": float(rhs),
            "ratio": _ratio(float(lhs), float(rhs)), "note": note}


def _homog_ok(r1: float, r2: float, tol: float = 1e-9) -> bool:
    if not (math.isfinite(r1) and math.isfinite(r2)):
        return r1 == r2
    return abs(r1 - r2) <= tol * max(1.0, abs(r1), abs(r2))


def _potential_rows(m: RadonMeasure, f: RealFunction, k: Kernel,
                    xs: np.ndarray, panels: int) -> np.ndarray:
    try:
        return potential_profile(m, f, k, xs, base_panels=panels)
    except (DivergenceError, QuadratureError) as e:
        raise NumericalFailure(f"potential of {f.label} diverges: {e}") from e


def _lq_or_inf(m, f, q) -> float:
    try:
        return lq_norm(m, f, f.support, q)
    except (DivergenceError, QuadratureError):
        return math.inf


# ---------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    target: str
    verdict: str
    empirical_constant: float
    refinement_stability: float
    homogeneity_ok: bool
    witness: dict
    rows: list
    details: dict
    meta: dict

    def to_dict(self) -> dict:
        return _json_safe({
            "target": self.target,
            "verdict": self.verdict,
            "empirical_constant": self.empirical_constant,
            "refinement_stability": self.refinement_stability,
            "homogeneity_ok": self.homogeneity_ok,
            "witness": self.witness,
            "rows": self.rows,
            "details": self.details,
            "meta": self.meta,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _json_safe(obj):
    """Plain JSON types only; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        obj = obj.item()
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return {math.inf: "inf", -math.inf: "-inf"}.get(obj, "nan")
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    return obj


def write_report(report: VerificationReport, outdir, stem: str = "report"):
    """report.json plus a flat CSV, one line per row, in outdir."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    jpath = out / f"{stem}.json"
    jpath.write_text(report.to_json())
    cpath = out / f"{stem}.csv"
    meta = report.meta
    with open(cpath, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["target", "function", "lam", "lhs", "rhs_core", "ratio",
                     "note", "version", "seed", "samples", "lambda_count",
                     "grid_scale"])
        for r in report.rows:
            lam = "" if r.get("lam") is None else repr(float(r["lam"]))
            wr.writerow([report.target, r["function"], lam,
                         repr(float(r["lhs"])), repr(float(r["rhs_core"])),
                         repr(float(r["ratio"])), r.get("note", ""),
                         meta["version"], meta["seed"], meta["samples"],
                         meta["lambda_count"], meta["grid_scale"]])
    return jpath, cpath


def _meta(scn: Scenario, gs: int) -> dict:
    return {"version": TOOL_VERSION, "seed": scn.seed, "scenario": scn.name,
            "target": scn.target, "grid_scale": gs,
            "samples": scn.samples * gs, "lambda_count": scn.lambda_count * gs,
            "window_mass": scn.window_mass}


def _finish(scn: Scenario, gs: int, rows: list, constant: float, details: dict,
            homo: bool, rows_ok: bool = True, verdict: str | None = None,
            witness_rows: list | None = None) -> VerificationReport:
    pool = rows if witness_rows is None else witness_rows
    witness = max(pool, key=lambda r: r["ratio"], default=None) if pool else None
    if verdict is None:
        ok = math.isfinite(constant) and homo and rows_ok
        verdict = "pass" if ok else "fail"
    return VerificationReport(
        target=scn.target, verdict=verdict, empirical_constant=float(constant),
        refinement_stability=0.0, homogeneity_ok=bool(homo),
        witness=dict(witness) if witness else {}, rows=rows, details=details,
        meta=_meta(scn, gs))


def _max_ratio(rows: list, note: str | None = "") -> float:
    vals = [r["ratio"] for r in rows if note is None or r["note"] == note]
    return max(vals, default=0.0)


# ---------------------------------------------------------------------------
# runners


def run_thm21(scn: Scenario, grid_scale: int = 1,
              check_homogeneity: bool = True) -> VerificationReport:
    """Weighted weak bound for the maximal operator, both variants.

    Part 1 compares (sum of v^theta over the level set)^(1/theta) with
    the q1 mean of fv over lambda; part 2 swaps the right side for the
    amalgam/weak product with the interpolation exponent.
    """
    gs = grid_scale
    part2 = scn.target == "thm21_part2"
    q, alpha, beta = _exponent(scn, "q"), _exponent(scn, "alpha"), _exponent(scn, "beta")
    q1, alpha1, p1 = _exponent(scn, "q1"), _exponent(scn, "alpha1"), _exponent(scn, "p1")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    _require(_le(alpha.recip, q.recip) and _le(beta.recip, alpha.recip),
             "need q <= alpha <= beta")
    _require(_le(q1.recip, q.recip), "need q <= q1")
    _require(_le(alpha1.recip, q1.recip) and _le(p1.recip, alpha1.recip),
             "need q1 <= alpha1 <= p1")
    inv_theta = q1.recip - beta.recip
    _require(inv_theta > _EPS, "need 1/q1 - 1/beta > 0")
    _require(_le(inv_theta, p1.recip), "need 1/q1 - 1/beta <= 1/p1")
    if part2:
        _require(alpha.recip > beta.recip, "part 2 needs alpha < beta")
        inv_s = alpha.recip - beta.recip
        expo = (q1.recip - alpha1.recip) / inv_s
    theta = 1.0 / inv_theta

    m = _scenario_measure(scn)
    wgt = _scenario_weight(scn)
    cond = _weight_gate(scn, m, wgt, q, q1, beta, gs)
    fam = _scenario_functions(scn, alpha)
    grid = sample_grid(m, scn.window_mass, scn.samples * gs)
    wmass = weight_cell_masses(m, wgt.powered(theta), grid)
    mcount = 64 * gs

    rows, homo = [], True
    details = {"theta": theta, "weight_condition": cond.constant,
               "weight_intervals": cond.interval_count}
    if part2:
        details["s"] = 1.0 / inv_s
        details["interpolation_exponent"] = expo

    for fi, f in enumerate(fam):
        fv = _fv(f, wgt)
        prof = maximal_profile(m, f, q, beta, grid.xs,
                               mass_grid=default_mass_grid(m, f, grid.xs, mcount))
        lams = lambda_grid(_top(prof), scn.lambda_count * gs)
        if part2:
            a1 = amalgam_norm(m, fv, q1, p1, alpha1, r_grid=_rgrid(m, fv, gs))[0]
            a2 = amalgam_norm(m, f, q, "inf", alpha, r_grid=_rgrid(m, f, gs))[0]
        else:
            base = _lq_or_inf(m, fv, q1)
        sums = _level_sums(wmass, prof, lams)
        for lam, sm in zip(lams, sums):
            lhs = sm ** inv_theta
            if part2:
                rhs = (a1 / lam) * (a2 / lam) ** expo
            else:
                rhs = base / lam
            rows.append(_row(f.label, lam, lhs, rhs))

        if check_homogeneity and fi == 0 and lams.size:
            j = len(lams) // 2
            r1 = rows[j]["ratio"]
            f2 = scaled(f, 2.0)
            fv2 = _fv(f2, wgt)
            prof2 = maximal_profile(m, f2, q, beta, grid.xs,
                                    mass_grid=default_mass_grid(m, f2, grid.xs, mcount))
            lam2 = 2.0 * lams[j]
            lhs2 = float(np.sum(wmass[prof2 > lam2])) ** inv_theta
            if part2:
                b1 = amalgam_norm(m, fv2, q1, p1, alpha1, r_grid=_rgrid(m, fv2, gs))[0]
                b2 = amalgam_norm(m, f2, q, "inf", alpha, r_grid=_rgrid(m, f2, gs))[0]
                rhs2 = (b1 / lam2) * (b2 / lam2) ** expo
            else:
                rhs2 = _lq_or_inf(m, fv2, q1) / lam2
            homo = _homog_ok(r1, _ratio(lhs2, rhs2))

    return _finish(scn, gs, rows, _max_ratio(rows), details, homo)


def run_cor23_24(scn: Scenario, grid_scale: int = 1,
                 check_homogeneity: bool = True) -> VerificationReport:
    """Weak (strong) s-norm of the sampled maximal function against the
    amalgam (Lebesgue) norm of the input."""
    gs = grid_scale
    cor24 = scn.target == "cor24"
    q, alpha, beta = _exponent(scn, "q"), _exponent(scn, "alpha"), _exponent(scn, "beta")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    _require(alpha.recip > beta.recip, "need alpha < beta")
    if cor24:
        _require(q.recip > alpha.recip, "need q < alpha")
    else:
        p = _exponent(scn, "p")
        _require(_le(alpha.recip, q.recip), "need q <= alpha")
        gap = q.recip - beta.recip
        _require(gap > _EPS, "need 1/q - 1/beta > 0")
        _require(_le(gap, p.recip) and _le(p.recip, alpha.recip),
                 "need 1/q - 1/beta <= 1/p <= 1/alpha")
    inv_s = alpha.recip - beta.recip
    s = 1.0 / inv_s

    m = _scenario_measure(scn)
    fam = _scenario_functions(scn, alpha)
    grid = sample_grid(m, scn.window_mass, scn.samples * gs)
    mcount = 64 * gs
    rows, homo = [], True
    details = {"s": s}

    def strong(prof):
        return float(np.sum(prof ** s) * grid.cell) ** inv_s

    for fi, f in enumerate(fam):
        prof = maximal_profile(m, f, q, beta, grid.xs,
                               mass_grid=default_mass_grid(m, f, grid.xs, mcount))
        if cor24:
            rhs = _lq_or_inf(m, f, alpha)
            rows.append(_row(f.label, None, strong(prof), rhs))
        else:
            rhs = amalgam_norm(m, f, q, p, alpha, r_grid=_rgrid(m, f, gs))[0]
            lams = lambda_grid(_top(prof), scn.lambda_count * gs)
            counts = _level_sums(np.full(prof.shape, grid.cell), prof, lams)
            for lam, mu in zip(lams, counts):
                rows.append(_row(f.label, lam, lam * mu ** inv_s, rhs))

        if check_homogeneity and fi == 0:
            f2 = scaled(f, 2.0)
            prof2 = maximal_profile(m, f2, q, beta, grid.xs,
                                    mass_grid=default_mass_grid(m, f2, grid.xs, mcount))
            if cor24:
                r1 = rows[0]["ratio"]
                r2 = _ratio(strong(prof2), _lq_or_inf(m, f2, alpha))
            else:
                j = len(lams) // 2
                r1 = rows[j]["ratio"]
                lam2 = 2.0 * lams[j]
                mu2 = float(np.sum(prof2 > lam2)) * grid.cell
                rhs2 = amalgam_norm(m, f2, q, p, alpha, r_grid=_rgrid(m, f2, gs))[0]
                r2 = _ratio(lam2 * mu2 ** inv_s, rhs2)
            homo = _homog_ok(r1, r2)

    return _finish(scn, gs, rows, _max_ratio(rows), details, homo)


def run_thm31_goodlambda(scn: Scenario, grid_scale: int = 1,
                         check_homogeneity: bool = True) -> VerificationReport:
    """sup lam^kappa rho{Kf > lam} against the same sup for the maximal
    function, rho = w dmu, shared lambda grid, one row per (f, kappa)."""
    gs = grid_scale
    q, alpha, beta = _exponent(scn, "q"), _exponent(scn, "alpha"), _exponent(scn, "beta")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    invp = q.recip - beta.recip
    _require(invp > _EPS, "need 1/q - 1/beta > 0")
    p = Exponent.from_recip(invp)
    _require(_le(alpha.recip, q.recip) and _le(invp, alpha.recip),
             "need q <= alpha <= p with 1/p = 1/q - 1/beta")

    m = _scenario_measure(scn)
    growth = _growth_gate(m)
    k = _scenario_kernel(scn)
    _kernel_eta_gate(m, k, beta)
    wgt = _scenario_weight(scn)
    small_fam = _gate_family(m, gs)[: 18 * gs]
    sampler = SubsetSampler(seed=scn.seed, strata=(0.05, 0.15, 0.4, 0.8),
                            draws_per_stratum=1)
    try:
        delta_hat = a_infty_epsilon_delta(m, wgt, 0.5, small_fam, sampler)
    except ValueError as e:
        raise HypothesisRejected(f"{scn.name}: weight: {e}") from e
    _require(delta_hat > 0.0,
             f"{scn.name}: weight failed the mass-concentration sampling")

    grid = sample_grid(m, scn.window_mass, scn.samples * gs)
    wmass = weight_cell_masses(m, wgt.fn, grid)
    mcount = 64 * gs
    panels = 24 * gs
    rows, homo = [], True
    details = {"growth_constant": growth, "delta_hat": delta_hat, "eps": 0.5,
               "p": p.value, "amalgam_norms": {}}

    for fi, f in enumerate(fam := _scenario_functions(scn, alpha)):
        af = amalgam_norm(m, f, q, p, alpha, r_grid=_rgrid(m, f, gs))[0]
        _require(math.isfinite(af), f"{f.label} has infinite amalgam norm")
        details["amalgam_norms"][f.label] = af
        kprof = _potential_rows(m, f, k, grid.xs, panels)
        mprof = maximal_profile(m, f, q, beta, grid.xs,
                                mass_grid=default_mass_grid(m, f, grid.xs, mcount))
        lams = lambda_grid(max(_top(kprof), _top(mprof)), scn.lambda_count * gs)
        sums_k = _level_sums(wmass, kprof, lams)
        sums_m = _level_sums(wmass, mprof, lams)
        for kappa in scn.kappas:
            pw = lams ** kappa
            lhs = float(np.max(pw * sums_k))
            rhs = float(np.max(pw * sums_m))
            rows.append(_row(f.label, None, lhs, rhs, note=f"kappa={kappa:g}"))

        if check_homogeneity and fi == 0:
            kappa = scn.kappas[0]
            r1 = rows[0]["ratio"]
            f2 = scaled(f, 2.0)
            kprof2 = _potential_rows(m, f2, k, grid.xs, panels)
            mprof2 = maximal_profile(m, f2, q, beta, grid.xs,
                                     mass_grid=default_mass_grid(m, f2, grid.xs, mcount))
            lams2 = 2.0 * lams
            pw2 = lams2 ** kappa
            lhs2 = float(np.max(pw2 * _level_sums(wmass, kprof2, lams2)))
            rhs2 = float(np.max(pw2 * _level_sums(wmass, mprof2, lams2)))
            homo = _homog_ok(r1, _ratio(lhs2, rhs2))

    return _finish(scn, gs, rows, _max_ratio(rows, note=None), details, homo)


def run_lem32(scn: Scenario, grid_scale: int = 1,
              check_homogeneity: bool = True) -> VerificationReport:
    """Local level-set estimate with the split-threshold fitted.

    For each height a the interval I is grown from the level set of the
    sampled potential until both endpoints fall at or below a; the fit
    B is the smallest split factor making the off-interval contribution
    at most a*b/2 for every tested height.  Grid points b below the fit
    are dropped; if nothing survives the scenario is skipped, reported
    but not failed.
    """
    gs = grid_scale
    q, beta = _exponent(scn, "q"), _exponent(scn, "beta")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    invp = q.recip - beta.recip
    _require(invp > _EPS, "need 1/q - 1/beta > 0")
    pval = 1.0 / invp

    m = _scenario_measure(scn)
    k = _scenario_kernel(scn)
    _kernel_eta_gate(m, k, beta)
    fam = _scenario_functions(scn)
    grid = sample_grid(m, scn.window_mass, scn.samples * gs)
    mcount = 64 * gs
    panels = 24 * gs

    opts = scn.options
    a_fracs = tuple(float(v) for v in opts.get("a_fracs", (0.5, 0.25)))
    b_grid = tuple(float(v) for v in opts.get("b_grid", (4.0, 6.0, 8.0)))
    c_grid = tuple(float(v) for v in opts.get("c_grid",
                                              np.geomspace(0.02, 0.5, 5)))
    rows, homo = [], True
    intervals, notes = [], []
    b_thresholds = []
    n = grid.xs.size

    def interval_for(kprof, a):
        mask = np.isfinite(kprof) & (kprof > a)
        if not mask.any():
            return 0, n - 1
        j_lo = int(np.argmax(mask)) - 1
        j_hi = n - int(np.argmax(mask[::-1]))
        if j_lo < 0 or j_hi > n - 1:
            return None
        return j_lo, j_hi

    for fi, f in enumerate(fam):
        kprof = _potential_rows(m, f, k, grid.xs, panels)
        mprof = maximal_profile(m, f, q, beta, grid.xs,
                                mass_grid=default_mass_grid(m, f, grid.xs, mcount))
        top = _top(kprof)
        for frac in a_fracs:
            a = frac * top if top > 0 else 1.0
            found = interval_for(kprof, a)
            if found is None:
                notes.append(f"{f.label}: no interval inside the window at a={a:g}")
                continue
            j1, j2 = found
            x1, x2 = float(grid.xs[j1]), float(grid.xs[j2])
            mu_i = (j2 - j1) * grid.cell
            sl = slice(j1, j2 + 1)
            lo = max(f.support.a, x1)
            hi = min(f.support.b, x2)
            if lo < hi:
                f_in = replace(f, support=make_interval(m, lo, hi), levels=None,
                               label=f"{f.label}|I")
                k_in = _potential_rows(m, f_in, k, grid.xs[sl], panels)
                tail = np.clip(kprof[sl] - k_in, 0.0, None)
            else:
                tail = kprof[sl]
            sup_tail = _top(tail)
            thr = 2.0 * sup_tail / a
            b_thresholds.append(thr)
            intervals.append({"function": f.label, "a": a, "x1": x1, "x2": x2,
                              "mass": mu_i, "b_threshold": thr})
            bs = [b for b in b_grid if b >= thr * (1.0 - 1e-9)]
            if not bs:
                notes.append(f"{f.label}: all of b_grid sits below the fitted "
                             f"threshold {thr:g} at a={a:g}")
                continue
            for b in bs:
                for c in c_grid:
                    cond = (kprof[sl] > a * b) & (mprof[sl] <= a * c)
                    lhs = float(np.sum(cond)) * grid.cell
                    rhs = (c / b) ** pval * mu_i
                    rows.append(_row(f.label, a, lhs, rhs, note=f"b={b:g} c={c:g}"))

        if check_homogeneity and fi == 0 and rows:
            first = rows[0]
            a2 = 2.0 * first["lam"]
            f2 = scaled(f, 2.0)
            kprof2 = _potential_rows(m, f2, k, grid.xs, panels)
            mprof2 = maximal_profile(m, f2, q, beta, grid.xs,
                                     mass_grid=default_mass_grid(m, f2, grid.xs, mcount))
            found = interval_for(kprof2, a2)
            if found is not None:
                j1, j2 = found
                sl = slice(j1, j2 + 1)
                b, c = (float(v) for v in first["note"].replace("b=", "")
                        .replace("c=", "").split())
                cond = (kprof2[sl] > a2 * b) & (mprof2[sl] <= a2 * c)
                lhs2 = float(np.sum(cond)) * grid.cell
                rhs2 = (c / b) ** pval * (j2 - j1) * grid.cell
                homo = _homog_ok(first["ratio"], _ratio(lhs2, rhs2))

    details = {"p": pval, "b_fit": max(b_thresholds, default=math.inf),
               "intervals": intervals, "notes": notes}
    if not rows:
        details["diagnostic"] = "no admissible (interval, b) pair; scenario skipped"
        return _finish(scn, gs, rows, 0.0, details, True, verdict="skip")
    return _finish(scn, gs, rows, _max_ratio(rows, note=None), details, homo)


def run_lem33(scn: Scenario, grid_scale: int = 1,
              check_homogeneity: bool = True) -> VerificationReport:
    """Far-field domination of the potential by the maximal function.

    Flanking intervals of exactly the support's mass are attached on
    both sides; probes march away geometrically in mass and each row
    compares Kf at the probe with the mass-ratio times the maximal
    function there.  The empirical constant is the fitted domination
    factor.
    """
    gs = grid_scale
    q, beta = _exponent(scn, "q"), _exponent(scn, "beta")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    _require(_le(beta.recip, q.recip), "need q <= beta")
    m = _scenario_measure(scn)
    k = _scenario_kernel(scn)
    _kernel_eta_gate(m, k, beta)
    fam = _scenario_functions(scn)

    rows, homo = [], True
    n_off = 5 * gs
    for fi, f in enumerate(fam):
        core = m.mass(f.support)
        _require(core > 0.0, f"{f.label} has zero-mass support")
        t1, t2 = m.cdf(f.support.a), m.cdf(f.support.b)
        y1 = float(m.inv_cdf(t1 - core))
        y2 = float(m.inv_cdf(t2 + core))
        offs = core * np.geomspace(0.5, 8.0, n_off)
        for off in offs:
            for side, label in ((1.0, "right"), (-1.0, "left")):
                t_x = (t2 + core + off) if side > 0 else (t1 - core - off)
                x = float(m.inv_cdf(t_x))
                lhs, rhs = farfield_bound_check(m, f, q, beta, y1, f.support.a,
                                                f.support.b, y2, x, k)
                rows.append(_row(f.label, off, lhs, rhs, note=label))

        if check_homogeneity and fi == 0 and rows:
            f2 = scaled(f, 2.0)
            off = float(offs[0])
            x = float(m.inv_cdf(t2 + core + off))
            lhs2, rhs2 = farfield_bound_check(m, f2, q, beta, y1, f.support.a,
                                              f.support.b, y2, x, k)
            homo = _homog_ok(rows[0]["ratio"], _ratio(lhs2, rhs2))

    return _finish(scn, gs, rows, _max_ratio(rows, note=None),
                   {"offsets": n_off * 2}, homo)


def run_prop34_cor35_cor36(scn: Scenario, grid_scale: int = 1,
                           check_homogeneity: bool = True) -> VerificationReport:
    """Weak bounds for the potential: weighted level sets, the two-step
    product chain, and the pure weak-to-weak form with auto-chosen q, p."""
    gs = grid_scale
    target = scn.target
    m = _scenario_measure(scn)
    growth = _growth_gate(m)
    k = _scenario_kernel(scn)
    fam = None
    rows, homo = [], True
    rows_ok = True
    details = {"growth_constant": growth}
    panels = 24 * gs
    mcount = 64 * gs

    alpha = _exponent(scn, "alpha")
    beta = _exponent(scn, "beta")
    _kernel_eta_gate(m, k, beta)
    grid = sample_grid(m, scn.window_mass, scn.samples * gs)

    if target == "prop34":
        q, q1 = _exponent(scn, "q"), _exponent(scn, "q1")
        alpha1, p1 = _exponent(scn, "alpha1"), _exponent(scn, "p1")
        _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
        _require(_le(alpha.recip, q.recip) and _le(beta.recip, alpha.recip),
                 "need q <= alpha <= beta")
        _require(alpha.recip > beta.recip, "need alpha < beta")
        _require(_le(q1.recip, q.recip), "need q <= q1")
        _require(_le(alpha1.recip, q1.recip) and _le(p1.recip, alpha1.recip),
                 "need q1 <= alpha1 <= p1")
        inv_theta = q1.recip - beta.recip
        _require(inv_theta > _EPS, "need 1/q1 - 1/beta > 0")
        theta = 1.0 / inv_theta
        inv_s = alpha.recip - beta.recip
        expo = (q1.recip - alpha1.recip) / inv_s
        wgt = _scenario_weight(scn)
        cond = _weight_gate(scn, m, wgt, q, q1, beta, gs)
        wmass = weight_cell_masses(m, wgt.powered(theta), grid)
        details.update({"theta": theta, "s": 1.0 / inv_s,
                        "weight_condition": cond.constant,
                        "interpolation_exponent": expo})
        fam = _scenario_functions(scn, alpha)

        for fi, f in enumerate(fam):
            fv = _fv(f, wgt)
            kprof = _potential_rows(m, f, k, grid.xs, panels)
            a1 = amalgam_norm(m, fv, q1, p1, alpha1, r_grid=_rgrid(m, fv, gs))[0]
            a2 = amalgam_norm(m, f, q, "inf", alpha, r_grid=_rgrid(m, f, gs))[0]
            lams = lambda_grid(_top(kprof), scn.lambda_count * gs)
            sums = _level_sums(wmass, kprof, lams)
            for lam, sm in zip(lams, sums):
                rhs = (a1 / lam) * (a2 / lam) ** expo
                rows.append(_row(f.label, lam, sm ** inv_theta, rhs))
            if check_homogeneity and fi == 0 and lams.size:
                j = len(lams) // 2
                f2 = scaled(f, 2.0)
                fv2 = _fv(f2, wgt)
                kprof2 = _potential_rows(m, f2, k, grid.xs, panels)
                lam2 = 2.0 * lams[j]
                lhs2 = float(np.sum(wmass[kprof2 > lam2])) ** inv_theta
                b1 = amalgam_norm(m, fv2, q1, p1, alpha1, r_grid=_rgrid(m, fv2, gs))[0]
                b2 = amalgam_norm(m, f2, q, "inf", alpha, r_grid=_rgrid(m, f2, gs))[0]
                rhs2 = (b1 / lam2) * (b2 / lam2) ** expo
                homo = _homog_ok(rows[j]["ratio"], _ratio(lhs2, rhs2))

    elif target == "cor35":
        q, p = _exponent(scn, "q"), _exponent(scn, "p")
        _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
        _require(_le(alpha.recip, q.recip), "need q <= alpha")
        _require(alpha.recip > beta.recip, "need alpha < beta")
        inv_th = q.recip - beta.recip
        _require(_le(inv_th, p.recip) and _le(p.recip, alpha.recip),
                 "need 1/q - 1/beta <= 1/p <= 1/alpha")
        theta = 1.0 / inv_th
        inv_s = alpha.recip - beta.recip
        details.update({"theta": theta, "s": 1.0 / inv_s})
        fam = _scenario_functions(scn, alpha)

        for fi, f in enumerate(fam):
            a1 = amalgam_norm(m, f, q, p, alpha, r_grid=_rgrid(m, f, gs))[0]
            a2 = amalgam_norm(m, f, q, "inf", alpha, r_grid=_rgrid(m, f, gs))[0]
            rows.append(_row(f.label, None, a2, a1, note="weak_le_full"))
            if rows[-1]["ratio"] > 1.0 + 1e-9:
                rows_ok = False
            mid = a1 ** (theta * inv_s) * a2 ** (1.0 - theta * inv_s)
            rows.append(_row(f.label, None, mid, a1, note="chain"))
            if rows[-1]["ratio"] > 1.0 + 1e-9:
                rows_ok = False
            kprof = _potential_rows(m, f, k, grid.xs, panels)
            lams = lambda_grid(_top(kprof), scn.lambda_count * gs)
            counts = _level_sums(np.full(kprof.shape, grid.cell), kprof, lams)
            base = len(rows)
            for lam, mu in zip(lams, counts):
                rows.append(_row(f.label, lam, lam * mu ** inv_s, mid))
            if check_homogeneity and fi == 0 and lams.size:
                j = len(lams) // 2
                f2 = scaled(f, 2.0)
                kprof2 = _potential_rows(m, f2, k, grid.xs, panels)
                lam2 = 2.0 * lams[j]
                mu2 = float(np.sum(kprof2 > lam2)) * grid.cell
                b1 = amalgam_norm(m, f2, q, p, alpha, r_grid=_rgrid(m, f2, gs))[0]
                b2 = amalgam_norm(m, f2, q, "inf", alpha, r_grid=_rgrid(m, f2, gs))[0]
                mid2 = b1 ** (theta * inv_s) * b2 ** (1.0 - theta * inv_s)
                homo = _homog_ok(rows[base + j]["ratio"],
                                 _ratio(lam2 * mu2 ** inv_s, mid2))

    elif target == "cor36":
        _require(alpha.recip < 1.0, f"need alpha > 1, got {alpha.value:g}")
        _require(not beta.is_inf, "need beta < inf")
        _require(alpha.recip > beta.recip, "need alpha < beta")
        m_lo = alpha.recip - beta.recip
        m_hi = min(alpha.recip, 1.0 - beta.recip)
        _require(m_lo < m_hi - _EPS, "empty admissible (q, p) window")
        mid_m = 0.5 * (m_lo + m_hi)
        q = Exponent.from_recip(mid_m + beta.recip)
        p = Exponent.from_recip(0.5 * (mid_m + alpha.recip))
        inv_s = m_lo
        details.update({"q": q.value, "p": p.value, "s": 1.0 / inv_s})
        fam = _scenario_functions(scn, alpha)

        for fi, f in enumerate(fam):
            rhs = weak_norm(m, f, alpha)
            kprof = _potential_rows(m, f, k, grid.xs, panels)
            lams = lambda_grid(_top(kprof), scn.lambda_count * gs)
            counts = _level_sums(np.full(kprof.shape, grid.cell), kprof, lams)
            base = len(rows)
            for lam, mu in zip(lams, counts):
                rows.append(_row(f.label, lam, lam * mu ** inv_s, rhs))
            if check_homogeneity and fi == 0 and lams.size:
                j = len(lams) // 2
                f2 = scaled(f, 2.0)
                kprof2 = _potential_rows(m, f2, k, grid.xs, panels)
                lam2 = 2.0 * lams[j]
                mu2 = float(np.sum(kprof2 > lam2)) * grid.cell
                homo = _homog_ok(rows[base + j]["ratio"],
                                 _ratio(lam2 * mu2 ** inv_s, weak_norm(m, f2, alpha)))
    else:
        raise ConfigError(f"{scn.name}: unexpected target {target!r}")

    primary = [r for r in rows if r["note"] == ""]
    return _finish(scn, gs, rows, _max_ratio(rows), details, homo,
                   rows_ok=rows_ok, witness_rows=primary)


def run_prop41_steinweiss(scn: Scenario, grid_scale: int = 1,
                          check_homogeneity: bool = True) -> VerificationReport:
    """Fractional integral on the power measure, Lebesgue data.

    The twist F = |x|^a f converts the convolution against |x|^(gamma-1)
    into the measure-side potential; norms on the right live under the
    power measure while the profile itself is integrated under Lebesgue.
    The closing weighted inequality stays entirely on the Lebesgue side.
    """
    gs = grid_scale
    sw = scn.target == "steinweiss"
    a = _real_param(scn, "a")
    gamma = _real_param(scn, "gamma")
    alpha = _exponent(scn, "alpha")
    _require(0.0 < a < gamma < 1.0, "need 0 < a < gamma < 1")
    _require(_le(alpha.recip, 1.0), f"need alpha >= 1, got {alpha.value:g}")
    ratio_ga = (gamma - a) / (1.0 - a)
    _require(alpha.recip > ratio_ga + _EPS,
             "need alpha < (1 - a)/(gamma - a)")
    inv_eta = 1.0 - ratio_ga
    assert abs(inv_eta - (1.0 - gamma) / (1.0 - a)) < 1e-12
    if "eta" in scn.exponents:
        declared = Exponent.of(scn.exponents["eta"])
        _require(abs(declared.recip - inv_eta) <= 1e-9,
                 f"declared eta {declared.value:g} clashes with the derived "
                 f"value {1.0 / inv_eta:g}")
    inv_s = alpha.recip - ratio_ga
    s = 1.0 / inv_s
    if scn.kernel is not None:
        kb = _scenario_kernel(scn)
        _require(kb.singular_exponent is not None
                 and abs((1.0 + kb.singular_exponent) - gamma) <= 1e-12,
                 "kernel block must match exponents.gamma")
    k = riesz_kernel(gamma)
    if sw:
        _require(alpha.recip < 1.0, "the closing inequality needs alpha > 1")

    m_a = power_measure(a)
    leb = lebesgue()
    fam = _scenario_functions(scn, alpha)
    panels = 24 * gs
    rows, homo = [], True
    details = {"s": s, "eta": 1.0 / inv_eta}

    if sw:
        x_hi = float(m_a.inv_cdf(scn.window_mass))
        n = scn.samples * gs
        cell = 2.0 * x_hi / n
        xs = -x_hi + cell * (np.arange(n) + 0.5)
        wfac = np.abs(xs) ** (-a * inv_s)

        def closing(prof):
            with np.errstate(over="ignore"):
                return float(np.nansum((wfac * prof) ** s) * cell) ** inv_s

        for fi, f in enumerate(fam):
            prof = _potential_rows(leb, f, k, xs, panels)
            rhs = _lq_or_inf(leb, power_twist(f, a * (1.0 - alpha.recip)), alpha)
            rows.append(_row(f.label, None, closing(prof), rhs))
            if check_homogeneity and fi == 0:
                f2 = scaled(f, 2.0)
                prof2 = _potential_rows(leb, f2, k, xs, panels)
                rhs2 = _lq_or_inf(leb, power_twist(f2, a * (1.0 - alpha.recip)), alpha)
                homo = _homog_ok(rows[0]["ratio"], _ratio(closing(prof2), rhs2))
        return _finish(scn, gs, rows, _max_ratio(rows), details, homo)

    q, p = _exponent(scn, "q"), _exponent(scn, "p")
    _require(_le(q.recip, 1.0), f"need q >= 1, got {q.value:g}")
    _require(_le(alpha.recip, q.recip), "need q <= alpha")
    inv_th = q.recip - ratio_ga
    _require(inv_th > _EPS, "need 1/q > (gamma - a)/(1 - a)")
    _require(_le(inv_th, p.recip) and _le(p.recip, alpha.recip),
             "need 1/theta <= 1/p <= 1/alpha")
    theta = 1.0 / inv_th
    details["theta"] = theta
    part2 = alpha.recip < 1.0
    grid = sample_grid(m_a, scn.window_mass, scn.samples * gs)

    for fi, f in enumerate(fam):
        bigf = power_twist(f, a)
        prof = _potential_rows(leb, f, k, grid.xs, panels)
        a1 = amalgam_norm(m_a, bigf, q, p, alpha, r_grid=_rgrid(m_a, bigf, gs))[0]
        a2 = amalgam_norm(m_a, bigf, q, "inf", alpha, r_grid=_rgrid(m_a, bigf, gs))[0]
        rhs1 = a1 ** (theta * inv_s) * a2 ** (1.0 - theta * inv_s)
        rhs2 = weak_norm(m_a, bigf, alpha) if part2 else None
        lams = lambda_grid(_top(prof), scn.lambda_count * gs)
        counts = _level_sums(np.full(prof.shape, grid.cell), prof, lams)
        base = len(rows)
        for lam, mu in zip(lams, counts):
            lhs = lam * mu ** inv_s
            rows.append(_row(f.label, lam, lhs, rhs1))
            if part2:
                rows.append(_row(f.label, lam, lhs, rhs2, note="part2"))
        if check_homogeneity and fi == 0 and lams.size:
            j = len(lams) // 2
            jrow = base + (2 * j if part2 else j)
            f2 = scaled(f, 2.0)
            bigf2 = power_twist(f2, a)
            prof2 = _potential_rows(leb, f2, k, grid.xs, panels)
            lam2 = 2.0 * lams[j]
            mu2 = float(np.sum(prof2 > lam2)) * grid.cell
            b1 = amalgam_norm(m_a, bigf2, q, p, alpha, r_grid=_rgrid(m_a, bigf2, gs))[0]
            b2 = amalgam_norm(m_a, bigf2, q, "inf", alpha,
                              r_grid=_rgrid(m_a, bigf2, gs))[0]
            r2 = _ratio(lam2 * mu2 ** inv_s,
                        b1 ** (theta * inv_s) * b2 ** (1.0 - theta * inv_s))
            homo = _homog_ok(rows[jrow]["ratio"], r2)

    return _finish(scn, gs, rows, _max_ratio(rows, note=None), details, homo,
                   witness_rows=[r for r in rows if r["note"] == ""])


def run_norm_properties(scn: Scenario, grid_scale: int = 1,
                        check_homogeneity: bool = True) -> VerificationReport:
    """Norm cross-checks on one family: the q = p = alpha collapse, the
    weak-vs-strong comparison, the p-monotonicity of block norms, and
    the weak-to-amalgam embedding constant."""
    gs = grid_scale
    q, p, alpha = _exponent(scn, "q"), _exponent(scn, "p"), _exponent(scn, "alpha")
    if q.recip < alpha.recip or alpha.recip < p.recip:
        _reject("need q <= alpha <= p for a nontrivial space")
    m = _scenario_measure(scn)
    fam = _scenario_functions(scn, alpha)
    identity_mode = (q.value == p.value == alpha.value)
    tol_identity = float(scn.tolerances.get("identity", 1e-3))
    rows, homo, rows_ok = [], True, True

    for fi, f in enumerate(fam):
        try:
            full = amalgam_norm(m, f, q, p, alpha, r_grid=_rgrid(m, f, gs))[0]
        except TrivialSpaceError as e:
            raise HypothesisRejected(str(e)) from e
        weak = weak_norm(m, f, alpha)
        strong = _lq_or_inf(m, f, alpha)
        if identity_mode and math.isfinite(strong):
            rows.append(_row(f.label, None, full, strong, note="identity"))
            if abs(rows[-1]["ratio"] - 1.0) > tol_identity:
                rows_ok = False
        if math.isfinite(strong):
            rows.append(_row(f.label, None, weak, strong, note="weak_le_strong"))
            if rows[-1]["ratio"] > 1.0 + 1e-9:
                rows_ok = False
        if not identity_mode:
            tail_free = amalgam_norm(m, f, q, "inf", alpha, r_grid=_rgrid(m, f, gs))[0]
            rows.append(_row(f.label, None, tail_free, full, note="p_monotone"))
            if rows[-1]["ratio"] > 1.0 + 1e-9:
                rows_ok = False
        rows.append(_row(f.label, None, full, weak, note="embedding"))
        if check_homogeneity and fi == 0:
            f2 = scaled(f, 2.0)
            full2 = amalgam_norm(m, f2, q, p, alpha, r_grid=_rgrid(m, f2, gs))[0]
            homo = _homog_ok(rows[-1]["ratio"], _ratio(full2, weak_norm(m, f2, alpha)))

    constant = _max_ratio(rows, note="embedding")
    return _finish(scn, gs, rows, constant, {"identity_mode": identity_mode},
                   homo, rows_ok=rows_ok,
                   witness_rows=[r for r in rows if r["note"] == "embedding"])


def run_covering_trials(scn: Scenario, grid_scale: int = 1,
                        check_homogeneity: bool = True) -> VerificationReport:
    """Randomized families through the selection sweep; the constant is
    the worst observed overlap, bounded by five."""
    del check_homogeneity
    gs = grid_scale
    m = _scenario_measure(scn)
    opts = scn.options
    trials = int(opts.get("trials", 200)) * gs
    count = int(opts.get("count", 40))
    mass_range = tuple(opts.get("mass_range", (0.5, 2.0)))
    center_range = tuple(opts.get("center_range", (-4.0, 4.0)))
    worst = 1
    failure = None
    for t in range(trials):
        fam = random_family(m, count=count, seed=scn.seed + t,
                            mass_range=mass_range, center_range=center_range)
        try:
            _, overlap = select_cover(fam)
        except AssertionError as e:
            failure = f"trial {t}: {e}"
            break
        worst = max(worst, overlap)
    rows = [_row("random_families", None, float(worst), 5.0,
                 note=f"trials={trials}")]
    details = {"trials": trials, "count": count, "worst_overlap": worst,
               "coverage_failure": failure}
    rows_ok = failure is None and worst <= 5
    return _finish(scn, gs, rows, float(worst), details, True, rows_ok=rows_ok)


RUNNERS = {
    "thm21_part1": run_thm21,
    "thm21_part2": run_thm21,
    "cor23": run_cor23_24,
    "cor24": run_cor23_24,
    "thm31_goodlambda": run_thm31_goodlambda,
    "lem32": run_lem32,
    "lem33": run_lem33,
    "prop34": run_prop34_cor35_cor36,
    "cor35": run_prop34_cor35_cor36,
    "cor36": run_prop34_cor35_cor36,
    "prop41": run_prop41_steinweiss,
    "steinweiss": run_prop41_steinweiss,
    "norm_properties": run_norm_properties,
    "covering_trials": run_covering_trials,
}


def run_scenario(scn: Scenario, grid_scale: int = 1,
                 check_homogeneity: bool = True) -> VerificationReport:
    runner = RUNNERS[scn.target]
    return runner(scn, grid_scale=grid_scale, check_homogeneity=check_homogeneity)


def verify_scenario(scn: Scenario, stability_tol: float | None = None,
                    base_scale: int = 1) -> VerificationReport:
    """Base run plus a doubled-grid rerun; the relative drift of the
    empirical constant becomes refinement_stability and feeds the verdict."""
    report = run_scenario(scn, grid_scale=base_scale, check_homogeneity=True)
    tol = (stability_tol if stability_tol is not None
           else float(scn.tolerances.get("stability", DEFAULT_STABILITY_TOL)))
    report.meta["stability_tol"] = tol
    if report.verdict == "skip":
        return report
    refined = run_scenario(scn, grid_scale=2 * base_scale, check_homogeneity=False)
    c1, c2 = report.empirical_constant, refined.empirical_constant
    if c1 == 0.0 and c2 == 0.0:
        rel = 0.0
    elif math.isfinite(c1) and math.isfinite(c2):
        rel = abs(c2 - c1) / max(c1, c2)
    else:
        rel = math.inf
    report.refinement_stability = rel
    report.details["refined_constant"] = c2
    if report.verdict == "pass" and rel > tol:
        report.verdict = "fail"
    return report
