"""Experiment definitions: parameter schemas, defaults and the sweeps themselves.

Every experiment returns an :class:`ExperimentResult` holding the CSV header,
the rows (ordered by the independent variable) and a short summary.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import __version__
from .ada import ada_moments
from .csvio import ConfigError
from .fda import (
    amp_bias_delta_method,
    b2_curve,
    bias_asymptotic,
    bias_finite_n,
    bound_b1,
    bound_b2,
    nearest_envelope_index,
)
from .montecarlo import (
    RNG_DESCRIPTION,
    McConfig,
    default_replicates,
    gaussian_reference_variance,
    mc_moments,
    scalar_model_mc,
    simple_model_moments,
)
from .signal import QuantizerSpec, SineSpec

__all__ = ["EXPERIMENTS", "ExperimentConfig", "ExperimentResult", "resolve_params", "run_experiment"]


# ---------------------------------------------------------------------------
# parameter types
# ---------------------------------------------------------------------------


def _int(v) -> int:
    if isinstance(v, int) and not isinstance(v, bool):
        return v
    s = str(v).strip()
    try:
        f = float(s)
    except ValueError:
        raise ValueError(f"not an integer: {v!r}") from None
    if not f.is_integer():
        raise ValueError(f"not an integer: {v!r}")
    return int(f)


def _float(v) -> float:
    f = float(v)
    if not math.isfinite(f):
        raise ValueError(f"not a finite number: {v!r}")
    return f


def _int_list(v) -> list[int]:
    if isinstance(v, (list, tuple)):
        return [_int(x) for x in v]
    return [_int(x) for x in str(v).split(",") if x.strip()]


def _float_list(v) -> list[float]:
    if isinstance(v, (list, tuple)):
        return [_float(x) for x in v]
    return [_float(x) for x in str(v).split(",") if x.strip()]


def _opt_float(v):
    if v is None or str(v).strip().lower() in ("", "none", "auto"):
        return None
    return _float(v)


def _opt_float_list(v):
    if v is None or (isinstance(v, str) and v.strip().lower() in ("", "none", "auto")):
        return None
    return _float_list(v)


def _opt_int(v):
    if v is None or str(v).strip().lower() in ("", "none", "auto"):
        return None
    return _int(v)


@dataclass(frozen=True)
class Param:
    parse: Callable
    default: object
    help: str = ""


def _grid_params(amp_min=None, amp_max=None, steps=50) -> dict[str, Param]:
    return {
        "amp_min": Param(_opt_float, amp_min, "smallest amplitude (default depends on the experiment)"),
        "amp_max": Param(_opt_float, amp_max, "largest amplitude (default 1 - delta/2)"),
        "amp_steps": Param(_int, steps, "number of amplitude points"),
    }


def _common(records=None, seed=0) -> dict[str, Param]:
    return {
        "records": Param(_opt_int, records, "Monte Carlo replicates (auto: max(5000, 1e6/N))"),
        "seed": Param(_int, seed, "Monte Carlo seed"),
        "threads": Param(_int, 1, "worker threads for sweep points"),
    }


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    columns: list[str]
    rows: list[list]
    summary: dict[str, object] = field(default_factory=dict)
    notes: dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    params: dict
    out: str | None = None


def _quantizers(p) -> list[QuantizerSpec]:
    if p.get("delta") is not None:
        return [QuantizerSpec(p["delta"])]
    return [QuantizerSpec.from_bits(b) for b in p["bits"]]


def _bits_label(q: QuantizerSpec) -> float:
    return q.bits if q.bits is not None else math.log2(2.0 / q.step)


def _amp_grid(p, q: QuantizerSpec, default_min: float) -> np.ndarray:
    lo = p["amp_min"] if p["amp_min"] is not None else default_min
    hi = p["amp_max"] if p["amp_max"] is not None else 1.0 - q.step / 2
    n = p["amp_steps"]
    if n < 1:
        raise ConfigError("amp_steps must be >= 1")
    if not 0 <= lo <= hi:
        raise ConfigError(f"invalid amplitude range [{lo}, {hi}]")
    return np.array([hi]) if n == 1 else np.linspace(lo, hi, n)


def _top_abscissas(q: QuantizerSpec, count: int, a_max: float | None = None) -> np.ndarray:
    ab, _ = b2_curve(q.step, a_max)
    return ab[-count:]


def _records(p, n: int) -> int:
    return p["records"] if p["records"] is not None else default_replicates(n)


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _coherence_note(lam: int, n: int, notes: dict, key: str = "non_coprime"):
    if math.gcd(lam, n) != 1:
        notes[key] = True
        print(f"warning: gcd(lambda={lam}, N={n}) = {math.gcd(lam, n)}; sampling is not coprime", file=sys.stderr)


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------


def _fig1(p) -> ExperimentResult:
    """Variance of the scalar LS estimate θ̂ = Σyh/Σh², quantized vs uniform-noise model."""
    (q,) = _quantizers(p)[:1]
    n = p["n"]
    R = _records(p, n)
    ref = q.step**2 / (6 * n)
    grid = _amp_grid(p, q, 0.0)
    grid = grid[grid > 0] if grid.size > 1 else grid

    def point(j_theta):
        j, th = j_theta
        quant = scalar_model_mc(th, q, n, McConfig(R, p["seed"] + 2 * j, model="quantizer"))
        simple = scalar_model_mc(th, q, n, McConfig(R, p["seed"] + 2 * j + 1, model="simple-uniform"))
        _, var_th = simple_model_moments(th, q.step, n)
        return [th, th / q.step, quant.variance, quant.std_error_variance, simple.variance,
                simple.std_error_variance, var_th, quant.variance / ref, simple.variance / ref]

    rows = _pmap(point, enumerate(grid), p["threads"])
    ratio = np.array([r[7] / r[8] for r in rows if r[8] > 0])
    return ExperimentResult(
        ["theta", "theta_over_delta", "var_quantizer", "se_var_quantizer", "var_simple_mc",
         "se_var_simple_mc", "var_simple_theory", "var_quantizer_norm", "var_simple_norm"],
        rows,
        {"normalizer": "delta^2/(6N)", "max_quantizer_over_simple": float(ratio.max()) if ratio.size else math.nan},
    )


def _fig2(p) -> ExperimentResult:
    """Std of Â² with a coprime and a non-coprime λ, quantizer vs uniform-noise model."""
    (q,) = _quantizers(p)[:1]
    n = p["n"]
    R = _records(p, n)
    lams = (p["lambda"], p["lambda_alt"])
    notes: dict = {}
    for lam in lams:
        if n // math.gcd(lam, n) < 3:
            raise ConfigError(f"N/gcd(lambda={lam}, N) < 3; the two-column fit is singular")
    _coherence_note(lams[1], n, notes, "non_coprime_alt")
    _coherence_note(lams[0], n, notes)
    grid = _amp_grid(p, q, 0.05)

    def point(j_a):
        j, A = j_a
        out = [A]
        for lam in lams:
            for model in ("quantizer", "simple-uniform"):
                rep, _ = mc_moments(SineSpec(A, lam, n, offset=p["offset"]), q,
                                   McConfig(R, p["seed"] + j, p["sigma"], model))
                out.append(math.sqrt(rep.variance))
        return out + [out[1] / A, out[3] / A, out[2] / A, out[4] / A]

    rows = _pmap(point, enumerate(grid), p["threads"])
    rq = np.array([r[3] / r[1] for r in rows])
    rs = np.array([r[4] / r[2] for r in rows])
    l0, l1 = lams
    cols = ["amplitude", f"std_quant_l{l0}", f"std_simple_l{l0}", f"std_quant_l{l1}", f"std_simple_l{l1}",
            f"std_quant_l{l0}_over_a", f"std_quant_l{l1}_over_a", f"std_simple_l{l0}_over_a", f"std_simple_l{l1}_over_a"]
    return ExperimentResult(
        cols, rows,
        {"median_quant_ratio": float(np.median(rq)), "min_quant_ratio": float(rq.min()),
         "max_simple_ratio_dev": float(np.max(np.abs(rs - 1)))},
        notes,
    )


def _fig3(p) -> ExperimentResult:
    """Bias of Â² across amplitude: finite-N series, exact partition, asymptotic."""
    n, lam = p["n"], p["lambda"]
    notes: dict = {}
    _coherence_note(lam, n, notes)
    rows = []
    summary = {}
    for q in _quantizers(p):
        d = q.step
        grid = _amp_grid(p, q, d / 100)
        grid = grid[grid > 0]

        def point(A, q=q, d=d):
            spec = SineSpec(A, lam, n)
            ada = ada_moments(spec, q)
            fda = bias_finite_n(A, d, n, lam)
            return [_bits_label(q), d, A, A / d, fda.bias_finite_n, ada.bias, fda.bias_asymptotic,
                    ada.bias / d ** (4 / 3), fda.bound_b2, fda.tail_estimate]

        part = _pmap(point, grid, p["threads"])
        rows += part
        norm = np.array([r[7] for r in part])
        summary[f"b{_bits_label(q)}_norm_range"] = float(norm.max() - norm.min())
        summary[f"b{_bits_label(q)}_max_engine_gap"] = float(max(abs(r[4] - r[5]) for r in part))
    return ExperimentResult(
        ["bits", "delta", "amplitude", "a_over_delta", "bias_fda", "bias_ada", "bias_asymptotic",
         "bias_ada_over_delta43", "b2_nearest", "fda_tail"],
        rows, summary, notes,
    )


def _fig4(p) -> ExperimentResult:
    """Maximum |bias| over amplitude versus resolution, with B1(1/2, Δ) and |B2(Δ)|."""
    n, lam = p["n"], p["lambda"]
    R = p["records"] if p["records"] is not None else 2000
    notes: dict = {}
    _coherence_note(lam, n, notes)

    def point(q):
        d = q.step
        grid = _amp_grid(p, q, d / 100)
        grid = np.union1d(grid[grid > 0], _top_abscissas(q, 4, grid.max()))
        bias = np.array([bias_asymptotic(A, d) for A in grid])
        i = int(np.argmax(np.abs(bias)))
        a_star = float(grid[i])
        ab, b2 = b2_curve(d, grid.max())
        mc_best, se_best, a_mc = 0.0, 0.0, math.nan
        if R > 0:
            for j, A in enumerate(_top_abscissas(q, p["mc_points"], grid.max())):
                rep, _ = mc_moments(SineSpec(float(A), lam, n), q, McConfig(R, p["seed"] + j))
                if abs(rep.bias) > abs(mc_best):
                    mc_best, se_best, a_mc = rep.bias, rep.std_error_mean, float(A)
        p_star = nearest_envelope_index(a_star, d)
        return [_bits_label(q), d, abs(bias[i]), a_star, abs(bound_b2(d, p_star)), float(b2.max()),
                bound_b1(0.5, d), abs(mc_best), se_best, a_mc, 0.0]

    rows = _pmap(point, _quantizers(p), p["threads"])
    ratios = [r[2] / r[4] for r in rows]
    return ExperimentResult(
        ["bits", "delta", "max_abs_bias_fda", "argmax_amplitude", "abs_b2_nearest", "abs_b2_max",
         "b1_half", "max_abs_bias_mc", "se_mc", "argmax_amplitude_mc", "bias_simple_model"],
        rows,
        {"max_bias_over_b2": max(ratios), "min_bias_over_b2": min(ratios),
         "b1_dominates": all(r[2] <= r[6] for r in rows)},
        notes,
    )


def _fig5(p) -> ExperimentResult:
    """Bias and variance of Â² versus record length at fixed amplitude."""
    (q,) = _quantizers(p)[:1]
    d = q.step
    A = p["amplitude"] * d if p["amplitude"] is not None else 10.93 * d
    lam = p["lambda"]
    n_values = [m for m in range(p["n_min"], p["n"] + 1) if m // math.gcd(lam, m) >= 3]
    notes: dict = {}
    if any(math.gcd(lam, m) != 1 for m in n_values):
        notes["non_coprime_some_n"] = True

    def point(m):
        spec = SineSpec(A, lam, m)
        ada = ada_moments(spec, q)
        fda = bias_finite_n(A, d, m, lam)
        R = p["records"] if p["records"] is not None else default_replicates(m)
        if R > 0:
            rep, _ = mc_moments(spec, q, McConfig(R, p["seed"] + m))
            mc = [rep.bias, rep.std_error_mean, rep.variance, rep.std_error_variance]
        else:
            mc = [math.nan] * 4
        return [m, ada.bias, fda.bias_finite_n, mc[0], mc[1], fda.bias_asymptotic,
                ada.bias / d**2, ada.variance_amp_sq, mc[2], mc[3], ada.variance_amp_sq / d**4]

    rows = _pmap(point, n_values, p["threads"])
    return ExperimentResult(
        ["n", "bias_ada", "bias_fda", "bias_mc", "se_bias_mc", "bias_asymptotic", "bias_ada_over_delta2",
         "var_ada", "var_mc", "se_var_mc", "var_ada_over_delta4"],
        rows,
        {"asymptotic_over_delta2": bias_asymptotic(A, d) / d**2, "last_ada_over_delta2": rows[-1][6] if rows else math.nan},
        notes,
    )


def _max_over_amplitude(p, q: QuantizerSpec, n: int, lam: int):
    d = q.step
    grid = _amp_grid(p, q, d / 100)
    grid = np.union1d(grid[grid > 0], _top_abscissas(q, 8, grid.max()))
    reps = [ada_moments(SineSpec(float(A), lam, n), q) for A in grid]
    var = np.array([r.variance_amp_sq for r in reps])
    b2 = np.array([r.bias**2 for r in reps])
    mse = np.array([r.mse for r in reps])
    return grid, var, b2, mse


def _fig6(p) -> ExperimentResult:
    """Maximum Var(Â²) over amplitude versus resolution; quantizer, uniform-noise model, Gaussian reference."""
    n, lam = p["n"], p["lambda"]
    R = p["records"] if p["records"] is not None else 5000
    notes: dict = {}
    _coherence_note(lam, n, notes)

    def point(q):
        grid, var, _, _ = _max_over_amplitude(p, q, n, lam)
        i = int(np.argmax(var))
        a_star = float(grid[i])
        a_top = float(grid.max())
        row = [_bits_label(q), q.step, float(var[i]), a_star]
        if R > 0:
            rep, _ = mc_moments(SineSpec(a_star, lam, n), q, McConfig(R, p["seed"]))
            simple, _ = mc_moments(SineSpec(a_top, lam, n), q, McConfig(R, p["seed"] + 1, model="simple-uniform"))
            gref = gaussian_reference_variance(a_top, q.step / math.sqrt(12), n, lam, R, p["seed"] + 2)
            row += [rep.variance, rep.std_error_variance, simple.variance, gref]
        else:
            row += [math.nan] * 4
        return row

    rows = _pmap(point, _quantizers(p), p["threads"])
    return ExperimentResult(
        ["bits", "delta", "max_var_ada", "argmax_amplitude", "var_mc_at_argmax", "se_var_mc",
         "max_var_simple_mc", "var_gaussian_reference"],
        rows, {}, notes,
    )


def _fig7(p) -> ExperimentResult:
    """Maximum MSE, squared bias and variance of Â² over amplitude versus resolution (exact engine)."""
    n, lam = p["n"], p["lambda"]
    notes: dict = {}
    _coherence_note(lam, n, notes)

    def point(q):
        grid, var, b2, mse = _max_over_amplitude(p, q, n, lam)
        return [_bits_label(q), q.step, float(mse.max()), float(grid[np.argmax(mse)]),
                float(b2.max()), float(grid[np.argmax(b2)]), float(var.max()), float(grid[np.argmax(var)])]

    rows = _pmap(point, _quantizers(p), p["threads"])
    return ExperimentResult(
        ["bits", "delta", "max_mse", "argmax_mse", "max_bias_sq", "argmax_bias_sq", "max_var", "argmax_var"],
        rows, {}, notes,
    )


def _fig8(p) -> ExperimentResult:
    """Bias of the amplitude estimate Â = √Â²: Monte Carlo, exact, and the delta method."""
    (q,) = _quantizers(p)[:1]
    d = q.step
    n, lam = p["n"], p["lambda"]
    R = _records(p, n) if p["records"] is None else p["records"]
    notes: dict = {}
    _coherence_note(lam, n, notes)
    grid = _amp_grid(p, q, d / 2)
    grid = grid[grid > 0]

    def point(j_a):
        j, A = j_a
        spec = SineSpec(float(A), lam, n)
        ada = ada_moments(spec, q)
        delta_m = amp_bias_delta_method(ada.mean_amp_sq, ada.variance_amp_sq) if ada.mean_amp_sq > 0 else 0.0
        _, rep = mc_moments(spec, q, McConfig(R, p["seed"] + j))
        return [A, A / d, rep.bias, rep.std_error_mean, ada.mean_amp - A, delta_m - A,
                rep.bias / d, (delta_m - rep.mean) / d]

    rows = _pmap(point, enumerate(grid), p["threads"])
    z = [abs(r[7] * d) / r[3] for r in rows if r[3] > 0]
    return ExperimentResult(
        ["amplitude", "a_over_delta", "amp_bias_mc", "se_amp_bias_mc", "amp_bias_ada", "amp_bias_delta_method",
         "amp_bias_mc_over_delta", "delta_method_minus_mc_over_delta"],
        rows, {"max_abs_z_delta_vs_mc": max(z) if z else math.nan}, notes,
    )


def _offset_sweep(p) -> ExperimentResult:
    """Exact bias of Â² across amplitude for a set of input offsets."""
    n, lam = p["n"], p["lambda"]
    notes: dict = {}
    _coherence_note(lam, n, notes)
    rows, summary = [], {}
    for q in _quantizers(p):
        d = q.step
        offsets = [p["offset"]] if p["offset"] is not None else [d * k / 10 for k in range(-5, 6)]
        grid = _amp_grid(p, q, d / 100)
        grid = grid[grid > 0]
        worst = {}
        for off in offsets:
            part = _pmap(lambda A, off=off: ada_moments(SineSpec(float(A), lam, n, offset=off), q).bias,
                         grid, p["threads"])
            worst[off] = max(abs(b) for b in part)
            rows += [[_bits_label(q), d, off, off / d, A, A / d, b, b / d ** (4 / 3)] for A, b in zip(grid, part)]
        if 0.0 in worst:
            summary[f"b{_bits_label(q)}_worst_ratio_to_d0"] = max(worst.values()) / worst[0.0]
    return ExperimentResult(
        ["bits", "delta", "offset", "offset_over_delta", "amplitude", "a_over_delta", "bias_ada", "bias_ada_over_delta43"],
        rows, summary, notes,
    )


def _noise_sweep(p) -> ExperimentResult:
    """Maximum over amplitude of |bias| and variance of Â² under Gaussian dither (Monte Carlo)."""
    n, lam = p["n"], p["lambda"]
    R = p["records"] if p["records"] is not None else 2000
    notes: dict = {}
    _coherence_note(lam, n, notes)
    rows = []
    for q in _quantizers(p):
        d = q.step
        sigmas = p["sigma"] if p["sigma"] is not None else [d * s for s in p["sigma_over_delta"]]
        lo = p["amp_min"] if p["amp_min"] is not None else max(d / 2, 1.0 - 8.5 * d)
        hi = p["amp_max"] if p["amp_max"] is not None else 1.0 - d / 2
        grid = np.linspace(lo, hi, p["amp_steps"]) if p["amp_steps"] > 1 else np.array([hi])
        simple = [mc_moments(SineSpec(float(A), lam, n), q, McConfig(R, p["seed"], model="simple-uniform"))[0]
                  for A in grid[-1:]]
        for s in sigmas:
            reps = _pmap(lambda jA, s=s: mc_moments(SineSpec(float(jA[1]), lam, n), q,
                                                    McConfig(R, p["seed"] + jA[0], s))[0],
                         enumerate(grid), p["threads"])
            ib = int(np.argmax([abs(r.bias) for r in reps]))
            iv = int(np.argmax([r.variance for r in reps]))
            rows.append([_bits_label(q), d, s, s / d, abs(reps[ib].bias), reps[ib].std_error_mean, float(grid[ib]),
                         reps[iv].variance, reps[iv].std_error_variance, float(grid[iv]),
                         abs(simple[0].bias), simple[0].variance,
                         gaussian_reference_variance(float(grid[-1]), d / math.sqrt(12), n, lam, R, p["seed"] + 7),
                         bound_b1(0.5, d), float(b2_curve(d)[1].max())])
    return ExperimentResult(
        ["bits", "delta", "sigma", "sigma_over_delta", "max_abs_bias_mc", "se_bias", "argmax_bias",
         "max_var_mc", "se_var", "argmax_var", "abs_bias_simple", "var_simple", "var_gaussian_reference",
         "b1_half", "abs_b2_max"],
        rows, {}, notes,
    )


def _custom(p) -> ExperimentResult:
    """Free sweep over amplitude with every applicable engine."""
    (q,) = _quantizers(p)[:1]
    d = q.step
    n, lam = p["n"], p["lambda"]
    notes: dict = {}
    _coherence_note(lam, n, notes)
    if n // math.gcd(lam, n) < 3:
        raise ConfigError("N/gcd(lambda, N) < 3; the two-column fit is singular")
    R = _records(p, n)
    sigma, off = p["sigma"], p["offset"]
    grid = _amp_grid(p, q, d / 100)

    def point(j_a):
        j, A = j_a
        A = float(A)
        spec = SineSpec(A, lam, n, offset=off)
        nan = math.nan
        ada_b = ada_v = fda_b = nan
        if sigma == 0:
            r = ada_moments(spec, q)
            ada_b, ada_v = r.bias, r.variance_amp_sq
            if off == 0 and A > 0 and q.c == 0:
                fda_b = bias_finite_n(A, d, n, lam).bias_finite_n
        mc_b = mc_se = mc_v = mc_sev = amp_b = nan
        if R > 0:
            sq, amp = mc_moments(spec, q, McConfig(R, p["seed"] + j, sigma))
            mc_b, mc_se, mc_v, mc_sev, amp_b = sq.bias, sq.std_error_mean, sq.variance, sq.std_error_variance, amp.bias
        return [A, A / d, ada_b, fda_b, mc_b, mc_se, ada_v, mc_v, mc_sev, amp_b]

    rows = _pmap(point, enumerate(grid), p["threads"])
    return ExperimentResult(
        ["amplitude", "a_over_delta", "bias_ada", "bias_fda", "bias_mc", "se_bias_mc", "var_ada", "var_mc",
         "se_var_mc", "amp_bias_mc"],
        rows, {}, notes,
    )


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


_Q = {"bits": Param(_int_list, [10], "quantizer bits (comma-separated list where a sweep over bits is made)"),
      "delta": Param(_opt_float, None, "quantizer step; overrides bits")}


def _q(default_bits) -> dict[str, Param]:
    return {"bits": Param(_int_list, default_bits, _Q["bits"].help), "delta": _Q["delta"]}


@dataclass(frozen=True)
class Experiment:
    run: Callable[[dict], ExperimentResult]
    schema: dict[str, Param]
    description: str


EXPERIMENTS: dict[str, Experiment] = {
    "fig1": Experiment(_fig1, {**_q([3]), "n": Param(_int, 200), **_grid_params(None, None, 50),
                               **_common(15000)},
                       "variance of the scalar LS estimate vs theta/delta, 3-bit, N=200"),
    "fig2": Experiment(_fig2, {**_q([13]), "n": Param(_int, 2000), "lambda": Param(_int, 201),
                               "lambda_alt": Param(_int, 200), "sigma": Param(_float, 0.0),
                               "offset": Param(_float, 0.0), **_grid_params(None, None, 20), **_common(5000)},
                       "std of A^2 for coprime vs non-coprime lambda, b=13, N=2000"),
    "fig3": Experiment(_fig3, {**_q([4, 6, 8, 12]), "n": Param(_int, 2000), "lambda": Param(_int, 201),
                               **_grid_params(None, None, 400), "threads": Param(_int, 1)},
                       "bias of A^2 vs amplitude: finite-N series and exact partition"),
    "fig4": Experiment(_fig4, {**_q(list(range(2, 13))), "n": Param(_int, 2000), "lambda": Param(_int, 201),
                               "mc_points": Param(_int, 3), **_grid_params(None, None, 2000), **_common(2000)},
                       "max |bias| over amplitude vs bits with B1(1/2) and |B2|"),
    "fig5": Experiment(_fig5, {**_q([10]), "n": Param(_int, 300), "n_min": Param(_int, 3),
                               "lambda": Param(_int, 1), "amplitude": Param(_opt_float, 10.93,
                                                                            "amplitude in units of delta"),
                               **_common(None)},
                       "bias and variance of A^2 vs N at A=10.93 delta, b=10"),
    "fig6": Experiment(_fig6, {**_q([4, 6, 8, 10, 12]), "n": Param(_int, 2000), "lambda": Param(_int, 539),
                               **_grid_params(None, None, 1000), **_common(5000)},
                       "max Var(A^2) over amplitude vs bits"),
    "fig7": Experiment(_fig7, {**_q([4, 6, 8, 10, 12]), "n": Param(_int, 2000), "lambda": Param(_int, 539),
                               **_grid_params(None, None, 1000), "threads": Param(_int, 1)},
                       "max MSE, squared bias and variance of A^2 vs bits"),
    "fig8": Experiment(_fig8, {**_q([8]), "n": Param(_int, 500), "lambda": Param(_int, 137),
                               **_grid_params(None, None, 100), **_common(5000)},
                       "bias of the amplitude estimate, MC vs delta method"),
    "offset-sweep": Experiment(_offset_sweep, {**_q([4, 6]), "n": Param(_int, 2000), "lambda": Param(_int, 201),
                                               "offset": Param(_opt_float, None, "single offset (default: sweep)"),
                                               **_grid_params(None, None, 400), "threads": Param(_int, 1)},
                               "exact bias of A^2 with input offsets -delta/2..delta/2"),
    "noise-bias": Experiment(_noise_sweep, {**_q([6, 8]), "n": Param(_int, 2000), "lambda": Param(_int, 539),
                                            "sigma": Param(_opt_float_list, None, "absolute noise std list"),
                                            "sigma_over_delta": Param(_float_list, [0.0, 0.2, 0.4, 0.6]),
                                            **_grid_params(None, None, 33), **_common(2000)},
                             "max |bias| of A^2 under Gaussian dither"),
    "noise-var": Experiment(_noise_sweep, {**_q([6, 8]), "n": Param(_int, 2000), "lambda": Param(_int, 539),
                                           "sigma": Param(_opt_float_list, None, "absolute noise std list"),
                                           "sigma_over_delta": Param(_float_list, [0.0, 0.2, 0.4, 0.6]),
                                           **_grid_params(None, None, 33), **_common(5000)},
                            "max Var(A^2) under Gaussian dither"),
    "custom-sweep": Experiment(_custom, {**_q([8]), "n": Param(_int, 300), "lambda": Param(_int, 7),
                                         "sigma": Param(_float, 0.0), "offset": Param(_float, 0.0),
                                         **_grid_params(None, None, 50), **_common(None)},
                               "amplitude sweep with every applicable engine"),
}


def resolve_params(experiment: str, overrides: dict) -> dict:
    """Merge overrides into the experiment defaults, type-checking every value."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    schema = EXPERIMENTS[experiment].schema
    unknown = sorted(set(overrides) - set(schema))
    if unknown:
        raise ConfigError(f"unknown parameter(s) for {experiment}: {', '.join(unknown)}")
    out = {}
    for k, prm in schema.items():
        if k in overrides and overrides[k] is not None:
            try:
                out[k] = prm.parse(overrides[k])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"{experiment}: bad value for {k}: {exc}") from None
        else:
            out[k] = prm.default
    _validate(experiment, out)
    return out


def _validate(experiment: str, p: dict):
    if "n" in p and p["n"] < 3:
        raise ConfigError("n must be >= 3")
    if "lambda" in p and p["lambda"] < 1:
        raise ConfigError("lambda must be >= 1")
    if p.get("bits") is not None and any(b < 1 or b > 30 for b in p["bits"]):
        raise ConfigError("bits must lie in 1..30")
    if p.get("delta") is not None and not p["delta"] > 0:
        raise ConfigError("delta must be positive")
    if p.get("records") is not None and p["records"] != 0 and p["records"] < 2:
        raise ConfigError("records must be 0 (skip Monte Carlo) or >= 2")
    if not 0 <= p.get("seed", 0) < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    if p.get("threads", 1) < 1:
        raise ConfigError("threads must be >= 1")
    sig = p.get("sigma")
    if sig is not None and any(s < 0 for s in (sig if isinstance(sig, list) else [sig])):
        raise ConfigError("sigma must be >= 0")
    if experiment == "fig5" and p["n_min"] < 3:
        raise ConfigError("n_min must be >= 3")
    if "lambda" in p and "n" in p and experiment not in ("fig5",) and p["n"] // math.gcd(p["lambda"], p["n"]) < 3:
        raise ConfigError("N/gcd(lambda, N) < 3; the two-column fit is singular")


def run_experiment(cfg: ExperimentConfig) -> tuple[ExperimentResult, dict]:
    """Run one experiment; returns the result and the CSV metadata block."""
    exp = EXPERIMENTS[cfg.experiment]
    res = exp.run(cfg.params)
    meta = {
        "experiment": cfg.experiment,
        "description": exp.description,
        "version": __version__,
        "rng": RNG_DESCRIPTION,
    }
    for k, v in res.notes.items():
        meta[k] = v
    for k, v in res.summary.items():
        meta[f"summary.{k}"] = v
    return res, meta
