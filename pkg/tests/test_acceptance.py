"""Desk-scale reproduction targets, one test per criterion.

Each test records a PASS/FAIL line through ``record_criterion``; the lines are
printed together at the end of the pytest run.  Runtime limits are part of
each criterion and are checked with wall-clock time.
"""

import math
import time

import numpy as np
import pytest

from quantsine import fda, special
from quantsine.ada import ada_moments
from quantsine.experiments import resolve_params, run_experiment, ExperimentConfig
from quantsine.montecarlo import McConfig, mc_amp, mc_amp_sq, scalar_model_mc, simple_model_moments
from quantsine.signal import QuantizerSpec, SineSpec
from quantsine.verify import ENGINE_MATRIX


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_01_reference_bias(record_criterion):
    with Timer() as t:
        q = QuantizerSpec.from_bits(10)
        A = 10.93 * q.step
        asym = fda.bias_asymptotic(A, q.step) / q.step**2
        ada = ada_moments(SineSpec(A, 1, 300), q).bias / q.step**2
    ok = abs(asym - 0.9398) <= 0.002 and abs(ada - asym) <= 1e-3 and t.elapsed < 10
    record_criterion("1", ok, f"asymptotic {asym:.6f}, ADA(N=300) {ada:.6f}, {t.elapsed:.2f}s")
    assert ok


def test_criterion_02_subbin_exactness(record_criterion):
    worst_fda = worst_ada = 0.0
    with Timer() as t:
        for b in (4, 8, 12):
            q = QuantizerSpec.from_bits(b)
            for A in np.linspace(q.step / 100, q.step / 2, 51)[:-1]:
                worst_fda = max(worst_fda, abs(fda.bias_asymptotic(A, q.step) + A * A))
                worst_ada = max(worst_ada, abs(ada_moments(SineSpec(A, 7, 50), q).mean_amp_sq))
    ok = worst_ada == 0.0 and worst_fda <= 1e-12 and t.elapsed < 5
    record_criterion("2", ok, f"max |ADA mean| {worst_ada:.1e}, max FDA gap {worst_fda:.1e}, {t.elapsed:.2f}s")
    assert ok


def test_criterion_03_three_forms_of_g(record_criterion):
    rng = np.random.default_rng(2024)
    ratios = np.exp(rng.uniform(math.log(0.01), math.log(500), 200))
    bits = rng.integers(2, 17, 200)
    ws = wg = 0.0
    with Timer() as t:
        for r, b in zip(ratios, bits):
            d = 2.0 / 2.0 ** int(b)
            A = float(r) * d
            c = special.g_closed(A, d)
            ws = max(ws, abs(special.g_series(A, d).value - c))
            wg = max(wg, abs(special.g_gray(A, d) - c))
    ok = ws <= 1e-8 and wg <= 1e-11 and t.elapsed < 30
    record_criterion("3", ok, f"series gap {ws:.2e}, Gray gap {wg:.2e}, {t.elapsed:.2f}s")
    assert ok


def test_criterion_04a_b1_dominates(record_criterion):
    worst = 0.0
    with Timer() as t:
        for b in (4, 6, 8):
            d = 2.0 / 2**b
            for A in np.linspace(1 / 400, 1 - d / 2, 400):
                worst = max(worst, abs(fda.bias_asymptotic(A, d)) / fda.bound_b1(A, d))
    ok = worst <= 1.0 and t.elapsed < 10
    record_criterion("4a", ok, f"max |bias|/B1 = {worst:.4f}, {t.elapsed:.2f}s")
    assert ok


def test_criterion_04b_b1_minimum_at_half(record_criterion):
    # B1 = 4AB + 4B² with B ∝ A^(-1/3); its minimum sits near 0.58Δ, not at 1/2.
    # Expected to fail; the decisions ledger has the derivation.
    locs = []
    ok = True
    for b in (4, 6, 8):
        d = 2.0 / 2**b
        grid = np.linspace(1 / 400, 1 - d / 2, 400)
        b1 = np.array([fda.bound_b1(A, d) for A in grid])
        a_min = float(grid[int(np.argmin(b1))])
        locs.append(f"b={b}: argmin {a_min:.4f} ({a_min / d:.3f} delta)")
        ok &= abs(a_min - 0.5) <= grid[1] - grid[0]
    record_criterion("4b", ok, "; ".join(locs))
    assert ok


def test_criterion_05_envelope_tracking(record_criterion):
    ratios = []
    with Timer() as t:
        for b in range(2, 13):
            d = 2.0 / 2**b
            grid = np.union1d(np.linspace(d / 100, 1 - d / 2, 400), fda.b2_curve(d)[0])
            bias = np.array([fda.bias_asymptotic(A, d) for A in grid])
            i = int(np.argmax(np.abs(bias)))
            p = fda.nearest_envelope_index(grid[i], d)
            ratios.append(abs(bias[i]) / abs(fda.bound_b2(d, p)))
    ok = all(0.5 <= r <= 2.0 for r in ratios) and t.elapsed < 60
    # the uniform-noise model predicts zero bias, so any nonzero maximum exceeds it
    ok &= all(r > 0 for r in ratios)
    record_criterion("5", ok, f"max|bias|/|B2| in [{min(ratios):.3f}, {max(ratios):.3f}] for b=2..12, {t.elapsed:.2f}s")
    assert ok


@pytest.mark.slow
def test_criterion_06_engine_triangle(record_criterion):
    worst_fda = 0.0
    worst_z = 0.0
    misses = 0
    total = 0
    with Timer() as t:
        for n, b, lam in ENGINE_MATRIX:
            q = QuantizerSpec.from_bits(b)
            for j, A in enumerate(np.linspace(0.013, 1 - q.step / 2, 20)):
                spec = SineSpec(float(A), lam, n)
                ada = ada_moments(spec, q)
                r = fda.bias_finite_n(float(A), q.step, n, lam)
                worst_fda = max(worst_fda, abs(ada.bias - r.bias_finite_n) / max(1e-8, r.tail_estimate))
                mc = mc_amp_sq(spec, q, McConfig(100_000, seed=10_000 * b + j))
                gap = abs(mc.bias - ada.bias)
                z = gap / mc.std_error_mean if mc.std_error_mean > 0 else (0.0 if gap <= 1e-15 else math.inf)
                worst_z = max(worst_z, z)
                misses += z > 4
                total += 1
    ok = worst_fda <= 1.0 and misses == 0 and t.elapsed < 600
    record_criterion(
        "6", ok,
        f"max |ADA-FDA|/max(1e-8, tail) {worst_fda:.3f}, MC max z {worst_z:.2f} ({misses}/{total} beyond 4 SE), "
        f"{t.elapsed:.1f}s",
    )
    assert ok


def test_criterion_07_coherence_loss(record_criterion):
    with Timer() as t:
        params = resolve_params("fig2", {"bits": "13", "n": "2000", "lambda": "201", "lambda_alt": "200",
                                         "records": "5000", "amp_min": "0.1", "amp_steps": "8"})
        res, _ = run_experiment(ExperimentConfig("fig2", params, None))
    ok = res.summary["min_quant_ratio"] >= 5 and res.summary["max_simple_ratio_dev"] < 0.2 and t.elapsed < 300
    record_criterion(
        "7", ok,
        f"quantizer std ratio min {res.summary['min_quant_ratio']:.1f} (median {res.summary['median_quant_ratio']:.1f}), "
        f"simple-model deviation {res.summary['max_simple_ratio_dev']:.3f}, {t.elapsed:.1f}s",
    )
    assert ok


def test_criterion_08_simple_model_variance(record_criterion):
    with Timer() as t:
        q = QuantizerSpec(0.25)
        N = 200
        mc = scalar_model_mc(1.0, q, N, McConfig(100_000, seed=8, model="simple-uniform"))
        rel = abs(mc.variance / (q.step**2 / (6 * N)) - 1)
        q3 = QuantizerSpec.from_bits(3)
        best = 0.0
        for j, th in enumerate(np.linspace(0, 1 - q3.step / 2, 51)[1:]):
            true = scalar_model_mc(float(th), q3, N, McConfig(10_000, seed=100 + j, model="quantizer")).variance
            best = max(best, true / simple_model_moments(float(th), q3.step, N)[1])
    ok = rel <= 0.05 and best > 2.0 and t.elapsed < 300
    record_criterion("8", ok, f"simple-model relative gap {rel:.4f}, max true/simple {best:.2f}, {t.elapsed:.1f}s")
    assert ok


@pytest.mark.slow
def test_criterion_09_dither_trends(record_criterion):
    # same code path as `quantsine noise-var`: max over a 33-point grid at the top of the range
    with Timer() as t:
        params = resolve_params("noise-var", {"bits": "6,8", "records": "2000"})
        res, _ = run_experiment(ExperimentConfig("noise-var", params, None))
    col = {c: i for i, c in enumerate(res.columns)}
    details = []
    ok = True
    for b in (6, 8):
        rows = sorted((r for r in res.rows if r[col["bits"]] == b), key=lambda r: r[col["sigma_over_delta"]])
        mb = [r[col["max_abs_bias_mc"]] for r in rows]
        mv = [r[col["max_var_mc"]] for r in rows]
        ok &= all(x >= y for x, y in zip(mb, mb[1:])) and all(x <= y for x, y in zip(mv, mv[1:]))
        details.append(f"b={b} max|bias| " + "/".join(f"{x:.2e}" for x in mb)
                       + " max var " + "/".join(f"{x:.2e}" for x in mv))
    ok &= t.elapsed < 600
    record_criterion("9", ok, "; ".join(details) + f", {t.elapsed:.1f}s")
    assert ok


def test_criterion_10_offset_insensitivity(record_criterion):
    details = []
    ok = True
    with Timer() as t:
        for b in (4, 6):
            q = QuantizerSpec.from_bits(b)
            grid = np.union1d(np.linspace(q.step / 100, 1 - q.step / 2, 200), fda.b2_curve(q.step)[0])
            worst = {}
            for k in range(-5, 6):
                d = k * q.step / 10
                worst[k] = max(abs(ada_moments(SineSpec(float(A), 201, 2000, offset=d), q).bias) for A in grid)
            ratio = max(worst.values()) / worst[0]
            ok &= ratio <= 2.0
            details.append(f"b={b} max over d / d=0 = {ratio:.3f}")
    ok &= t.elapsed < 300
    record_criterion("10", ok, "; ".join(details) + f", {t.elapsed:.1f}s")
    assert ok


def test_criterion_11_variance_decay(record_criterion):
    q = QuantizerSpec.from_bits(10)
    with Timer() as t:
        v = [ada_moments(SineSpec(10.93 * q.step, 1, n), q).variance_amp_sq for n in (50, 100, 300)]
    ok = v[0] > v[1] > v[2] and t.elapsed < 120
    record_criterion("11", ok, "Var at N=50/100/300: " + "/".join(f"{x:.3e}" for x in v) + f", {t.elapsed:.2f}s")
    assert ok


def test_criterion_12_delta_method(record_criterion):
    q = QuantizerSpec.from_bits(8)
    zs = []
    with Timer() as t:
        for j, A in enumerate((0.2, 0.35, 0.5, 0.65, 0.8)):
            spec = SineSpec(A, 137, 500)
            ada = ada_moments(spec, q)
            pred = fda.amp_bias_delta_method(ada.mean_amp_sq, ada.variance_amp_sq)
            mc = mc_amp(spec, q, McConfig(5000, seed=500 + j))
            zs.append(abs(mc.mean - pred) / mc.std_error_mean)
    ok = max(zs) <= 3 and t.elapsed < 180
    record_criterion("12", ok, "z = " + ", ".join(f"{z:.2f}" for z in zs) + f", {t.elapsed:.1f}s")
    assert ok
