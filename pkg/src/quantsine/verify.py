"""Cross-engine invariant checks, runnable as ``quantsine verify``.

The report contains no timings or thread counts, so it is byte-identical for
a given build and suite regardless of how many workers were used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import fda, special
from .ada import ada_moments, build_partition, exact_moments
from .lsfit import amp_sq_estimate
from .montecarlo import McConfig, mc_amp_sq
from .signal import QuantizerSpec, SineSpec, make_record, quant_error, quantize

__all__ = ["Check", "CheckResult", "run_suite", "format_report", "CHECKS"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable[[bool, int], tuple[bool, str]]


def _e(x: float) -> str:
    return f"{x:.3e}"


def _signal(full, threads):
    q = QuantizerSpec.from_bits(10)
    s = np.linspace(-1.2, 1.2, 100001 if full else 10001)
    gap = np.max(np.abs(quant_error(q, s) - (quantize(q, s) - s)))
    shift = np.array_equal(quantize(q, s + q.step), quantize(q, s) + q.step)
    ok = gap <= 4 * np.spacing(1.2) and shift and np.max(np.abs(quant_error(q, s))) <= q.step / 2
    return ok, f"max |e - (Q(s) - s)| = {_e(gap)}"


def _lsfit(full, threads):
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(40 if full else 10):
        n = int(rng.integers(3, 80))
        lam = int(rng.integers(1, 40))
        if n // math.gcd(lam, n) < 3:
            continue
        y = rng.normal(size=n)
        a = amp_sq_estimate(y, lam, n)
        i = np.arange(n)
        slow = 4 / n**2 * y @ np.cos(2 * np.pi * lam * (i[:, None] - i[None, :]) / n) @ y
        worst = max(worst, abs(slow - a) / max(abs(a), 1e-300))
    return worst <= 1e-12, f"max relative double-sum gap = {_e(worst)}"


def _g_forms(full, threads):
    n_pairs = 200 if full else 24
    ratios = np.geomspace(0.01, 500, n_pairs)
    deltas = 2.0 / 2.0 ** (4 + np.arange(n_pairs) % 9)
    ws = wg = 0.0
    for r, d in zip(ratios, deltas):
        A = r * d
        c = special.g_closed(A, d)
        ws = max(ws, abs(special.g_series(A, d).value - c))
        wg = max(wg, abs(special.g_gray(A, d) - c))
    return ws <= 1e-8 and wg <= 1e-11, f"series gap {_e(ws)}, gray gap {_e(wg)}"


def _landau(full, threads):
    worst = 0.0
    for b in (4, 6, 8, 10, 12):
        d = 2.0 / 2**b
        for A in np.linspace(d / 50, 1 - d / 2, 400 if full else 100):
            worst = max(worst, abs(special.g_closed(A, d)) / fda.landau_g_bound(A, d))
    return worst <= 1.0, f"max |g|/B = {worst:.4f}"


def _minima(full, threads):
    d = 2.0 / 2**8
    bad = 0
    for p in range(1, 51):
        a = (p - 0.5) * d
        g0 = special.g_closed(a, d)
        if not (g0 <= special.g_closed(a + 1e-3 * d, d) and g0 <= special.g_closed(a - 1e-3 * d, d)):
            bad += 1
        if abs(special.g_min_envelope(p, d) - g0) > 1e-12:
            bad += 1
    return bad == 0, f"{bad} violations over p = 1..50"


def _neumann(full, threads):
    worst = 0.0
    for x in (1.0, 5.0, 20.0):
        s = special.bessel_j(0, x) ** 2 + 2 * sum(special.bessel_j(k, x) ** 2 for k in range(1, 80))
        worst = max(worst, abs(s - 1))
    return worst <= 1e-10, f"max |J0^2 + 2 sum Jk^2 - 1| = {_e(worst)}"


def _domination(full, threads):
    worst = 0.0
    for b in (4, 6, 8):
        d = 2.0 / 2**b
        for A in np.linspace(1.0 / 400, 1 - d / 2, 400):
            worst = max(worst, abs(fda.bias_asymptotic(A, d)) / fda.bound_b1(A, d))
    return worst <= 1.0, f"max |bias|/B1 = {worst:.4f}"


def _subbin(full, threads):
    worst_fda = 0.0
    worst_ada = 0.0
    for b in (4, 8, 12):
        q = QuantizerSpec.from_bits(b)
        for A in np.linspace(q.step / 200, q.step / 2 * 0.999, 50 if full else 10):
            worst_fda = max(worst_fda, abs(fda.bias_asymptotic(A, q.step) + A * A))
            worst_ada = max(worst_ada, abs(ada_moments(SineSpec(A, 7, 50), q).mean_amp_sq))
    return worst_fda <= 1e-12 and worst_ada == 0.0, f"FDA gap {_e(worst_fda)}, ADA mean {_e(worst_ada)}"


ENGINE_MATRIX = ((50, 4, 7), (100, 6, 13), (200, 8, 39), (300, 10, 239))


def _engines(full, threads):
    worst = 0.0
    for n, b, lam in ENGINE_MATRIX:
        q = QuantizerSpec.from_bits(b)
        for A in np.linspace(0.013, 1 - q.step / 2, 20 if full else 5):
            r = fda.bias_finite_n(A, q.step, n, lam)
            gap = abs(ada_moments(SineSpec(A, lam, n), q).bias - r.bias_finite_n)
            worst = max(worst, gap / max(1e-8, r.tail_estimate))
    return worst <= 1.0, f"max |ADA - FDA| / max(1e-8, tail) = {worst:.4f}"


def _partition(full, threads):
    rng = np.random.default_rng(5)
    measure = 0.0
    mismatches = 0
    cases = [(0.8, 3, 16, 3), (0.45, 6, 64, 5), (0.93, 8, 128, 17), (0.31, 12, 256, 101)]
    for A, b, n, lam in cases:
        q = QuantizerSpec.from_bits(b)
        spec = SineSpec(A, lam, n)
        part = build_partition(spec, q)
        measure = max(measure, abs(part.widths.sum() - 2 * math.pi))
        for phi in rng.uniform(0, 2 * math.pi, 100 if full else 20):
            if not np.array_equal(part.codes_at(phi) * q.step, make_record(spec.with_phase(phi), q)):
                mismatches += 1
    return measure <= 1e-12 and mismatches == 0, f"measure gap {_e(measure)}, {mismatches} code mismatches"


def _offset(full, threads):
    worst = 0.0
    for b, d_over in ((4, 0.3), (6, -0.2), (8, 0.45)):
        q = QuantizerSpec.from_bits(b)
        qc = QuantizerSpec(q.step, c=d_over)
        for A in (0.21, 0.57, 0.9):
            r1 = ada_moments(SineSpec(A, 13, 100, offset=d_over * q.step), q)
            r2 = ada_moments(SineSpec(A, 13, 100), qc)
            worst = max(worst, abs(r1.mean_amp_sq - r2.mean_amp_sq), abs(r1.variance_amp_sq - r2.variance_amp_sq))
    return worst <= 1e-12, f"max moment gap = {_e(worst)}"


def _square(full, threads):
    worst = 0.0
    for b in (4, 8, 12):
        d = 2.0 / 2**b
        for A in np.linspace(d / 10, 1 - d / 2, 50):
            m2 = fda.asymptotic_second_moment(A, d)
            g = special.g_closed(A, d)
            # relative to the size of the terms; the value itself is 0 below Δ/2
            scale = (A * A + 4 * A * abs(g) + 4 * g * g) ** 2
            worst = max(worst, abs(m2 - (fda.bias_asymptotic(A, d) + A * A) ** 2) / scale)
    return worst <= 1e-12, f"max relative gap = {_e(worst)}"


def _mc_vs_ada(full, threads):
    R = 100_000 if full else 20_000
    configs = []
    for n, b, lam in ENGINE_MATRIX:
        q = QuantizerSpec.from_bits(b)
        amps = np.linspace(0.05, 1 - q.step / 2, 10 if full else 2)
        configs += [(n, b, lam, float(A)) for A in amps]
    hits = 0
    worst = 0.0
    for j, (n, b, lam, A) in enumerate(configs):
        q = QuantizerSpec.from_bits(b)
        spec = SineSpec(A, lam, n)
        mc = mc_amp_sq(spec, q, McConfig(R, 1000 + j, workers=threads))
        gap = abs(mc.bias - ada_moments(spec, q).bias)
        z = gap / mc.std_error_mean if mc.std_error_mean > 0 else (0.0 if gap <= 1e-15 else math.inf)
        worst = max(worst, z)
        hits += z <= 4
    frac = hits / len(configs)
    return frac >= 0.95, f"{hits}/{len(configs)} within 4 SE (max z = {worst:.2f})"


def _mc_threads(full, threads):
    spec = SineSpec(0.61, 13, 100)
    q = QuantizerSpec.from_bits(6)
    a = mc_amp_sq(spec, q, McConfig(5000, 3, q.step / 5, workers=1))
    b = mc_amp_sq(spec, q, McConfig(5000, 3, q.step / 5, workers=max(2, threads)))
    return a == b, "identical reports for 1 and several workers" if a == b else "reports differ"


def _dither(full, threads):
    R = 2000
    bad = []
    for b in ((6, 8) if full else (6,)):
        q = QuantizerSpec.from_bits(b)
        grid = fda.b2_curve(q.step)[0][-8:]
        prev_b, prev_v = math.inf, -math.inf
        for k, s in enumerate((0.0, 0.2, 0.4, 0.6)):
            reps = [mc_amp_sq(SineSpec(float(A), 539, 2000), q, McConfig(R, 77 + j, s * q.step, workers=threads))
                    for j, A in enumerate(grid)]
            mb = max(abs(r.bias) for r in reps)
            mv = max(r.variance for r in reps)
            if mb > prev_b or mv < prev_v:
                bad.append(f"b={b} sigma={s}delta")
            prev_b, prev_v = mb, mv
    return not bad, "monotone" if not bad else "violations: " + ", ".join(bad)


CHECKS: dict[str, list[Check]] = {
    "fast": [
        Check("signal: quantization-error identity", _signal),
        Check("lsfit: double-sum identity", _lsfit),
        Check("special: three forms of g agree", _g_forms),
        Check("special: Landau bound on g", _landau),
        Check("special: local minima at (p-1/2)delta", _minima),
        Check("special: Neumann sum of Bessel squares", _neumann),
        Check("fda: B1 dominates the asymptotic bias", _domination),
        Check("fda/ada: sub-bin exactness", _subbin),
        Check("fda/ada: finite-N bias agreement", _engines),
        Check("ada: partition measure and pointwise codes", _partition),
        Check("ada: offset equals characteristic shift", _offset),
        Check("fda: asymptotic second moment is a perfect square", _square),
        Check("mc: agreement with exact bias", _mc_vs_ada),
        Check("mc: independent of worker count", _mc_threads),
    ],
}
CHECKS["full"] = CHECKS["fast"] + [Check("mc: dither lowers bias and raises variance", _dither)]


def run_suite(suite: str = "fast", threads: int = 1) -> list[CheckResult]:
    if suite not in CHECKS:
        raise ValueError(f"unknown suite {suite!r}")
    full = suite == "full"
    out = []
    for chk in CHECKS[suite]:
        try:
            ok, detail = chk.fn(full, threads)
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"error: {type(exc).__name__}: {exc}"
        out.append(CheckResult(chk.name, bool(ok), detail))
    return out


def format_report(results: list[CheckResult], suite: str) -> str:
    lines = [f"quantsine verify --suite {suite}"]
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail} passed, {n_fail} failed")
    return "\n".join(lines) + "\n"
