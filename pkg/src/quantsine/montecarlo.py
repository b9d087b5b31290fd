"""Seeded Monte Carlo of the sine-fit estimators under a uniform random phase.

Replicates are processed in fixed blocks.  Block ``j`` draws from its own
PCG64 stream spawned from ``SeedSequence(seed, spawn_key=(j,))``, so a run is
a pure function of (seed, R, block size) and the order in which blocks are
executed does not matter.  Per-block central moments are merged in block
order, which keeps results bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .lsfit import basis
from .signal import QuantizerSpec, SineSpec, quantize_codes

__all__ = [
    "RNG_DESCRIPTION",
    "McConfig",
    "McReport",
    "Moments",
    "default_replicates",
    "mc_moments",
    "mc_amp_sq",
    "mc_amp",
    "simple_model_moments",
    "scalar_model_mc",
    "gaussian_reference_variance",
]

BLOCK = 1024
RNG_DESCRIPTION = "numpy PCG64, SeedSequence(seed, spawn_key=(block,)), block=1024, normal=ziggurat"

Model = Literal["quantizer", "simple-uniform", "gaussian-no-quant"]


def default_replicates(n_samples: int) -> int:
    return max(5000, 10**6 // n_samples)


@dataclass(frozen=True)
class McConfig:
    replicates: int
    seed: int = 0
    noise_sigma: float = 0.0
    model: Model = "quantizer"
    workers: int = 1

    def __post_init__(self):
        if self.replicates < 2:
            raise ValueError("need at least 2 replicates")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if self.model not in ("quantizer", "simple-uniform", "gaussian-no-quant"):
            raise ValueError(f"unknown model {self.model!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McReport:
    mean: float
    variance: float
    mse: float
    bias: float
    std_error_mean: float
    std_error_variance: float
    replicates_used: int


@dataclass(frozen=True)
class Moments:
    """Count, mean and central sums M2, M3, M4 of a sample."""

    n: int
    mean: float
    m2: float
    m3: float
    m4: float

    @classmethod
    def of(cls, x: np.ndarray) -> "Moments":
        n = x.size
        mu = float(np.mean(x))
        d = x - mu
        d2 = d * d
        return cls(n, mu, float(np.sum(d2)), float(np.sum(d2 * d)), float(np.sum(d2 * d2)))

    def merge(self, o: "Moments") -> "Moments":
        na, nb = self.n, o.n
        n = na + nb
        delta = o.mean - self.mean
        dn = delta / n
        mean = self.mean + nb * dn
        m2 = self.m2 + o.m2 + delta * dn * na * nb
        m3 = (self.m3 + o.m3 + delta * dn * dn * na * nb * (na - nb)
              + 3.0 * dn * (na * o.m2 - nb * self.m2))
        m4 = (self.m4 + o.m4 + delta * dn**3 * na * nb * (na * na - na * nb + nb * nb)
              + 6.0 * dn * dn * (na * na * o.m2 + nb * nb * self.m2)
              + 4.0 * dn * (na * o.m3 - nb * self.m3))
        return Moments(n, mean, m2, m3, m4)

    def report(self, truth: float) -> McReport:
        n = self.n
        var = self.m2 / (n - 1)
        m4 = self.m4 / n
        se_var = math.sqrt(max(0.0, m4 - (n - 3) / (n - 1) * var * var) / n)
        bias = self.mean - truth
        return McReport(self.mean, var, bias * bias + var, bias, math.sqrt(var / n), se_var, n)


def _block_sizes(R: int) -> list[int]:
    full, rest = divmod(R, BLOCK)
    return [BLOCK] * full + ([rest] if rest else [])


def _rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))


def _run_blocks(cfg: McConfig, fn: Callable[[np.random.Generator, int], tuple[np.ndarray, ...]]):
    sizes = _block_sizes(cfg.replicates)

    def one(j):
        return tuple(Moments.of(x) for x in fn(_rng(cfg.seed, j), sizes[j]))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    else:
        parts = [one(j) for j in range(len(sizes))]
    acc = list(parts[0])
    for p in parts[1:]:
        acc = [a.merge(b) for a, b in zip(acc, p)]
    return acc


def _records(spec: SineSpec, q: QuantizerSpec, cfg: McConfig, rng: np.random.Generator, size: int) -> np.ndarray:
    phi = rng.uniform(0.0, 2.0 * math.pi, size)
    s = -spec.amplitude * np.cos(spec.angles[None, :] + phi[:, None]) + spec.offset
    if cfg.noise_sigma > 0:
        s = s + cfg.noise_sigma * rng.standard_normal(s.shape)
    if cfg.model == "quantizer":
        return q.step * quantize_codes(q, s)
    if cfg.model == "simple-uniform":
        return s + rng.uniform(-0.5 * q.step, 0.5 * q.step, s.shape)
    return s


def mc_moments(spec: SineSpec, q: QuantizerSpec, cfg: McConfig) -> tuple[McReport, McReport]:
    """Monte Carlo moments of (Â², Â) in one pass over the same replicates."""
    n = spec.n_samples
    c, s_ = basis(spec.lam, n)

    def fn(rng, size):
        Y = _records(spec, q, cfg, rng, size)
        t1 = Y @ c
        t2 = Y @ s_
        a2 = (4.0 / (n * n)) * (t1 * t1 + t2 * t2)
        return a2, np.sqrt(a2)

    m_sq, m_amp = _run_blocks(cfg, fn)
    A = spec.amplitude
    return m_sq.report(A * A), m_amp.report(A)


def mc_amp_sq(spec: SineSpec, q: QuantizerSpec, cfg: McConfig) -> McReport:
    return mc_moments(spec, q, cfg)[0]


def mc_amp(spec: SineSpec, q: QuantizerSpec, cfg: McConfig) -> McReport:
    return mc_moments(spec, q, cfg)[1]


def simple_model_moments(theta: float, delta: float, N: int) -> tuple[float, float]:
    """Second-order ratio-moment approximation of E(θ̂) and Var(θ̂).

    θ̂ = R/S with R = (1/N) Σ y_i h_i, S = (1/N) Σ h_i², h_i = cos φ_i and
    y_i = θ h_i + e_i, e_i uniform on [-Δ/2, Δ/2).
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    er, es = theta / 2.0, 0.5
    var_r = theta**2 / (8.0 * N) + delta**2 / (24.0 * N)
    var_s = 1.0 / (8.0 * N)
    cov = theta / (8.0 * N)
    # the usual relative form divides by E(R); this expansion avoids it so θ = 0 is fine
    mean = er / es - cov / es**2 + er * var_s / es**3
    var = (var_r - 2.0 * (er / es) * cov + (er / es) ** 2 * var_s) / es**2
    return mean, var


def scalar_model_mc(theta: float, q: QuantizerSpec, N: int, cfg: McConfig) -> McReport:
    """θ̂ = Σ y h / Σ h² for i.i.d. h_i = cos φ_i, quantized or with uniform error."""

    def fn(rng, size):
        h = np.cos(rng.uniform(0.0, 2.0 * math.pi, (size, N)))
        s = theta * h
        if cfg.noise_sigma > 0:
            s = s + cfg.noise_sigma * rng.standard_normal(s.shape)
        if cfg.model == "quantizer":
            y = q.step * quantize_codes(q, s)
        elif cfg.model == "simple-uniform":
            y = s + rng.uniform(-0.5 * q.step, 0.5 * q.step, s.shape)
        else:
            y = s
        return (np.sum(y * h, axis=1) / np.sum(h * h, axis=1),)

    return _run_blocks(cfg, fn)[0].report(theta)


def gaussian_reference_variance(
    A: float, sigma: float, N: int, lam: int = 1, replicates: int = 5000, seed: int = 0
) -> float:
    """Var(Â²) with additive Gaussian noise and no quantizer, by Monte Carlo."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return 0.0
    spec = SineSpec(A, lam, N)
    cfg = McConfig(replicates, seed, sigma, "gaussian-no-quant")
    return mc_amp_sq(spec, QuantizerSpec(1.0), cfg).variance
