"""Coherently sampled sine wave and the uniform mid-tread quantizer."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "SineSpec",
    "QuantizerSpec",
    "sample_sine",
    "sample_vector",
    "quantize",
    "quantize_codes",
    "quant_error",
    "make_record",
]


@dataclass(frozen=True)
class SineSpec:
    """s_i = -A cos(2πλi/N + φ) + d for i = 0, ..., N-1."""

    amplitude: float
    lam: int
    n_samples: int
    phase: float = 0.0
    offset: float = 0.0

    def __post_init__(self):
        if not self.amplitude >= 0:
            raise ValueError("amplitude must be >= 0")
        if int(self.lam) != self.lam or self.lam < 1:
            raise ValueError("lambda must be a positive integer")
        if int(self.n_samples) != self.n_samples or self.n_samples < 3:
            raise ValueError("n_samples must be an integer >= 3")

    @property
    def non_coprime(self) -> bool:
        return math.gcd(int(self.lam), int(self.n_samples)) != 1

    @property
    def angles(self) -> np.ndarray:
        """k_i = 2πλi/N, reduced mod 2π through the integer residue λi mod N."""
        n = self.n_samples
        i = np.arange(n, dtype=np.int64)
        return 2.0 * math.pi * ((self.lam * i) % n) / n

    def with_phase(self, phase: float) -> "SineSpec":
        return SineSpec(self.amplitude, self.lam, self.n_samples, phase, self.offset)


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform quantizer: code = ⌊s/Δ + 1/2 + c⌋, output = Δ·code.

    ``c`` is the characteristic offset in units of Δ (0 for mid-tread,
    -1/2 for truncation).  With ``policy="saturating"`` the code is clamped so
    the output stays in [-1, 1].
    """

    step: float
    c: float = 0.0
    policy: Literal["ideal", "saturating"] = "ideal"
    bits: int | None = None

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if not -0.5 <= self.c <= 0.5:
            raise ValueError("characteristic offset c must lie in [-0.5, 0.5]")
        if self.policy not in ("ideal", "saturating"):
            raise ValueError(f"unknown overload policy {self.policy!r}")

    @classmethod
    def from_bits(cls, bits: int, c: float = 0.0, policy: str = "ideal") -> "QuantizerSpec":
        if int(bits) != bits or bits < 1:
            raise ValueError("bits must be a positive integer")
        return cls(2.0 * 2.0 ** (-int(bits)), c, policy, int(bits))

    @property
    def max_code(self) -> int:
        return math.floor(1.0 / self.step)


def sample_sine(spec: SineSpec, i: int) -> float:
    if not 0 <= i < spec.n_samples:
        raise IndexError(f"sample index {i} outside [0, {spec.n_samples})")
    k = 2.0 * math.pi * ((spec.lam * i) % spec.n_samples) / spec.n_samples
    return -spec.amplitude * math.cos(k + spec.phase) + spec.offset


def sample_vector(spec: SineSpec) -> np.ndarray:
    return -spec.amplitude * np.cos(spec.angles + spec.phase) + spec.offset


def quantize_codes(q: QuantizerSpec, s):
    """Integer codes for input(s) ``s``."""
    codes = np.floor(np.asarray(s, dtype=float) / q.step + 0.5 + q.c)
    if q.policy == "saturating":
        codes = np.clip(codes, -q.max_code, q.max_code)
    return codes


def quantize(q: QuantizerSpec, s):
    out = q.step * quantize_codes(q, s)
    return float(out) if np.ndim(out) == 0 else out


def quant_error(q: QuantizerSpec, s):
    """Quantization error y - s.

    For c = 0 and the ideal policy this uses the fractional-part identity
    Δ/2 - Δ⟨s/Δ + 1/2⟩; otherwise it falls back to quantize(s) - s.
    """
    s = np.asarray(s, dtype=float)
    if q.c == 0.0 and q.policy == "ideal":
        u = s / q.step + 0.5
        out = q.step * 0.5 - q.step * (u - np.floor(u))
    else:
        out = q.step * quantize_codes(q, s) - s
    return float(out) if out.ndim == 0 else out


def make_record(
    spec: SineSpec,
    q: QuantizerSpec,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Quantized record y_i = Q(s_i + n_i) with Gaussian n_i of std ``noise_sigma``."""
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    s = sample_vector(spec)
    if noise_sigma > 0:
        if rng is None:
            raise ValueError("a seeded generator is required when noise_sigma > 0")
        s = s + noise_sigma * rng.standard_normal(spec.n_samples)
    return q.step * quantize_codes(q, s)
