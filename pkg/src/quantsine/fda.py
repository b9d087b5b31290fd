"""Bessel-series (frequency-domain) analysis of the squared-amplitude estimator.

The quantization error of a mid-tread quantizer is a sawtooth in the input,

    e(s) = (Δ/π) Σ_{k≥1} (-1)^k/k · sin(2πks/Δ),

and for a sine input each sawtooth harmonic expands into odd Bessel
harmonics of the phase.  Averaging over a uniform phase leaves

    E(Â²) - A² = 4A·g(A, Δ) + 8·h(A, Δ, N)

where g does not depend on N and h collects the error-error correlations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import (
    LANDAU_C,
    GSum,
    SeriesControl,
    g_closed,
    g_min_envelope,
    riemann_zeta_4_3,
    schlomilch_odd,
)

__all__ = [
    "SIGN_PATTERNS",
    "SieveSolution",
    "BiasReport",
    "diophantine_sieve",
    "h_term",
    "bias_asymptotic",
    "bias_finite_n",
    "landau_g_bound",
    "bound_b1",
    "bound_b2",
    "nearest_envelope_index",
    "b2_curve",
    "asymptotic_second_moment",
    "amp_bias_delta_method",
]

#: (ε_U, ε_H, ε_L) for the eight cosines in the product expansion, in order.
SIGN_PATTERNS: tuple[tuple[int, int, int], ...] = (
    (+1, +1, +1),
    (+1, -1, -1),
    (+1, +1, -1),
    (+1, -1, +1),
    (-1, +1, +1),
    (-1, -1, -1),
    (-1, +1, -1),
    (-1, -1, +1),
)


@dataclass(frozen=True)
class SieveSolution:
    term_index: int
    signs: tuple[int, int, int]
    satisfied: bool


@dataclass(frozen=True)
class BiasReport:
    bias_finite_n: float
    bias_asymptotic: float
    g_value: float
    h_value: float
    bound_b1: float
    bound_b2: float
    tail_estimate: float = 0.0
    converged: bool = True


def diophantine_sieve(I: int, U: int, H: int, L: int) -> list[SieveSolution]:
    """Which of the eight phase frequencies I ± U ± H ± L vanish.

    A product of four cosines cos(Iφ+·)cos(Uφ+·)cos(Hφ+·)cos(Lφ+·) expands
    into eight cosines (each with weight 1/8); only those whose phase
    frequency is zero survive the expectation over a uniform phase.
    """
    for v in (I, U, H, L):
        if int(v) != v or v <= 0 or v % 2 == 0:
            raise ValueError("sieve arguments must be odd positive integers")
    out = []
    for idx, (eu, eh, el) in enumerate(SIGN_PATTERNS):
        out.append(SieveSolution(idx, (eu, eh, el), I + eu * U + eh * H + el * L == 0))
    return out


def _period(lam: int, n: int) -> int:
    return n // math.gcd(lam, n)


def h_term(
    A: float,
    delta: float,
    N: int,
    lam: int,
    ctrl: SeriesControl | None = None,
) -> GSum:
    """Finite-record correction h(A, Δ, N).

    Averaging e_i e_u cos(k_i - k_u) over phase and summing over the record
    keeps only the Bessel harmonics m with m ≡ ±1 (mod N'), N' = N/gcd(λ, N):

        h = Δ²/(2π²) Σ_{m odd, m ≡ ±1 mod N'} G_m²,
        G_m = Σ_k (-1)^k/k · J_m(2πkA/Δ)

    and each G_m has a finite closed form (:func:`schlomilch_odd`).  The sum
    over m is truncated at ``ctrl.max_terms``; G_m² ~ 1/m² so the tail is
    estimated as density · mean(m² G_m²) / M.
    """
    if not (A > 0 and delta > 0):
        raise ValueError("A and delta must be positive")
    ctrl = ctrl or SeriesControl()
    q = _period(lam, N)
    if q < 3:
        raise ValueError(f"N/gcd(lambda, N) = {q} < 3: sine and cosine columns are not orthogonal")
    gamma = A / delta
    scale = delta * delta / (2.0 * math.pi**2)
    # the selection rule (m odd, m ≡ ±1 mod q) repeats with period lcm(2, q)
    step = q if q % 2 == 0 else 2 * q
    residues = [r for r in range(step) if r % 2 == 1 and r % q in (1, q - 1)]
    density = len(residues) / step
    chunk_periods = max(1, 8192 // len(residues))
    parts: list[float] = []
    start = 0
    terms = 0
    tail = math.inf
    while True:
        base = np.arange(start, start + chunk_periods, dtype=np.int64) * step
        m = (base[:, None] + np.asarray(residues, dtype=np.int64)[None, :]).ravel()
        m = np.unique(m[(m >= 1) & (m <= ctrl.max_terms)])
        if m.size == 0:
            break
        G = schlomilch_odd(m, gamma)
        parts.append(float(np.sum(G * G)))
        terms = int(m[-1])
        value = scale * math.fsum(parts)
        mm = m.astype(float)
        tail = scale * density * float(np.mean((mm * G) ** 2)) / float(mm[-1] + 1.0)
        if ctrl.tail_bound_mode == "none":
            tail = math.inf
        if tail <= ctrl.target(value) or terms >= ctrl.max_terms:
            break
        start += chunk_periods
    value = scale * math.fsum(parts)
    return GSum(value, terms, float(tail), bool(tail <= ctrl.target(value)))


def bias_asymptotic(A: float, delta: float) -> float:
    """lim_{N→∞} E(Â²) - A² = 4g(A + g)."""
    g = g_closed(A, delta)
    return 4.0 * g * (A + g)


def landau_g_bound(A: float, delta: float) -> float:
    """B(A, Δ) = Δ^{4/3} ζ(4/3) c / (π (2πA)^{1/3}) ≥ |g(A, Δ)|."""
    return delta ** (4.0 / 3.0) * riemann_zeta_4_3() * LANDAU_C / (math.pi * (2.0 * math.pi * A) ** (1.0 / 3.0))


def bound_b1(A: float, delta: float) -> float:
    """Loose analytic bound 4AB + 4B² on |asymptotic bias|."""
    if not A > 0:
        raise ValueError("A must be positive")
    B = landau_g_bound(A, delta)
    return 4.0 * A * B + 4.0 * B * B


def bound_b2(delta: float, p: int) -> float:
    """Asymptotic bias at the p-th local minimum abscissa A = (p - 1/2)Δ."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return 4.0 * (p - 0.5) * delta * g_min_envelope(p, delta)


def nearest_envelope_index(A: float, delta: float) -> int:
    """p ≥ 1 whose abscissa (p - 1/2)Δ is closest to A."""
    return max(1, math.floor(A / delta + 1.0))


def b2_curve(delta: float, a_max: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Abscissas (p - 1/2)Δ and |B2| for every envelope point up to ``a_max``."""
    if a_max is None:
        a_max = 1.0 - delta / 2
    p_max = max(1, math.floor(a_max / delta + 0.5))
    p = np.arange(1, p_max + 1)
    return (p - 0.5) * delta, np.array([abs(bound_b2(delta, int(k))) for k in p])


def bias_finite_n(
    A: float,
    delta: float,
    N: int,
    lam: int,
    ctrl: SeriesControl | None = None,
) -> BiasReport:
    """4A·g + 8h for an N-sample coherent record, plus the asymptotic value and bounds."""
    if not A > 0:
        raise ValueError("A must be positive")
    if N < 3:
        raise ValueError("N must be >= 3")
    g = g_closed(A, delta)
    h = h_term(A, delta, N, lam, ctrl)
    return BiasReport(
        bias_finite_n=4.0 * A * g + 8.0 * h.value,
        bias_asymptotic=4.0 * g * (A + g),
        g_value=g,
        h_value=h.value,
        bound_b1=bound_b1(A, delta),
        bound_b2=bound_b2(delta, nearest_envelope_index(A, delta)),
        tail_estimate=8.0 * h.tail_estimate,
        converged=h.converged,
    )


def asymptotic_second_moment(A: float, delta: float) -> float:
    """lim_{N→∞} E((Â²)²), expanded term by term."""
    g = g_closed(A, delta)
    return math.fsum([A**4, 8 * A**3 * g, 24 * A**2 * g**2, 32 * A * g**3, 16 * g**4])


def amp_bias_delta_method(mean_amp_sq: float, var_amp_sq: float) -> float:
    """Second-order approximation of E(√X) from the mean and variance of X."""
    if not mean_amp_sq > 0:
        raise ValueError("mean of the squared amplitude must be positive")
    return math.sqrt(mean_amp_sq) - var_amp_sq / (8.0 * mean_amp_sq**1.5)
