"""Bessel functions, zeta at fixed arguments and the Schlömilch series g(A, Δ).

The series

    g(A, Δ) = (Δ/π) Σ_{k≥1} (-1)^k / k · J_1(2πkA/Δ)

controls the large-record bias of the squared-amplitude estimator.  It is
provided in three independent forms: a truncated numerical sum
(:func:`g_series`), the Nielsen finite closed form (:func:`g_closed`) and the
integral/floor-function form (:func:`g_gray`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

__all__ = [
    "LANDAU_C",
    "SeriesControl",
    "GSum",
    "bessel_j",
    "zeta",
    "riemann_zeta_4_3",
    "g_series",
    "g_closed",
    "g_gray",
    "g_derivative",
    "g_min_envelope",
    "schlomilch_odd",
    "level_count",
]

#: Landau's constant in |J_ν(x)| ≤ c |x|^{-1/3}, valid for every order ν ≥ 0.
LANDAU_C = 0.7857468704

_SERIES_MAX_X = 12.0
_HANKEL_MIN_X = 25.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the infinite series in this package."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-15
    max_terms: int = 10**6
    tail_bound_mode: Literal["landau", "abel", "none"] = "landau"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if self.tail_bound_mode not in ("landau", "abel", "none"):
            raise ValueError(f"unknown tail_bound_mode {self.tail_bound_mode!r}")

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class GSum:
    """Result of a truncated series evaluation."""

    value: float
    terms_used: int
    tail_estimate: float
    converged: bool


# ---------------------------------------------------------------------------
# Bessel functions of the first kind, integer order
# ---------------------------------------------------------------------------


def _j_power_series(n: int, x: np.ndarray) -> np.ndarray:
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term.copy()
    q = -(half * half)
    k = 1
    while True:
        term = term * q / (k * (n + k))
        total += term
        if k > 5 and np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
        if k > 400:
            break
        k += 1
    return total


def _j_hankel(n: int, x: np.ndarray) -> np.ndarray:
    # Hankel asymptotic expansion; caller guarantees x >> n^2.
    mu = 4.0 * n * n
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    eightx = 8.0 * x
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 60):
        new = term * (mu - (2 * k - 1) ** 2) / (k * eightx)
        grow = np.abs(new) >= prev
        active &= ~grow
        if not active.any():
            break
        upd = np.where(active, new, 0.0)
        # k odd -> Q series, k even -> P series; signs alternate in pairs
        sign = -1.0 if (k // 2) % 2 == 1 else 1.0
        if k % 2 == 1:
            q = q + sign * upd
        else:
            p = p + sign * upd
        prev = np.abs(new)
        term = new
        if np.all(np.abs(upd) < 1e-17):
            break
    chi = x - (0.5 * n + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _j_miller(n: int, x: np.ndarray) -> np.ndarray:
    # Downward recurrence from an order where J_m(x) is negligible, normalised
    # with J_0 + 2 Σ J_{2k} = 1.
    big = max(n, float(np.max(x)))
    m = int(big + 25 + 10 * big ** (1.0 / 3.0))
    m += m % 2
    j_next = np.zeros_like(x)
    j_cur = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    result = np.zeros_like(x)
    for k in range(m, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if k - 1 == n:
            result = j_cur.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        scale = np.abs(j_cur) > 1e250
        if scale.any():
            f = np.where(scale, 1e-250, 1.0)
            j_cur *= f
            j_next *= f
            norm *= f
            result *= f
    norm += j_cur
    return result / norm


def _j1_far(x: np.ndarray) -> np.ndarray:
    # Four-term Hankel expansion of J_1; relative error < 1e-15 for x >= 1000.
    r = 1.0 / (8.0 * x)
    r2 = r * r
    p = 1.0 + r2 * (15.0 / 2.0 - r2 * (4725.0 / 8.0))
    q = r * (3.0 + r2 * (-105.0 / 2.0))
    chi = x - 0.75 * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def bessel_j(n: int, x):
    """Bessel function of the first kind J_n(x) for integer order n ≥ 0.

    Accepts a scalar or an array for ``x``.  Small arguments use the ascending
    power series, large arguments the Hankel expansion, and everything in
    between the normalised Miller downward recurrence.
    """
    if n < 0 or int(n) != n:
        raise ValueError("order must be a non-negative integer")
    n = int(n)
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    sign = np.where((xa < 0) & (n % 2 == 1), -1.0, 1.0)
    ax = np.abs(xa)
    out = np.empty_like(ax)

    use_series = (ax <= _SERIES_MAX_X) | (ax * ax <= 4.0 * (n + 1))
    use_hankel = ~use_series & (ax >= max(_HANKEL_MIN_X, float(n * n)))
    use_miller = ~use_series & ~use_hankel
    if use_series.any():
        out[use_series] = _j_power_series(n, ax[use_series])
    if use_hankel.any():
        out[use_hankel] = _j_hankel(n, ax[use_hankel])
    if use_miller.any():
        out[use_miller] = _j_miller(n, ax[use_miller])
    out *= sign
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Riemann zeta by Euler-Maclaurin
# ---------------------------------------------------------------------------

# B_2, B_4, ..., B_20
_BERNOULLI = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330,
)


def zeta(s: float, n: int = 20) -> float:
    """Riemann zeta ζ(s) for real s > 1 via Euler-Maclaurin summation."""
    if s <= 1:
        raise ValueError("zeta requires s > 1")
    head = math.fsum(k**-s for k in range(1, n))
    parts = [head, n ** (1 - s) / (s - 1), 0.5 * n**-s]
    rising = s  # s (s+1) ... (s+2j-2)
    for j, b in enumerate(_BERNOULLI, start=1):
        parts.append(b / math.factorial(2 * j) * rising * n ** (-s - 2 * j + 1))
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return math.fsum(parts)


def riemann_zeta_4_3() -> float:
    """ζ(4/3) ≈ 3.6009."""
    return zeta(4.0 / 3.0)


# ---------------------------------------------------------------------------
# The Schlömilch series g(A, Δ)
# ---------------------------------------------------------------------------


def level_count(A: float, delta: float) -> int:
    """p = ⌊A/Δ + 1/2⌋, the number of positive code levels a sine of amplitude A reaches."""
    return math.floor(A / delta + 0.5)


def _landau_tail(A: float, delta: float, K: int) -> float:
    # Σ_{k>K} k^{-4/3} ≤ 3 K^{-1/3}
    return (delta / math.pi) * LANDAU_C * (delta / (2 * math.pi * A)) ** (1 / 3) * 3.0 * K ** (-1 / 3)


def _abel_tail(A: float, delta: float, K: int) -> float:
    # Leading Hankel term gives k^{-3/2} e^{ikω}; summation by parts bounds its
    # tail by (K+1)^{-3/2}/|sin(ω/2)|.  Next-order term is absolutely summable.
    gamma = A / delta
    omega = 2 * math.pi * gamma + math.pi
    s = abs(math.sin(0.5 * omega))
    if s < 1e-300:
        return math.inf
    lead = (delta / math.pi) / (math.pi * math.sqrt(gamma)) * (K + 1) ** -1.5 / s
    rest = (delta / math.pi) * math.sqrt(2 / math.pi) * 0.375 * (2 * math.pi * gamma) ** -1.5 * (2 / 3) * K**-1.5
    return 2.0 * (lead + rest)


def g_series(A: float, delta: float, ctrl: SeriesControl | None = None) -> GSum:
    """Truncated sum of (Δ/π) Σ (-1)^k/k J_1(2πkA/Δ)."""
    if not (A > 0 and delta > 0):
        raise ValueError("A and delta must be positive")
    ctrl = ctrl or SeriesControl()
    chunk = 65536
    scale = 2 * math.pi * A / delta
    parts: list[float] = []
    K = 0
    tail = math.inf
    value = 0.0
    while K < ctrl.max_terms:
        k = np.arange(K + 1, min(K + chunk, ctrl.max_terms) + 1, dtype=float)
        z = scale * k
        j1 = _j1_far(z) if z[0] >= 1000.0 else bessel_j(1, z)
        terms = j1 / k
        terms[0::2] *= -1.0 if (K + 1) % 2 == 1 else 1.0
        terms[1::2] *= 1.0 if (K + 1) % 2 == 1 else -1.0
        parts.append(float(np.sum(terms)))
        K = int(k[-1])
        value = (delta / math.pi) * math.fsum(parts)
        if ctrl.tail_bound_mode == "landau":
            tail = _landau_tail(A, delta, K)
        elif ctrl.tail_bound_mode == "abel":
            tail = _abel_tail(A, delta, K)
        else:
            tail = math.inf
        if tail <= ctrl.target(value):
            return GSum(value, K, tail, True)
    return GSum(value, K, tail, False)


def g_closed(A: float, delta: float) -> float:
    """Nielsen closed form of g(A, Δ); a finite sum of p square roots."""
    if not (A > 0 and delta > 0):
        raise ValueError("A and delta must be positive")
    x = math.pi * A / delta
    p = level_count(A, delta)
    if p == 0:
        return -0.5 * A
    a = (np.arange(1, p + 1) - 0.5) * math.pi
    rad = np.maximum(x * x - a * a, 0.0)  # k = p radicand may round below zero
    return (delta / math.pi) * (-0.5 * x + (2.0 / x) * math.fsum(np.sqrt(rad)))


def _gray_breaks(gamma: float) -> np.ndarray:
    # b_0 = 0, b_k = arcsin((k-1/2)/γ) for 1 ≤ k ≤ p, b_{p+1} = π/2
    p = math.floor(gamma + 0.5)
    arg = (np.arange(1, p + 1) - 0.5) / gamma
    over = arg - 1.0
    if np.any(over > 1e-12):
        raise ArithmeticError("arcsin argument outside [-1, 1]")
    b = np.empty(p + 2)
    b[0] = 0.0
    b[1 : p + 1] = np.arcsin(np.minimum(arg, 1.0))
    b[p + 1] = 0.5 * math.pi
    return b


def g_gray(A: float, delta: float) -> float:
    """g(A, Δ) through the floor-function integral representation of J_1."""
    if not (A > 0 and delta > 0):
        raise ValueError("A and delta must be positive")
    gamma = A / delta
    b = _gray_breaks(gamma)
    k = np.arange(b.size - 1)
    s = -2.0 * math.fsum(k * (np.cos(b[1:]) - np.cos(b[:-1])))
    return (delta / math.pi) * (-0.5 * math.pi * gamma + s)


def schlomilch_odd(m, gamma: float):
    """Σ_{k≥1} (-1)^k/k · J_m(2πγk) for odd m ≥ 1, in finite closed form.

    ``m`` may be an integer array.  Only the first m = 1 entry carries the
    -γπ/2 linear term.
    """
    m_arr = np.atleast_1d(np.asarray(m))
    if np.any(m_arr < 1) or np.any(m_arr % 2 == 0):
        raise ValueError("m must be odd and positive")
    p = math.floor(gamma + 0.5)
    out = np.zeros(m_arr.shape, dtype=float)
    if p > 0:
        beta = _gray_breaks(gamma)[1 : p + 1]
        mf = m_arr.astype(float)
        step = max(1, 2**22 // p)
        for i in range(0, mf.size, step):
            mm = mf[i : i + step]
            out[i : i + step] = (2.0 / mm) * np.cos(np.outer(mm, beta)).sum(axis=1)
    out = out - np.where(m_arr == 1, 0.5 * math.pi * gamma, 0.0)
    return float(out[0]) if np.ndim(m) == 0 else out


def g_derivative(A: float, delta: float) -> float:
    """∂g/∂A at fixed Δ, inside a bin ((p-1/2)Δ, (p+1/2)Δ)."""
    if not (A > 0 and delta > 0):
        raise ValueError("A and delta must be positive")
    p = level_count(A, delta)
    if p >= 1 and A - (p - 0.5) * delta <= 1e-9 * delta:
        raise ZeroDivisionError(f"g' diverges at the bin edge A = {(p - 0.5) * delta!r}")
    if p == 0:
        return -0.5
    x = math.pi * A / delta
    a2 = ((np.arange(1, p + 1) - 0.5) * math.pi) ** 2
    return -0.5 + 2.0 * math.fsum(a2 / (x * x * np.sqrt(x * x - a2)))


def g_min_envelope(p: int, delta: float) -> float:
    """Value of g at the local minimum abscissa A = (p - 1/2)Δ."""
    if p < 0:
        raise ValueError("p must be >= 0")
    if p <= 1:
        return (0.5 - p) * delta / 2
    k = np.arange(1, p) - 0.5
    r = 1.0 - (k / (p - 0.5)) ** 2
    return (0.5 - p) * delta / 2 + (2 * delta / math.pi) * math.fsum(np.sqrt(r))
