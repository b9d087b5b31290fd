"""Least-squares fit of a known-frequency sine: θ̂, Â² and Â."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ThetaEstimate",
    "FitResult",
    "SingularSystemError",
    "fit_theta",
    "amp_sq_estimate",
    "fit",
    "general_ls_solve",
    "design_matrix",
    "basis",
    "batch_amp_sq",
]


class SingularSystemError(np.linalg.LinAlgError):
    """Normal equations are singular or too ill-conditioned to trust."""


@dataclass(frozen=True)
class ThetaEstimate:
    theta1: float  # estimate of A cos φ
    theta2: float  # estimate of A sin φ

    @property
    def amp_sq(self) -> float:
        return self.theta1 * self.theta1 + self.theta2 * self.theta2


@dataclass(frozen=True)
class FitResult:
    theta: ThetaEstimate
    amp_sq: float
    amp: float


def _check(n_y: int, lam: int, n: int):
    if n < 3:
        raise ValueError("N must be >= 3")
    if n_y != n:
        raise ValueError(f"record length {n_y} does not match N={n}")


def basis(lam: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """cos k_i and sin k_i with k_i = 2πλi/N (residues reduced exactly)."""
    i = np.arange(n, dtype=np.int64)
    k = 2.0 * math.pi * ((lam * i) % n) / n
    return np.cos(k), np.sin(k)


def design_matrix(lam: int, n: int) -> np.ndarray:
    """Columns [-cos k_i, sin k_i]; the signal is H·(A cos φ, A sin φ)."""
    c, s = basis(lam, n)
    return np.column_stack([-c, s])


def fit_theta(y, lam: int, n: int) -> ThetaEstimate:
    """Closed-form LS solution valid when the two columns are orthogonal (N ∤ 2λ)."""
    y = np.asarray(y, dtype=float)
    _check(y.size, lam, n)
    c, s = basis(lam, n)
    return ThetaEstimate(-2.0 / n * float(y @ c), 2.0 / n * float(y @ s))


def amp_sq_estimate(y, lam: int, n: int, debug: bool = False) -> float:
    """Â² = θ̂1² + θ̂2².

    With ``debug=True`` the O(N²) double sum (4/N²) ΣΣ y_i y_u cos(k_i - k_u)
    is evaluated as well and the two are required to agree.
    """
    y = np.asarray(y, dtype=float)
    fast = fit_theta(y, lam, n).amp_sq
    if debug:
        i = np.arange(n, dtype=np.int64)
        diff = (lam * (i[:, None] - i[None, :])) % n
        slow = 4.0 / (n * n) * float(y @ np.cos(2.0 * math.pi * diff / n) @ y)
        scale = max(abs(fast), 4.0 / n * float(y @ y) / n, 1e-300)
        if abs(slow - fast) > 1e-12 * scale:
            raise AssertionError(f"double-sum identity violated: {slow!r} vs {fast!r}")
    return fast


def fit(y, lam: int, n: int) -> FitResult:
    th = fit_theta(y, lam, n)
    a2 = th.amp_sq
    return FitResult(th, a2, math.sqrt(a2))


def general_ls_solve(H, y, cond_limit: float = 1e12) -> np.ndarray:
    """(HᵀH)⁻¹Hᵀy by LU with partial pivoting; refuses singular systems."""
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    if H.ndim == 1:
        H = H[:, None]
    if H.shape[0] != y.size:
        raise ValueError("H and y have incompatible shapes")
    G = H.T @ H
    b = H.T @ y
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularSystemError(f"normal matrix is singular (condition number {cond:.3g})")
    return np.linalg.solve(G, b)


def batch_amp_sq(Y: np.ndarray, lam: int, n: int) -> np.ndarray:
    """Â² for each row of a (records × N) array."""
    c, s = basis(lam, n)
    t1 = Y @ c
    t2 = Y @ s
    return (4.0 / (n * n)) * (t1 * t1 + t2 * t2)
