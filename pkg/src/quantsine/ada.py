"""Exact moments by partitioning the phase circle.

Every quantized sample is a step function of the initial phase φ, so the
whole record is constant between consecutive code-transition phases.  Any
functional of the record (here Â² and its powers) is then integrated exactly
as a finite sum over segments weighted by their length.

For a coherent record the estimator Â²(φ) is periodic with period
2π·gcd(λ, N)/N (a phase shift by that amount permutes the samples), so the
moments only need the partition of one such period.  On that window each
transition of the full-circle sine maps to exactly one sample, which makes
the event count independent of N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .signal import QuantizerSpec, SineSpec, quantize_codes

__all__ = [
    "PhiInterval",
    "PhasePartition",
    "MomentReport",
    "level_phi_set",
    "transition_angles",
    "build_partition",
    "exact_moments",
    "ada_moments",
    "joint_moment",
]

TWO_PI = 2.0 * math.pi
_CHECKPOINT = 2048


@dataclass(frozen=True)
class PhiInterval:
    """Half-open phase interval [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("empty interval")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def contains(self, phi: float) -> bool:
        return self.lo <= phi < self.hi


@dataclass(frozen=True)
class MomentReport:
    mean_amp_sq: float
    second_moment_amp_sq: float
    variance_amp_sq: float
    bias: float
    mse: float
    engine: str
    mean_amp: float = math.nan
    variance_amp: float = math.nan
    std_error_mean: float = 0.0
    std_error_variance: float = 0.0


def _effective_offset(q: QuantizerSpec, d: float) -> float:
    return q.c + d / q.step


def _thresholds(A: float, q: QuantizerSpec, d: float) -> tuple[np.ndarray, np.ndarray]:
    """Levels n whose lower code boundary the sine actually crosses, and cos θ there.

    Code ≥ n  ⇔  cos θ ≤ t_n = (Δ/A)(1/2 + c_eff - n).
    """
    ce = _effective_offset(q, d)
    lo = math.ceil(0.5 + ce - A / q.step)
    hi = math.floor(0.5 + ce + A / q.step)
    if q.policy == "saturating":
        lo = max(lo, -q.max_code + 1)
        hi = min(hi, q.max_code)
    n = np.arange(lo, hi + 1, dtype=np.int64)
    t = (q.step / A) * (0.5 + ce - n)
    keep = (t > -1.0) & (t < 1.0)
    return n[keep], t[keep]


def transition_angles(A: float, q: QuantizerSpec, d: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Angles θ in [0, 2π) where code(-A cos θ + d) changes, with the code step (+1/-1)."""
    if A <= 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    _, t = _thresholds(A, q, d)
    up = np.arccos(t)
    theta = np.concatenate([up, TWO_PI - up])
    step = np.concatenate([np.ones(up.size, np.int64), -np.ones(up.size, np.int64)])
    return theta, step


def level_phi_set(
    A: float, delta: float, c: float, d: float, k_u: float, n: int
) -> list[PhiInterval]:
    """Phases φ ∈ [0, 2π) at which sample -A cos(k_u + φ) + d quantizes to code n."""
    ce = c + d / delta
    if A <= 0:
        return [PhiInterval(0.0, TWO_PI)] if math.floor(0.5 + ce) == n else []

    def alpha(level):
        t = (delta / A) * (0.5 + ce - level)
        return math.acos(min(1.0, max(-1.0, t)))

    a_lo, a_hi = alpha(n), alpha(n + 1)
    if not a_lo < a_hi:
        return []
    pieces = [(a_lo, a_hi), (TWO_PI - a_hi, TWO_PI - a_lo)]
    out: list[tuple[float, float]] = []
    for lo, hi in pieces:
        lo, hi = lo - k_u, hi - k_u
        shift = math.floor(lo / TWO_PI) * TWO_PI
        lo, hi = lo - shift, hi - shift
        if hi <= TWO_PI:
            out.append((lo, hi))
        else:
            out.append((lo, TWO_PI))
            out.append((0.0, hi - TWO_PI))
    out = sorted((lo, hi) for lo, hi in out if hi > lo)
    merged: list[list[float]] = []
    for lo, hi in out:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [PhiInterval(lo, hi) for lo, hi in merged]


@dataclass
class PhasePartition:
    """Sorted breakpoints of [0, span) and the sample codes on every segment.

    ``channel_angles[j]`` is the sample angle of channel j.  For a full
    partition channels are the N samples themselves; for a period partition
    they are the N' distinct angles, each standing for ``multiplicity``
    samples.  Codes are stored as the code vector on segment 0 plus one
    (channel, ±1) event per breakpoint, and materialised on demand.
    """

    breakpoints: np.ndarray  # segment starts; breakpoints[0] == 0
    span: float
    channel_angles: np.ndarray
    channel_samples: np.ndarray  # sample index represented by each channel
    initial_codes: np.ndarray
    event_channel: np.ndarray
    event_step: np.ndarray
    step: float
    lam: int
    n_samples: int
    multiplicity: int = 1
    amplitude: float = 0.0
    _codes: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_segments(self) -> int:
        return self.breakpoints.size

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.append(self.breakpoints, self.span))

    @property
    def codes(self) -> np.ndarray:
        """(segments × channels) integer code matrix."""
        if self._codes is None:
            inc = np.zeros((self.n_segments, self.channel_angles.size), dtype=np.int64)
            inc[np.arange(1, self.n_segments), self.event_channel] = self.event_step
            self._codes = self.initial_codes[None, :] + np.cumsum(inc, axis=0)
        return self._codes

    def segment_of(self, phi: float) -> int:
        return int(np.searchsorted(self.breakpoints, phi, side="right") - 1)

    def codes_at(self, phi: float) -> np.ndarray:
        """Codes of the channels at phase ``phi`` read from the partition."""
        s = self.segment_of(phi)
        codes = self.initial_codes.copy()
        np.add.at(codes, self.event_channel[:s], self.event_step[:s])
        return codes

    def amp_sq_values(self) -> np.ndarray:
        """Â² on every segment, from a running sum of code·e^{ik} with exact restarts."""
        e = np.exp(1j * self.channel_angles)
        L = self.event_channel.size
        out = np.empty(L + 1)
        codes = self.initial_codes.astype(np.int64).copy()
        inc = self.event_step * e[self.event_channel]
        for start in range(0, L + 1, _CHECKPOINT):
            stop = min(start + _CHECKPOINT, L + 1)
            base = complex(np.dot(codes, e))
            # segment j (start ≤ j < stop) sees events 0..j-1
            run = base + np.concatenate([[0.0], np.cumsum(inc[start : stop - 1])])
            out[start:stop] = run.real**2 + run.imag**2
            np.add.at(codes, self.event_channel[start:stop], self.event_step[start:stop])
        scale = 2.0 * self.multiplicity * self.step / self.n_samples
        return scale * scale * out


def _direct_codes(A, q, d, angles, phi):
    return quantize_codes(q, -A * np.cos(angles + phi) + d).astype(np.int64)


def build_partition(spec: SineSpec, q: QuantizerSpec, span: str = "full", samples=None) -> PhasePartition:
    """Partition of the phase axis on which every quantized sample is constant.

    ``span="full"`` covers [0, 2π) with one channel per sample (or per index
    in ``samples``).  ``span="period"`` covers one estimator period
    [0, 2π·gcd(λ,N)/N) with one channel per distinct sample angle; it is
    enough for any permutation-invariant functional such as Â².
    """
    A, d, N, lam = spec.amplitude, spec.offset, spec.n_samples, spec.lam
    G = math.gcd(lam, N)
    if span == "full":
        idx = np.arange(N) if samples is None else np.asarray(samples, dtype=np.int64)
        angles = TWO_PI * ((lam * idx) % N) / N
        width = TWO_PI
        mult = 1
    elif span == "period":
        if samples is not None:
            raise ValueError("a period partition always covers every sample angle")
        q_ = N // G
        r = np.arange(q_)
        angles = TWO_PI * r / q_
        # sample index realising each distinct angle: λ i ≡ G r (mod N)
        inv = pow(lam // G, -1, q_) if q_ > 1 else 0
        idx = (r * inv) % q_
        width = TWO_PI / q_
        mult = G
    else:
        raise ValueError(f"unknown span {span!r}")

    theta, step = transition_angles(A, q, d)
    if span == "full":
        phi = (theta[None, :] - angles[:, None]) % TWO_PI
        ch = np.repeat(np.arange(angles.size), theta.size)
        st = np.tile(step, angles.size)
        phi = phi.ravel()
    else:
        pos = theta / width
        ch = np.floor(pos).astype(np.int64)
        phi = theta - ch * width
        wrap = phi >= width
        phi[wrap] -= width
        ch[wrap] += 1
        neg = phi < 0
        phi[neg] += width
        ch[neg] -= 1
        ch %= angles.size
        st = step
    order = np.argsort(phi, kind="stable")
    phi, ch, st = phi[order], ch[order], st[order]

    bps = np.concatenate([[0.0], phi])
    widths = np.diff(np.append(bps, width))
    anchor = int(np.argmax(widths))
    mid = bps[anchor] + 0.5 * widths[anchor]
    codes_anchor = _direct_codes(A, q, d, angles, mid)
    initial = codes_anchor.copy()
    np.add.at(initial, ch[:anchor], -st[:anchor])
    return PhasePartition(
        breakpoints=bps,
        span=width,
        channel_angles=angles,
        channel_samples=idx,
        initial_codes=initial,
        event_channel=ch,
        event_step=st,
        step=q.step,
        lam=lam,
        n_samples=N,
        multiplicity=mult,
        amplitude=A,
    )


def _weighted_mean(values: np.ndarray, w: np.ndarray, total: float) -> float:
    return math.fsum(values * w) / total


def exact_moments(partition: PhasePartition, lam: int | None = None, N: int | None = None,
                  amplitude: float | None = None) -> MomentReport:
    """Exact E(Â²), Var(Â²), E(Â) and Var(Â) from a partition."""
    if lam is not None and lam != partition.lam:
        raise ValueError("partition was built for a different lambda")
    if N is not None and N != partition.n_samples:
        raise ValueError("partition was built for a different N")
    if partition.multiplicity == 1 and partition.channel_angles.size != partition.n_samples:
        raise ValueError("moments need a partition covering every sample")
    A = partition.amplitude if amplitude is None else amplitude
    w = partition.widths
    total = partition.span
    a2 = partition.amp_sq_values()
    mean = _weighted_mean(a2, w, total)
    var = max(0.0, _weighted_mean((a2 - mean) ** 2, w, total))
    second = _weighted_mean(a2 * a2, w, total)
    amp = np.sqrt(a2)
    mean_amp = _weighted_mean(amp, w, total)
    var_amp = max(0.0, _weighted_mean((amp - mean_amp) ** 2, w, total))
    bias = mean - A * A
    return MomentReport(
        mean_amp_sq=mean,
        second_moment_amp_sq=second,
        variance_amp_sq=var,
        bias=bias,
        mse=bias * bias + var,
        engine="ada",
        mean_amp=mean_amp,
        variance_amp=var_amp,
    )


def ada_moments(spec: SineSpec, q: QuantizerSpec) -> MomentReport:
    """Exact moments of Â² for a random uniform phase (``spec.phase`` is ignored)."""
    if spec.n_samples // math.gcd(spec.lam, spec.n_samples) < 3:
        raise ValueError("N/gcd(lambda, N) must be >= 3 for the two-column fit")
    return exact_moments(build_partition(spec, q, span="period"))


def joint_moment(spec: SineSpec, q: QuantizerSpec, indices, powers) -> float:
    """E[Π_j y_{u_j}^{m_j}] over a uniform phase."""
    indices = [int(i) for i in indices]
    powers = [int(m) for m in powers]
    if len(indices) != len(powers):
        raise ValueError("indices and powers differ in length")
    if any(not 0 <= i < spec.n_samples for i in indices):
        raise IndexError("sample index out of range")
    if any(m < 1 for m in powers):
        raise ValueError("powers must be >= 1")
    uniq = sorted(set(indices))
    part = build_partition(spec, q, span="full", samples=uniq)
    pos = {u: j for j, u in enumerate(uniq)}
    exps = np.zeros(len(uniq), dtype=np.int64)
    for i, m in zip(indices, powers):
        exps[pos[i]] += m
    y = q.step * part.codes.astype(float)
    prod = np.prod(y**exps[None, :], axis=1)
    return _weighted_mean(prod, part.widths, part.span)
