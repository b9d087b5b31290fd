import math

import numpy as np
import pytest

from quantsine.ada import ada_moments
from quantsine.montecarlo import (
    McConfig,
    Moments,
    default_replicates,
    gaussian_reference_variance,
    mc_amp,
    mc_amp_sq,
    mc_moments,
    scalar_model_mc,
    simple_model_moments,
)
from quantsine.signal import QuantizerSpec, SineSpec


def test_default_replicates():
    assert default_replicates(10) == 100_000
    assert default_replicates(1000) == 5000


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(1)
    with pytest.raises(ValueError):
        McConfig(10, noise_sigma=-1)
    with pytest.raises(ValueError):
        McConfig(10, model="bogus")


def test_moments_merge_matches_direct():
    rng = np.random.default_rng(0)
    x = rng.gamma(2.0, size=5000)
    m = Moments.of(x[:1234]).merge(Moments.of(x[1234:3000])).merge(Moments.of(x[3000:]))
    ref = Moments.of(x)
    for a, b in zip((m.mean, m.m2, m.m3, m.m4), (ref.mean, ref.m2, ref.m3, ref.m4)):
        assert a == pytest.approx(b, rel=1e-10)


def test_seed_reproducible_and_thread_independent():
    q = QuantizerSpec.from_bits(6)
    spec = SineSpec(0.5, 13, 100)
    a = mc_amp_sq(spec, q, McConfig(5000, seed=7, workers=1))
    b = mc_amp_sq(spec, q, McConfig(5000, seed=7, workers=4))
    c = mc_amp_sq(spec, q, McConfig(5000, seed=8))
    assert a == b
    assert a.mean != c.mean


def test_mc_agrees_with_ada():
    q = QuantizerSpec.from_bits(6)
    spec = SineSpec(0.47, 13, 100)
    ada = ada_moments(spec, q)
    mc = mc_amp_sq(spec, q, McConfig(40_000, seed=1))
    assert abs(mc.mean - ada.mean_amp_sq) <= 4 * mc.std_error_mean
    assert abs(mc.variance - ada.variance_amp_sq) <= 4 * mc.std_error_variance
    amp = mc_amp(spec, q, McConfig(40_000, seed=1))
    assert abs(amp.mean - ada.mean_amp) <= 4 * amp.std_error_mean


def test_joint_reports():
    q = QuantizerSpec.from_bits(5)
    spec = SineSpec(0.6, 7, 50)
    sq, amp = mc_moments(spec, q, McConfig(3000, seed=2))
    assert sq.bias == pytest.approx(sq.mean - 0.36)
    assert amp.bias == pytest.approx(amp.mean - 0.6)
    assert sq.mse == pytest.approx(sq.variance + sq.bias**2, rel=1e-6)
    assert sq.replicates_used == 3000


def test_simple_model_closed_form():
    d = 0.25
    mean, var = simple_model_moments(0.7, d, 200)
    assert mean == pytest.approx(0.7)
    assert var == pytest.approx(d * d / (6 * 200))


def test_simple_model_mc_matches_theory():
    q = QuantizerSpec(0.25)
    mc = scalar_model_mc(1.0, q, 200, McConfig(20_000, seed=3, model="simple-uniform"))
    _, var = simple_model_moments(1.0, q.step, 200)
    assert mc.variance == pytest.approx(var, rel=0.05)


def test_gaussian_reference():
    A, s, N = 0.5, 0.01, 200
    v = gaussian_reference_variance(A, s, N, replicates=20_000)
    # Â² ≈ A² + 2A·noise with noise variance 2σ²/N
    assert v == pytest.approx(8 * A * A * s * s / N, rel=0.1)
    assert gaussian_reference_variance(A, 0.0, N) == pytest.approx(0.0, abs=1e-25)


def test_noise_model_changes_result():
    q = QuantizerSpec.from_bits(8)
    spec = SineSpec(0.5, 13, 100)
    a = mc_amp_sq(spec, q, McConfig(5000, seed=1))
    b = mc_amp_sq(spec, q, McConfig(5000, seed=1, noise_sigma=q.step))
    assert a.mean != b.mean
    assert math.isfinite(b.std_error_variance)
