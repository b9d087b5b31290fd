import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantsine.signal import QuantizerSpec, SineSpec, make_record, quant_error, quantize, sample_sine


def test_sample_sine_trivial():
    spec = SineSpec(1.0, 1, 4)
    assert sample_sine(spec, 0) == -1.0
    assert abs(sample_sine(spec, 1)) < 1e-16


def test_sample_sine_against_mpmath():
    mpmath.mp.dps = 30
    spec = SineSpec(0.5, 3, 8, math.pi / 3, 0.1)
    ref = -mpmath.mpf("0.5") * mpmath.cos(3 * mpmath.pi / 2 + mpmath.pi / 3) + mpmath.mpf("0.1")
    assert abs(sample_sine(spec, 2) - float(ref)) < 1e-15


def test_sample_index_checked():
    with pytest.raises(IndexError):
        sample_sine(SineSpec(1.0, 1, 4), 4)


def test_spec_validation_and_coprime_flag():
    with pytest.raises(ValueError):
        SineSpec(1.0, 1, 2)
    assert not SineSpec(1.0, 201, 2000).non_coprime
    assert SineSpec(1.0, 200, 2000).non_coprime


def test_quantizer_from_bits():
    assert QuantizerSpec.from_bits(10).step == 2.0 / 1024
    with pytest.raises(ValueError):
        QuantizerSpec(0.0)
    with pytest.raises(ValueError):
        QuantizerSpec(0.1, c=0.7)


@pytest.mark.parametrize("c,s,expected", [(0.0, 0.3, 0.25), (0.0, -0.125, 0.0), (-0.5, 0.3, 0.25)])
def test_quantize_examples(c, s, expected):
    assert quantize(QuantizerSpec(0.25, c), s) == expected


def test_saturating_policy_clamps():
    q = QuantizerSpec.from_bits(3, policy="saturating")
    assert quantize(q, 5.0) == 1.0
    assert quantize(q, -5.0) == -1.0
    assert quantize(QuantizerSpec.from_bits(3), 5.0) == 5.0


def test_quant_error_examples():
    q = QuantizerSpec(0.25)
    assert quant_error(q, 0.0) == 0.0
    assert quant_error(q, 0.0625) == -0.0625


def test_quant_error_identity_dense_grid():
    q = QuantizerSpec.from_bits(10)
    s = np.linspace(-1.0, 1.0, 10_000)
    gap = np.abs(quant_error(q, s) - (quantize(q, s) - s))
    assert np.all(gap <= 2 * np.spacing(np.maximum(np.abs(s), q.step)))
    assert np.all(np.abs(quant_error(q, s)) <= q.step / 2)


def test_quant_error_with_offset_uses_direct_difference():
    q = QuantizerSpec(0.25, c=0.3)
    s = np.linspace(-1, 1, 101)
    assert np.array_equal(quant_error(q, s), quantize(q, s) - s)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.integers(2, 14))
def test_quantize_shift_equivariance(s, b):
    q = QuantizerSpec.from_bits(b)
    assert quantize(q, s + q.step) == quantize(q, s) + q.step


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.integers(1, 50), st.integers(3, 100), st.floats(0, 2 * math.pi))
def test_sample_periodicity(A, lam, n, phi):
    spec = SineSpec(A, lam, n, phi)
    # the angle is reduced through λi mod N, so i and i + N coincide exactly
    k = lambda i: 2 * math.pi * ((lam * i) % n) / n  # noqa: E731
    assert all(k(i) == k(i + n) for i in range(n))
    assert all(sample_sine(spec, i) == -A * math.cos(k(i + n) + phi) for i in range(n))


def test_make_record_cases():
    q = QuantizerSpec.from_bits(4)
    assert np.all(make_record(SineSpec(q.step / 3, 3, 16, 0.4), q) == 0)
    q3 = QuantizerSpec.from_bits(3)
    spec = SineSpec(1 - q3.step / 2, 5, 32, 1.1)
    y = make_record(spec, q3)
    ref = np.array([quantize(q3, sample_sine(spec, i)) for i in range(32)])
    assert np.array_equal(y, ref)
    assert np.all(np.abs(y) <= 1.0)


def test_make_record_seeded_noise_is_deterministic():
    q = QuantizerSpec.from_bits(8)
    spec = SineSpec(0.7, 13, 100, 0.2)
    a = make_record(spec, q, q.step / 5, np.random.default_rng(42))
    b = make_record(spec, q, q.step / 5, np.random.default_rng(42))
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        make_record(spec, q, -1.0)
