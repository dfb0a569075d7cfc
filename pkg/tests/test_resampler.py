import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import PROPERTY_CASES
from holescan.errors import ConfigError, EmptyInput
from holescan.resampler import SrcConfig, resample, resampled_length


def test_half_rate_linear_hand_run():
    x = np.array([2.0, 6.0, -4.0])
    y, trace = resample(x, SrcConfig(0.5, 1))
    assert y.tolist() == [2.0, 4.0, 6.0, 1.0, -4.0]
    assert trace.acc.tolist() == [0, 0.5, 1, 1.5, 2]
    assert trace.i.tolist() == [0, 1, 1, 2, 2]


def test_decimate_by_two():
    x = np.arange(5.0) ** 2
    y, trace = resample(x, SrcConfig(2.0))
    assert y.tolist() == [0.0, 4.0, 16.0]
    assert trace.acc.tolist() == [0, 2, 4]


@pytest.mark.parametrize("n, srcf, expected", [(3, 0.5, 5), (5, 2, 3), (17, 1, 17), (10, 0.3, 31)])
def test_resampled_length(n, srcf, expected):
    assert resampled_length(n, srcf) == expected


def test_errors():
    with pytest.raises(EmptyInput):
        resample([1.0], SrcConfig(0.5))
    with pytest.raises(ConfigError):
        SrcConfig(0.0)
    with pytest.raises(ConfigError):
        SrcConfig(0.5, 0)


@settings(max_examples=PROPERTY_CASES)
@given(arrays(float, st.integers(2, 50), elements=st.floats(-10, 10)), st.integers(1, 6))
def test_unit_factor_is_identity(x, n):
    y, _ = resample(x, SrcConfig(1.0, n))
    assert np.array_equal(y, x)


@settings(max_examples=PROPERTY_CASES)
@given(st.floats(0.1, 4.0), st.integers(2, 80), st.integers(1, 6))
def test_trace_invariants(srcf, length, n):
    x = np.sin(0.1 * np.arange(length))
    y, tr = resample(x, SrcConfig(srcf, n))
    assert len(y) == len(tr) == resampled_length(length, srcf)
    # output covers every accumulator value n * srcf inside the input, and no more
    assert (len(y) - 1) * srcf <= length - 1 < len(y) * srcf
    assert abs(len(y) - (math.floor((length - 1) / srcf) + 1)) <= 1
    assert np.all(tr.d == tr.acc - np.floor(tr.acc))
    assert np.all(np.where(tr.d != 0, tr.f == 1 - tr.d, tr.f == tr.d))
    expected_i = np.minimum(np.ceil(tr.acc), length - 1)
    assert np.array_equal(tr.i, expected_i)
    assert np.all(tr.acc <= length - 1)
    assert np.array_equal(tr.clamped, np.ceil(tr.acc) > length - 1)


def test_tone_fidelity():
    nu, srcf = 0.02, 0.7
    x = np.sin(2 * np.pi * nu * np.arange(500))
    y, _ = resample(x, SrcConfig(srcf, 4))
    m = np.arange(y.size)
    err = np.abs(y - np.sin(2 * np.pi * nu * srcf * m))[10:-10]
    assert err.max() <= 0.01


def test_round_trip_half_then_double():
    x = np.sin(2 * np.pi * 0.01 * np.arange(300)) + 0.5 * np.cos(2 * np.pi * 0.004 * np.arange(300))
    up, _ = resample(x, SrcConfig(0.5, 4))
    back, _ = resample(up, SrcConfig(2.0, 4))
    assert back.size == x.size
    assert np.max(np.abs(back - x)[10:-10]) < 1e-3


def test_deterministic():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(100)
    y1, t1 = resample(x, SrcConfig(0.37))
    y2, t2 = resample(x, SrcConfig(0.37))
    assert np.array_equal(y1, y2) and t1.steps == t2.steps
