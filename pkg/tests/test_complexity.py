import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PROPERTY_CASES
from holescan.complexity import complexity_report
from holescan.errors import ConfigError
from holescan.fir_design import FirFilter


def test_published_total():
    rep = complexity_report(FirFilter([1.0] * 455), 6)  # 455 symmetric taps -> 228 multipliers
    assert (rep.mu_prototype, rep.mu_modulation, rep.mu_hpf, rep.mu_total) == (228, 36, 2, 266)


@pytest.mark.parametrize("nc, expected", [(1, 1), (3, 9)])
def test_modulation(nc, expected):
    assert complexity_report(100, nc).mu_modulation == expected


@settings(max_examples=PROPERTY_CASES)
@given(st.integers(0, 10 ** 5), st.integers(1, 64))
def test_invariants(mu, nc):
    r = complexity_report(mu, nc)
    assert r.mu_total == r.mu_prototype + r.mu_modulation + r.mu_hpf
    assert r.mu_modulation == nc ** 2 and r.mu_hpf == 2 and r.m_channels == 2


def test_bad_band_count():
    with pytest.raises(ConfigError):
        complexity_report(10, 0)
