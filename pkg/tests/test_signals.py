import numpy as np
import pytest
import scipy.signal as ss
from scipy import integrate

from holescan.errors import ConfigError
from holescan.sensing import SensingScenario
from holescan.signals import SignalSource, UserSignal, rrc_pulse

USER = UserSignal(6.875, 167e3, 0.4)


def scenario(users=(USER,), add_noise=True, seed=7):
    return SensingScenario((5.0, 15.0), 25e6, 3, users=users, add_noise=add_noise, seed=seed)


class TestPulse:
    def test_unit_energy(self):
        val, _ = integrate.quad(lambda t: rrc_pulse(np.array([t]), 0.25)[0] ** 2, -40, 40, limit=400)
        assert val == pytest.approx(1.0, abs=2e-3)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_nyquist_after_matched_filter(self, k):
        # rrc * rrc is a raised cosine: zero at nonzero integer symbol lags
        t = np.linspace(-40, 40, 160001)
        p = rrc_pulse(t, 0.25)
        shifted = rrc_pulse(t - k, 0.25)
        assert abs(np.trapezoid(p * shifted, t)) < 3e-3

    def test_singular_points_continuous(self):
        s = 1 / (4 * 0.25)
        around = rrc_pulse(np.array([s - 1e-6, s, s + 1e-6]), 0.25)
        assert np.ptp(around) < 1e-4
        assert rrc_pulse(np.array([0.0]), 0.25)[0] == pytest.approx(1 - 0.25 + 1 / np.pi)


def test_noise_only_energy():
    x = scenario(users=()).source().get(10 ** 4)
    assert np.mean(np.abs(x) ** 2) == pytest.approx(1.0, rel=0.05)


def test_user_power_noise_off():
    x = scenario(add_noise=False).source().get(200000)
    assert np.mean(np.abs(x) ** 2) == pytest.approx(0.4, rel=0.05)


def test_spectral_peak_at_mapped_center():
    sc = scenario(add_noise=False)
    x = sc.source().get(1 << 16)
    f, pxx = ss.welch(x, fs=2.0, nperseg=64, return_onesided=False)
    peak = f[np.argmax(pxx)]
    assert abs(peak - sc.to_norm(6.875)) <= 2.0 / 64


def test_deterministic_and_prefix_consistent():
    a = scenario().source()
    b = scenario().source()
    long = b.get(50000)
    assert np.array_equal(a.get(1000), long[:1000])
    assert np.array_equal(a.get(50000), long)


def test_seed_changes_output():
    assert not np.array_equal(scenario(seed=1).source().get(100), scenario(seed=2).source().get(100))


def test_user_outside_span():
    with pytest.raises(ConfigError):
        scenario(users=(UserSignal(20.0, 167e3, 0.4),))


def test_support():
    lo, hi = USER.support_mhz()
    assert lo == pytest.approx(6.7706, abs=1e-4) and hi == pytest.approx(6.9794, abs=1e-4)


def test_source_needs_matching_offsets():
    with pytest.raises(ConfigError):
        SignalSource([USER], [], 25e6, 1.0, 0)
