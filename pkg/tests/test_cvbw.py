import numpy as np
import pytest
import scipy.signal as ss
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PROPERTY_CASES
from holescan.cvbw import (SIX_DB, BandFilter, CvbwEngine, Side, edge_6db, from_high, from_low,
                           modulated_bank, response, stopband_edge, to_highpass,
                           variable_bandwidth)
from holescan.errors import ConfigError, OutOfRange
from holescan.fir_design import FilterSpec, FirFilter

BAND = 0.8 / 3  # one of three bands over a 10 MHz span at 25 MHz


def edge_oracle(taps):
    # -6 dB point via scipy.signal.freqz on a dense grid
    w, h = ss.freqz(taps, worN=1 << 20)
    mag = np.abs(h)
    k = np.argmax(mag < SIX_DB * mag[0])
    return w[k] / np.pi


@pytest.mark.parametrize("rf", [1, 1.5, 2, 4, 8])
def test_bandwidth_scaling(engine, rf):
    f = variable_bandwidth(engine, engine.bw_orig / rf)
    target = engine.bw_orig / rf
    assert abs(edge_oracle(f.taps) - target) <= 0.05 * target


@pytest.mark.parametrize("rf", [1.5, 2, 4, 8])
def test_stopband_edge_scales(engine, rf):
    base = stopband_edge(engine.prototype.taps, 50)
    f = variable_bandwidth(engine, engine.bw_orig / rf)
    assert stopband_edge(f.taps, 50) == pytest.approx(base / rf, rel=0.10)


def test_unit_factor_returns_prototype(engine):
    assert np.array_equal(variable_bandwidth(engine, engine.bw_orig).taps, engine.prototype.taps)


@pytest.mark.parametrize("bw", [0.0, -0.1, 0.15])
def test_out_of_range(engine, bw):
    with pytest.raises(OutOfRange):
        variable_bandwidth(engine, bw)


@settings(max_examples=PROPERTY_CASES)
@given(st.floats(1.0, 3.0))
def test_dc_gain_unity(engine, rf):
    f = variable_bandwidth(engine, engine.bw_orig / rf)
    assert abs(f.taps.sum() - 1) <= 1e-6


def test_ladder_strictly_increasing(engine):
    edges = [edge_6db(engine.lowpass_for_edge(k * BAND / 128).taps) for k in range(1, 65)]
    assert all(b > a for a, b in zip(edges, edges[1:]))


def test_edge_measure_matches_oracle(engine):
    f = variable_bandwidth(engine, 0.05)
    assert edge_6db(f.taps) == pytest.approx(edge_oracle(f.taps), abs=2e-5)


class TestHighpass:
    def test_sign_alternation(self):
        assert to_highpass(FirFilter([0.5, 0.5])).taps.tolist() == [0.5, -0.5]

    def test_involution(self, prototype):
        assert np.array_equal(to_highpass(to_highpass(prototype)).taps, prototype.taps)

    def test_mirrored_response(self, prototype):
        w, lp = ss.freqz(prototype.taps, worN=2048)
        _, hp = ss.freqz(to_highpass(prototype).taps, worN=np.pi - w)
        np.testing.assert_allclose(np.abs(hp), np.abs(lp), atol=1e-9)

    def test_stopband_moves_to_low_frequencies(self, prototype):
        w, h = ss.freqz(to_highpass(prototype).taps, worN=np.linspace(0, np.pi, 8192))
        low = np.abs(h[w / np.pi <= 1 - prototype.spec.stopband_edge])
        assert -20 * np.log10(low.max()) >= prototype.spec.stopband_atten_db


class TestBank:
    def test_three_bands_geometry(self, engine):
        bank = modulated_bank(engine, 3, (0.0, 0.8))
        assert [b.center for b in bank] == pytest.approx([BAND / 2, 1.5 * BAND, 2.5 * BAND])
        assert all(b.bandwidth == pytest.approx(BAND) for b in bank)
        assert all(np.iscomplexobj(b.taps) and b.side is Side.BAND_PASS for b in bank)

    def test_single_band_mid_span(self, engine):
        (b,) = modulated_bank(engine, 1, (0.0, 0.2))
        assert b.center == pytest.approx(0.1)

    def test_six_bands_reuse_prototype(self, engine):
        bank = modulated_bank(engine, 6, (0.0, 0.8))
        assert len(bank) == 6 and all(b.bandwidth == pytest.approx(0.8 / 6) for b in bank)

    def test_too_wide(self, engine):
        with pytest.raises(OutOfRange):
            modulated_bank(engine, 3, (0.0, 1.0))

    @pytest.mark.parametrize("n", [3, 6])
    def test_crossover_near_6db(self, engine, n):
        bank = modulated_bank(engine, n, (0.0, 0.8))
        for a, b in zip(bank, bank[1:]):
            edge = a.high
            for bf in (a, b):
                _, h = ss.freqz(bf.taps, worN=[np.pi * edge, np.pi * bf.center])
                rel = 20 * np.log10(abs(h[0]) / abs(h[1]))
                assert -8 <= rel <= -4

    def test_no_blind_frequencies(self, engine):
        bank = modulated_bank(engine, 3, (0.0, 0.8))
        w = np.linspace(0.005, 0.795, 4000)
        total = sum(np.abs(ss.freqz(b.taps, worN=np.pi * w)[1]) ** 2 for b in bank)
        assert 10 * np.log10(total.min() / np.median(total)) > -6

    def test_edge_anchored_filters(self, engine):
        lo, bw = 0.1, 0.05
        for bf, band in ((from_low(engine, lo, bw), (lo, lo + bw)),
                         (from_high(engine, lo + bw, bw), (lo, lo + bw))):
            w, mag = response(bf.taps)
            peak = mag[np.argmin(np.abs(w - sum(band) / 2))]
            for edge in band:
                rel = 20 * np.log10(mag[np.argmin(np.abs(w - edge))] / peak)
                assert rel == pytest.approx(-6, abs=0.5)


def test_band_filter_validation():
    with pytest.raises(ConfigError):
        BandFilter(np.ones(3, complex), 0.5, 0.1, Side.FROM_LOW)
    with pytest.raises(ConfigError):
        BandFilter(np.ones(3), 1.5, 0.1, Side.BAND_PASS)


def test_engine_rejects_bad_prototype():
    spec = FilterSpec(0.14, 0.141, 0.03, 50.0)
    with pytest.raises(ConfigError):
        CvbwEngine(FirFilter([0.25, 0.5, 0.25], spec=spec))
