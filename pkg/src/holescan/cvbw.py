"""Continuously variable bandwidth filtering from one fixed prototype.

Driving an impulse through SRC -> fixed filter -> SRC is, as a transfer
function, the prototype impulse response resampled on a finer time grid.
Here that is done in one step: the prototype taps are resampled by the
Pascal SRC with ``srcf = bw_des / bw_orig`` (a time stretch by the
reduction factor RF = bw_orig / bw_des) and renormalised to unit DC gain.

Frequencies are fractions of pi throughout.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, OutOfRange
from .fir_design import FirFilter, measure_response
from .pascal_fd import DEFAULT_ORDER
from .resampler import SrcConfig, resample

SIX_DB = 10 ** (-6 / 20)


class Side(enum.Enum):
    FROM_LOW = "FromLow"
    FROM_HIGH = "FromHigh"
    BAND_PASS = "BandPass"


@dataclass(eq=False)
class BandFilter:
    taps: np.ndarray
    center: float
    bandwidth: float
    side: Side

    def __post_init__(self):
        if not 0 <= self.center <= 1:
            raise ConfigError(f"band centre must lie in [0, 1] (fraction of pi), got {self.center}")
        if not self.bandwidth > 0:
            raise ConfigError(f"bandwidth must be positive, got {self.bandwidth}")
        if np.iscomplexobj(self.taps) and self.side is not Side.BAND_PASS:
            raise ConfigError("complex taps are only allowed for band-pass filters")

    @property
    def low(self) -> float:
        return self.center - self.bandwidth / 2

    @property
    def high(self) -> float:
        return self.center + self.bandwidth / 2

    @property
    def noise_gain(self) -> float:
        """Sum of |taps|^2, the white-noise power gain."""
        return float(np.sum(np.abs(self.taps) ** 2))


def _grid_size(ntaps: int, n_min: int = 8192) -> int:
    return 1 << max(int(math.ceil(math.log2(max(n_min, 4 * ntaps)))), 13)


def response(taps, n_fft: int | None = None):
    """Frequency grid (fractions of pi, [-1, 1)) and |H| for real or complex taps."""
    taps = np.asarray(taps)
    n_fft = n_fft or _grid_size(taps.size)
    h = np.fft.fft(taps, n_fft) if taps.size <= n_fft else _wrapped_fft(taps, n_fft)
    w = np.fft.fftfreq(n_fft) * 2
    order = np.argsort(w)
    return w[order], np.abs(h[order])


def _wrapped_fft(taps, n_fft):
    wrapped = np.zeros(n_fft, dtype=taps.dtype)
    np.add.at(wrapped, np.arange(taps.size) % n_fft, taps)
    return np.fft.fft(wrapped)


def edge_6db(taps) -> float:
    """Frequency (fraction of pi) where a low-pass response first falls 6 dB below DC."""
    taps = np.asarray(taps, dtype=float)
    n = _grid_size(taps.size)
    mag = np.abs(np.fft.rfft(taps, n))
    w = np.linspace(0, 1, mag.size)
    level = SIX_DB * mag[0]
    below = np.nonzero(mag < level)[0]
    if below.size == 0:
        return 1.0
    k = below[0]
    # linear interpolation between the bracketing grid points
    m0, m1 = mag[k - 1], mag[k]
    return float(w[k - 1] + (m0 - level) / (m0 - m1) * (w[k] - w[k - 1]))


def stopband_edge(taps, atten_db: float) -> float:
    """Lowest frequency beyond which |H| stays ``atten_db`` below DC."""
    taps = np.asarray(taps, dtype=float)
    n = _grid_size(taps.size)
    mag = np.abs(np.fft.rfft(taps, n))
    w = np.linspace(0, 1, mag.size)
    above = np.nonzero(mag > mag[0] * 10 ** (-atten_db / 20))[0]
    return float(w[min(above[-1] + 1, w.size - 1)])


class CvbwEngine:
    """Variable-bandwidth filter source built around one fixed low-pass prototype.

    The prototype is checked against its own specification and normalised
    to unit DC gain once, at construction.
    """

    def __init__(self, prototype: FirFilter, pascal_n: int = DEFAULT_ORDER, verify: bool = True):
        if prototype.spec is None:
            raise ConfigError("prototype needs a FilterSpec to define bw_orig")
        if verify and not measure_response(prototype.taps, prototype.spec).meets:
            raise ConfigError("prototype does not meet its specification")
        SrcConfig(1.0, pascal_n)  # validates pascal_n
        taps = prototype.taps / np.sum(prototype.taps)
        self.prototype = FirFilter(taps, spec=prototype.spec, linear_phase=prototype.linear_phase,
                                   multiplier_count=prototype.multiplier_count, path=prototype.path,
                                   meta=dict(prototype.meta))
        self.bw_orig = prototype.spec.passband_edge
        self.pascal_n = pascal_n
        self.proto_edge_6db = edge_6db(taps)
        self._cache = functools.lru_cache(maxsize=256)(self._design)

    def _design(self, bw_des: float) -> FirFilter:
        if bw_des == self.bw_orig:
            return self.prototype
        y, _ = resample(self.prototype.taps, SrcConfig(bw_des / self.bw_orig, self.pascal_n))
        y = y / np.sum(y)
        return FirFilter(y, spec=None, linear_phase=False, path="cvbw",
                         meta={"bw_des": bw_des, "rf": self.bw_orig / bw_des})

    def variable_bandwidth(self, bw_des: float) -> FirFilter:
        """Low-pass of bandwidth ``bw_des`` (fraction of pi), 0 < bw_des <= bw_orig."""
        if not (0 < bw_des <= self.bw_orig):
            raise OutOfRange(f"bw_des must lie in (0, {self.bw_orig}], got {bw_des!r}")
        return self._cache(float(bw_des))

    def lowpass_for_edge(self, edge: float) -> FirFilter:
        """Low-pass whose -6 dB point sits at ``edge`` (fraction of pi)."""
        bw = edge * self.bw_orig / self.proto_edge_6db
        if not (0 < bw <= self.bw_orig):
            raise OutOfRange(f"half-bandwidth {edge!r} is outside (0, {self.proto_edge_6db:.6g}]")
        return self.variable_bandwidth(bw)


def variable_bandwidth(engine: CvbwEngine, bw_des: float) -> FirFilter:
    return engine.variable_bandwidth(bw_des)


def to_highpass(f: FirFilter) -> FirFilter:
    """Mirror a low-pass about pi/2: h[n] (-1)^n, so H_hp(w) = H(pi - w)."""
    sign = np.where(np.arange(f.taps.size) % 2 == 0, 1.0, -1.0)
    return FirFilter(f.taps * sign, spec=f.spec, linear_phase=f.linear_phase,
                     multiplier_count=f.multiplier_count, path=f.path, meta=dict(f.meta))


def shift(taps, omega: float) -> np.ndarray:
    """Move a response up by ``omega`` (fraction of pi) with a complex carrier.

    The carrier phase is referenced to the middle tap.
    """
    taps = np.asarray(taps)
    n = np.arange(taps.size) - (taps.size - 1) / 2
    return taps * np.exp(1j * math.pi * omega * n)


def band_filter(engine: CvbwEngine, low: float, high: float) -> BandFilter:
    """Complex band-pass with -6 dB points at ``low`` and ``high``."""
    half = (high - low) / 2
    lp = engine.lowpass_for_edge(half)
    return BandFilter(shift(lp.taps, low + half), low + half, high - low, Side.BAND_PASS)


def from_low(engine: CvbwEngine, band_low: float, bw: float) -> BandFilter:
    """Band-pass covering [band_low, band_low + bw], anchored at the low edge."""
    half = bw / 2
    lp = engine.lowpass_for_edge(half)
    return BandFilter(shift(lp.taps, band_low + half), band_low + half, bw, Side.BAND_PASS)


def from_high(engine: CvbwEngine, band_high: float, bw: float) -> BandFilter:
    """Band-pass covering [band_high - bw, band_high] via low-pass to high-pass translation."""
    half = bw / 2
    hp = to_highpass(engine.lowpass_for_edge(half))
    center = band_high - half
    return BandFilter(shift(hp.taps, center - 1.0), center, bw, Side.BAND_PASS)


def modulated_bank(engine: CvbwEngine, n_bands: int, span: tuple[float, float]) -> list:
    """``n_bands`` equal complex band-pass filters tiling ``span`` (fractions of pi).

    Every band shares one low-pass of half the band width, shifted to the
    band centre, so adjacent bands cross near -6 dB.
    """
    lo, hi = span
    if int(n_bands) != n_bands or n_bands < 1:
        raise ConfigError(f"n_bands must be an integer >= 1, got {n_bands!r}")
    if not hi > lo:
        raise ConfigError(f"span must satisfy hi > lo, got {span!r}")
    width = (hi - lo) / n_bands
    if width / 2 > engine.proto_edge_6db:
        raise OutOfRange(f"half band width {width / 2:.6g} exceeds the prototype bandwidth "
                         f"{engine.bw_orig}")
    lp = engine.lowpass_for_edge(width / 2)
    bank = []
    for k in range(n_bands):
        center = lo + (k + 0.5) * width
        bank.append(BandFilter(shift(lp.taps, center), center, width, Side.BAND_PASS))
    return bank
