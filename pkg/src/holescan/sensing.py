"""Coarse-then-fine spectrum hole detection.

Coarse sensing tests every band of a modulated filter bank in parallel.
Each occupied band is then fine-sensed from both edges: a band-pass filter
anchored at one edge has its bandwidth bisected until the start (or end)
of the occupied region is pinned to within the requested resolution.

Frequency mapping: a user at f MHz sits at normalised frequency
2 (f - span_lo) / fs (fraction of pi) in the complex baseband signal, so
the span occupies [0, 2 (hi - lo) / fs].
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from . import __version__
from .complexity import complexity_report
from .cvbw import BandFilter, CvbwEngine, from_high, from_low, modulated_bank
from .detector import (DetectorParams, NoiseModel, SignalModel, decide, energy,
                       threshold_adaptive)
from .errors import ConfigError, InconsistentBand
from .fir_design import design_prototype
from .signals import SignalSource, UserSignal

SCHEMA_VERSION = 1
LADDER_STEPS = 64


@dataclass(frozen=True)
class SensingScenario:
    """Experiment frame.  All user-facing frequencies are MHz.

    ``resolution_mhz=None`` means band width / 64 for whatever band count
    is in use.  ``design_snr_db`` is the SNR assumed by the adaptive
    threshold; ``dense_factor`` and ``max_escalations`` control band
    doubling when a band carries much more energy than its threshold.
    """
    span_mhz: tuple
    sample_rate_hz: float
    n_coarse_bands: int
    users: tuple = ()
    noise: NoiseModel = NoiseModel()
    params: DetectorParams = DetectorParams(ns=20000, alpha=0.5)
    resolution_mhz: float | None = None
    seed: int = 0
    design_snr_db: float = 0.0
    dense_factor: float = 4.0
    max_escalations: int = 1
    add_noise: bool = True

    def __post_init__(self):
        lo, hi = self.span_mhz
        object.__setattr__(self, "span_mhz", (float(lo), float(hi)))
        object.__setattr__(self, "users", tuple(self.users))
        if not hi > lo:
            raise ConfigError(f"span_mhz: need hi > lo, got {self.span_mhz}")
        if not self.sample_rate_hz > 0:
            raise ConfigError(f"sample_rate_hz must be positive, got {self.sample_rate_hz!r}")
        if 2 * (hi - lo) * 1e6 / self.sample_rate_hz > 1 + 1e-12:
            raise ConfigError("sample_rate_hz must be at least twice the span width")
        if int(self.n_coarse_bands) != self.n_coarse_bands or self.n_coarse_bands < 1:
            raise ConfigError(f"n_coarse_bands must be an integer >= 1, got {self.n_coarse_bands!r}")
        if self.resolution_mhz is not None:
            if not 0 < self.resolution_mhz <= self.band_width_mhz() / 2:
                raise ConfigError("resolution_mhz must be positive and at most half a band width")
        for k, u in enumerate(self.users):
            if not lo <= u.center_mhz <= hi:
                raise ConfigError(f"users[{k}].center_mhz {u.center_mhz} lies outside span {self.span_mhz}")
        if not self.dense_factor > 1:
            raise ConfigError(f"dense_factor must exceed 1, got {self.dense_factor!r}")
        if int(self.max_escalations) != self.max_escalations or self.max_escalations < 0:
            raise ConfigError("max_escalations must be a non-negative integer")

    # frequency mapping -------------------------------------------------
    def to_norm(self, f_mhz: float) -> float:
        return 2 * (f_mhz - self.span_mhz[0]) * 1e6 / self.sample_rate_hz

    def width_to_norm(self, w_mhz: float) -> float:
        return 2 * w_mhz * 1e6 / self.sample_rate_hz

    def to_mhz(self, w: float) -> float:
        return self.span_mhz[0] + w * self.sample_rate_hz / 2e6

    def width_to_mhz(self, w: float) -> float:
        return w * self.sample_rate_hz / 2e6

    @property
    def span_norm(self) -> tuple[float, float]:
        return 0.0, self.to_norm(self.span_mhz[1])

    def band_width_mhz(self, n_bands: int | None = None) -> float:
        return (self.span_mhz[1] - self.span_mhz[0]) / (n_bands or self.n_coarse_bands)

    def resolution_for(self, n_bands: int) -> float:
        """Fine-sensing resolution in MHz for a given band count."""
        if self.resolution_mhz is not None:
            return self.resolution_mhz
        return self.band_width_mhz(n_bands) / LADDER_STEPS

    def source(self) -> SignalSource:
        offsets = [self.to_norm(u.center_mhz) for u in self.users]
        return SignalSource(self.users, offsets, self.sample_rate_hz, self.noise.sigma_w2,
                            self.seed, self.add_noise)

    # serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "span_mhz": list(self.span_mhz),
            "sample_rate_hz": self.sample_rate_hz,
            "n_coarse_bands": self.n_coarse_bands,
            "users": [asdict(u) for u in self.users],
            "noise": {"sigma_w2": self.noise.sigma_w2},
            "params": {"ns": self.params.ns, "alpha": self.params.alpha},
            "resolution_mhz": self.resolution_mhz,
            "seed": self.seed,
            "design_snr_db": self.design_snr_db,
            "dense_factor": self.dense_factor,
            "max_escalations": self.max_escalations,
            "add_noise": self.add_noise,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensingScenario":
        if not isinstance(d, dict):
            raise ConfigError("scenario must be a JSON object")
        version = d.get("version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"version: unsupported scenario schema version {version!r}")
        known = {"version", "span_mhz", "sample_rate_hz", "n_coarse_bands", "users", "noise",
                 "params", "resolution_mhz", "seed", "design_snr_db", "dense_factor",
                 "max_escalations", "add_noise"}
        for key in d:
            if key not in known:
                raise ConfigError(f"{key}: unknown scenario field")
        for key in ("span_mhz", "sample_rate_hz", "n_coarse_bands"):
            if key not in d:
                raise ConfigError(f"{key}: required scenario field is missing")
        try:
            users = tuple(UserSignal(**u) for u in d.get("users", []))
        except TypeError as exc:
            raise ConfigError(f"users: {exc}") from None
        kwargs = {}
        for key, conv in (("sample_rate_hz", float), ("n_coarse_bands", int), ("seed", int),
                          ("design_snr_db", float), ("dense_factor", float),
                          ("max_escalations", int), ("add_noise", bool)):
            if key in d:
                try:
                    kwargs[key] = conv(d[key])
                except (TypeError, ValueError):
                    raise ConfigError(f"{key}: cannot interpret {d[key]!r}") from None
        try:
            span = tuple(float(v) for v in d["span_mhz"])
        except (TypeError, ValueError):
            raise ConfigError(f"span_mhz: cannot interpret {d['span_mhz']!r}") from None
        if len(span) != 2:
            raise ConfigError("span_mhz: expected [lo, hi]")
        try:
            noise = NoiseModel(**d.get("noise", {}))
        except TypeError as exc:
            raise ConfigError(f"noise: {exc}") from None
        p = d.get("params", {})
        try:
            params = DetectorParams(ns=p.get("ns", 20000), alpha=p.get("alpha", 0.5))
        except ConfigError as exc:
            raise ConfigError(f"params: {exc}") from None
        res = d.get("resolution_mhz")
        return cls(span_mhz=span, users=users, noise=noise, params=params,
                   resolution_mhz=None if res is None else float(res), **kwargs)

    @classmethod
    def from_json(cls, path) -> "SensingScenario":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario: invalid JSON ({exc})") from None
        return cls.from_dict(data)


@dataclass
class BandReport:
    band_index: int
    center: float
    bandwidth: float
    threshold: float
    energy: float
    occupied: bool

    @property
    def low(self) -> float:
        return round(self.center - self.bandwidth / 2, 9)  # 1 mHz grid hides center +- bw/2 rounding

    @property
    def high(self) -> float:
        return round(self.center + self.bandwidth / 2, 9)


@dataclass
class TraceEntry:
    bandwidth: float
    threshold: float
    energy: float
    occupied: bool


@dataclass
class HoleReport:
    band_index: int
    occupied_range: tuple | None
    holes: list
    resolution_achieved: float
    left_trace: list = field(default_factory=list)
    right_trace: list = field(default_factory=list)
    flags: list = field(default_factory=list)


@dataclass
class EdgeSearch:
    b_lo: float
    b_hi: float | None
    tested: list

    @property
    def consistent(self) -> bool:
        return self.b_hi is not None


def bisect_edge(test, band_bw: float, resolution: float) -> EdgeSearch:
    """Bisect the bandwidth axis for the first occupied bandwidth.

    ``test(b)`` reports occupancy of the sub-band of width ``b`` anchored
    at one band edge.  The full band is tested first; if it is unoccupied
    the search stops with ``b_hi=None``.  Otherwise ``[b_lo, b_hi]``
    brackets the occupied-region edge with b_lo the largest unoccupied and
    b_hi the smallest occupied bandwidth tested.
    """
    if not band_bw > 0 or not resolution > 0:
        raise ConfigError("band width and resolution must be positive")
    tested = []
    full = bool(test(band_bw))
    tested.append((band_bw, full))
    if not full:
        return EdgeSearch(band_bw, None, tested)
    b_lo, b_hi = 0.0, band_bw
    while b_hi - b_lo > resolution * (1 + 1e-9):
        mid = 0.5 * (b_lo + b_hi)
        occ = bool(test(mid))
        tested.append((mid, occ))
        if occ:
            b_hi = mid
        else:
            b_lo = mid
    return EdgeSearch(b_lo, b_hi, tested)


def max_threads() -> int:
    raw = os.environ.get("HOLESCAN_THREADS")
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"HOLESCAN_THREADS: expected a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"HOLESCAN_THREADS: expected a positive integer, got {raw!r}")
    return n


_ENGINE = {}


def default_engine() -> CvbwEngine:
    """Engine around the default prototype, built once per process."""
    if "engine" not in _ENGINE:
        _ENGINE["engine"] = CvbwEngine(design_prototype())
    return _ENGINE["engine"]


class _Detector:
    """Filter-and-measure helper bound to one scenario and signal source."""

    def __init__(self, scenario: SensingScenario, source: SignalSource):
        self.sc = scenario
        self.source = source
        self.gamma = 10 ** (scenario.design_snr_db / 10)

    def threshold(self, bf: BandFilter) -> float:
        noise = NoiseModel(self.sc.noise.sigma_w2 * bf.noise_gain)
        return threshold_adaptive(SignalModel.from_snr(self.gamma, noise), noise, self.sc.params)

    def measure(self, bf: BandFilter) -> tuple[float, float, bool]:
        ns = self.sc.params.ns
        x = self.source.get(bf.taps.size - 1 + ns)
        y = fftconvolve(x, bf.taps, mode="valid")
        e = energy(y)
        lam = self.threshold(bf)
        return lam, e, bool(decide(e, lam))


def coarse_sense(source: SignalSource, scenario: SensingScenario, engine: CvbwEngine,
                 n_bands: int | None = None, threads: int | None = None) -> list:
    """Energy-detect every band of an ``n_bands`` modulated bank."""
    n_bands = n_bands or scenario.n_coarse_bands
    bank = modulated_bank(engine, n_bands, scenario.span_norm)
    det = _Detector(scenario, source)
    # longest prefix first so worker threads only read the cached samples
    source.get(max(bf.taps.size for bf in bank) - 1 + scenario.params.ns)
    with ThreadPoolExecutor(max_workers=threads or max_threads()) as pool:
        results = list(pool.map(det.measure, bank))
    reports = []
    for k, (bf, (lam, e, occ)) in enumerate(zip(bank, results)):
        reports.append(BandReport(k, scenario.to_mhz(bf.center), scenario.width_to_mhz(bf.bandwidth),
                                  lam, e, occ))
    return reports


def fine_sense(source: SignalSource, band: BandReport, scenario: SensingScenario,
               engine: CvbwEngine, resolution_mhz: float | None = None,
               strict: bool = False) -> HoleReport:
    """Localise the occupied region inside ``band`` by bisection from both edges.

    The occupied region starts at ``band.low + b_lo`` of the left search
    and ends at ``band.high - b_lo`` of the right search, so a band that
    tests occupied at every bandwidth is reported as fully occupied.
    Disagreement between the full-band test and the coarse decision is
    flagged ``inconsistent`` (or raised with ``strict=True``).
    """
    if not band.occupied:
        raise ConfigError("fine sensing needs a band that coarse sensing found occupied")
    det = _Detector(scenario, source)
    lo_n = scenario.to_norm(band.low)
    hi_n = scenario.to_norm(band.high)
    bw_n = hi_n - lo_n
    res_mhz = resolution_mhz or scenario.resolution_for(round(
        (scenario.span_mhz[1] - scenario.span_mhz[0]) / band.bandwidth))
    res_n = scenario.width_to_norm(res_mhz)

    def side(make):
        trace = []

        def test(b):
            lam, e, occ = det.measure(make(b))
            trace.append(TraceEntry(scenario.width_to_mhz(b), lam, e, occ))
            return occ
        return bisect_edge(test, bw_n, res_n), trace

    left, left_trace = side(lambda b: from_low(engine, lo_n, b))
    right, right_trace = side(lambda b: from_high(engine, hi_n, b))

    flags = []
    if not (left.consistent and right.consistent):
        if strict:
            raise InconsistentBand(f"band {band.band_index}: full-band fine test found no energy")
        flags.append("inconsistent")
        return HoleReport(band.band_index, None, [(band.low, band.high)], 0.0,
                          left_trace, right_trace, flags)
    occ, holes, extra = partition_band(band.low, band.high, scenario.width_to_mhz(left.b_lo),
                                       scenario.width_to_mhz(right.b_lo), res_mhz)
    flags.extend(extra)
    achieved = scenario.width_to_mhz(max(left.b_hi - left.b_lo, right.b_hi - right.b_lo))
    return HoleReport(band.band_index, occ, holes, achieved, left_trace, right_trace, flags)


def partition_band(low: float, high: float, left_free: float, right_free: float,
                   resolution: float) -> tuple:
    """Split [low, high] into an occupied range and the holes either side.

    ``left_free``/``right_free`` are the widths found unoccupied from each
    edge.  If they overlap the edges are swapped and flagged ``crossing``.
    Returns (occupied_range, holes, flags).
    """
    start, end = low + left_free, high - right_free
    flags = []
    if start >= end:
        flags.append("crossing")
        start, end = max(low, min(start, end)), min(high, max(start, end))
        if end - start < resolution:
            mid = 0.5 * (start + end)
            start = max(low, min(mid - resolution / 2, high - resolution))
            end = min(high, start + resolution)
    holes = []
    if start > low:
        holes.append((low, start))
    if end < high:
        holes.append((end, high))
    return (start, end), holes, flags


def merge_intervals(intervals, tol: float = 1e-9) -> list:
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + tol:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


@dataclass
class ScenarioReport:
    scenario: SensingScenario
    bands: list
    fine: list
    spectrum_holes: list
    metadata: dict

    def to_dict(self, trace: bool = True) -> dict:
        def hole(h: HoleReport):
            d = asdict(h)
            d["occupied_range"] = list(h.occupied_range) if h.occupied_range else None
            d["holes"] = [list(x) for x in h.holes]
            if not trace:
                d.pop("left_trace")
                d.pop("right_trace")
            return d
        return {
            "version": SCHEMA_VERSION,
            "scenario": self.scenario.to_dict(),
            "bands": [asdict(b) for b in self.bands],
            "holes": [hole(h) for h in self.fine],
            "spectrum_holes": [list(x) for x in self.spectrum_holes],
            "metadata": self.metadata,
        }

    @property
    def pattern(self) -> list:
        return [b.occupied for b in self.bands]


def run_scenario(scenario: SensingScenario, engine: CvbwEngine | None = None,
                 threads: int | None = None) -> ScenarioReport:
    """Coarse sensing, optional band doubling, then fine sensing of occupied bands."""
    engine = engine or default_engine()
    threads = threads or max_threads()
    source = scenario.source()
    n_bands = scenario.n_coarse_bands
    bands = coarse_sense(source, scenario, engine, n_bands, threads)
    escalations = 0
    while (escalations < scenario.max_escalations
           and any(b.energy > scenario.dense_factor * b.threshold for b in bands)):
        n_bands *= 2
        bands = coarse_sense(source, scenario, engine, n_bands, threads)
        escalations += 1
    res = scenario.resolution_for(n_bands)
    occupied = [b for b in bands if b.occupied]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        fine = list(pool.map(lambda b: fine_sense(source, b, scenario, engine, res), occupied))
    free = [(b.low, b.high) for b in bands if not b.occupied]
    for h in fine:
        free.extend(h.holes)
    meta = {
        "n_bands": n_bands,
        "escalations": escalations,
        "resolution_mhz": res,
        "prototype_path": engine.prototype.path,
        "prototype_taps": int(engine.prototype.taps.size),
        "complexity": complexity_report(engine.prototype, n_bands).to_dict(),
        "package_version": __version__,
    }
    return ScenarioReport(scenario, bands, fine, merge_intervals(free), meta)
