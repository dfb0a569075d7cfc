"""Fixed low-pass prototype design: direct equiripple and frequency-response masking.

All band edges are expressed as fractions of pi (so 0.14 means 0.14*pi
rad/sample).  Passband ripple is peak-to-peak in dB, stopband attenuation
is relative to unit gain.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigError, InfeasibleSubSpec, NonConvergence,
                     OrderCapExceeded, ParseError)
from .remez import herrmann_length, kaiser_order, remez_lowpass

log = logging.getLogger(__name__)

VERIFY_GRID = 8192
DEFAULT_ORDER_CAP = 4000
RIPPLE_MARGIN = 0.2


def ripple_to_delta(ripple_db: float) -> float:
    g = 10 ** (ripple_db / 20)
    return (g - 1) / (g + 1)


def delta_to_ripple(delta: float) -> float:
    return 20 * math.log10((1 + delta) / (1 - delta))


def atten_to_delta(atten_db: float) -> float:
    return 10 ** (-atten_db / 20)


@dataclass(frozen=True)
class FilterSpec:
    passband_edge: float
    stopband_edge: float
    passband_ripple_db: float
    stopband_atten_db: float

    def __post_init__(self):
        if not 0 < self.passband_edge < self.stopband_edge < 1:
            raise ConfigError("need 0 < passband_edge < stopband_edge < 1 (fractions of pi), got "
                              f"{self.passband_edge}, {self.stopband_edge}")
        if not self.passband_ripple_db > 0:
            raise ConfigError(f"passband_ripple_db must be > 0, got {self.passband_ripple_db}")
        if not self.stopband_atten_db > 0:
            raise ConfigError(f"stopband_atten_db must be > 0, got {self.stopband_atten_db}")

    @property
    def dp(self) -> float:
        return ripple_to_delta(self.passband_ripple_db)

    @property
    def ds(self) -> float:
        return atten_to_delta(self.stopband_atten_db)

    @classmethod
    def from_deltas(cls, passband_edge, stopband_edge, dp, ds):
        return cls(passband_edge, stopband_edge, delta_to_ripple(dp), -20 * math.log10(ds))

    def kaiser_order(self) -> float:
        return kaiser_order(self.passband_edge * math.pi, self.stopband_edge * math.pi,
                            self.dp, self.ds)


# Fixed-filter specification used throughout the sensing pipeline.
PROTOTYPE_SPEC = FilterSpec(0.14, 0.141, 0.03, 50.0)


def _symmetric(taps: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.max(np.abs(taps - taps[::-1])) <= tol)


@dataclass(eq=False)
class FirFilter:
    """Real FIR impulse response plus design metadata.

    ``multiplier_count`` defaults to the number of distinct coefficients
    (``ceil(len/2)`` when symmetric).  Structured designs such as FRM pass
    the sum over their sub-filters instead.
    """
    taps: np.ndarray
    spec: FilterSpec | None = None
    linear_phase: bool = False
    multiplier_count: int | None = None
    path: str = "direct"
    parts: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.taps = np.asarray(self.taps, dtype=float)
        if self.taps.ndim != 1 or self.taps.size == 0:
            raise ConfigError("FIR taps must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(self.taps)):
            raise ConfigError("FIR taps must be finite")
        if self.linear_phase and not _symmetric(self.taps):
            raise ConfigError("taps flagged linear-phase are not symmetric")
        if self.multiplier_count is None:
            n = self.taps.size
            self.multiplier_count = (n + 1) // 2 if _symmetric(self.taps) else n

    def __len__(self):
        return self.taps.size


@dataclass
class ResponseReport:
    passband_ripple_db: float
    stopband_atten_db: float
    transition_width: float
    dc_gain: float
    meets: bool
    grid_points: int


def magnitude_on_grid(taps, n_grid: int = VERIFY_GRID):
    """|H| on ``n_grid`` equally spaced points covering [0, pi] inclusive."""
    taps = np.asarray(taps)
    nfft = 2 * (n_grid - 1)
    wrapped = np.zeros(nfft, dtype=taps.dtype)
    np.add.at(wrapped, np.arange(taps.size) % nfft, taps)
    mag = np.abs(np.fft.fft(wrapped)[:n_grid])
    return np.linspace(0.0, 1.0, n_grid), mag


def measure_response(taps, spec: FilterSpec, n_grid: int = VERIFY_GRID) -> ResponseReport:
    """Measure a low-pass response against ``spec`` on an ``n_grid`` point grid."""
    w, mag = magnitude_on_grid(taps, n_grid)
    pb = mag[w <= spec.passband_edge]
    sb = mag[w >= spec.stopband_edge]
    ripple = 20 * math.log10(pb.max() / pb.min()) if pb.min() > 0 else math.inf
    atten = -20 * math.log10(sb.max()) if sb.max() > 0 else math.inf

    low_ok = mag >= 1 - spec.dp
    first_bad = np.argmin(low_ok) if not low_ok.all() else mag.size
    pass_end = w[max(first_bad - 1, 0)]
    above = np.nonzero(mag > spec.ds)[0]
    stop_start = w[min(above[-1] + 1, mag.size - 1)] if above.size else 0.0
    meets = ripple <= spec.passband_ripple_db and atten >= spec.stopband_atten_db
    return ResponseReport(ripple, atten, max(stop_start - pass_end, 0.0),
                          float(np.sum(taps)), meets, n_grid)


def _check_grid(numtaps: int) -> int:
    return max(VERIFY_GRID, 8 * numtaps)


def design_equiripple(spec: FilterSpec, order_cap: int = DEFAULT_ORDER_CAP,
                      max_tries: int = 25, search_down: bool | None = None) -> FirFilter:
    """Parks-McClellan low-pass meeting ``spec`` with (near) minimum odd length.

    Starts from the Herrmann length estimate and steps the length until the
    measured response meets the specification.

    Raises
    ------
    OrderCapExceeded
        Estimated or required order is above ``order_cap``.
    NonConvergence
        The exchange failed or no length up to the cap met the spec.
    """
    wp, ws = spec.passband_edge * math.pi, spec.stopband_edge * math.pi
    dp, ds = spec.dp, spec.ds
    n = herrmann_length(wp, ws, dp, ds)
    if n - 1 > order_cap:
        raise OrderCapExceeded(f"estimated order {n - 1} exceeds cap {order_cap}")
    if search_down is None:
        search_down = n <= 1001
    # log10 of the ripple falls roughly linearly with length (Kaiser's rule)
    slope = 14.6 * (ws - wp) / (2 * math.pi) / 20

    def attempt(length, init):
        taps, info = remez_lowpass(length, wp, ws, stop_weight=dp / ds, init_freqs=init)
        return taps, info, measure_response(taps, spec, _check_grid(length))

    # step up from the estimate until the measured response meets the spec
    best = None
    failed = set()
    init = None
    for _ in range(max_tries):
        taps, info, rep = attempt(n, init)
        init = info["ext_freqs"]
        if rep.meets:
            best = (taps, rep, init)
            break
        failed.add(n)
        excess = max(ripple_to_delta(rep.passband_ripple_db) / dp,
                     atten_to_delta(rep.stopband_atten_db) / ds)
        step = max(2, int(math.ceil(1.3 * math.log10(max(excess, 1.0 + 1e-9)) / slope)))
        n += step + (step % 2)
        if n - 1 > order_cap:
            raise OrderCapExceeded(f"order {n - 1} needed to meet spec exceeds cap {order_cap}")
    if best is None:
        raise NonConvergence(f"no equiripple design met the spec within {max_tries} attempts")
    # then walk down while shorter designs still pass
    while search_down and n > 3 and n - 2 not in failed:
        taps, info, rep = attempt(n - 2, best[2])
        if not rep.meets:
            break
        n -= 2
        best = (taps, rep, info["ext_freqs"])
    taps, rep, _ = best
    return FirFilter(taps, spec=spec, linear_phase=True, path="direct",
                     meta={"numtaps": taps.size, "measured": rep})


# --------------------------------------------------------------------------
# frequency-response masking
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FrmConfig:
    m1: int = 8
    m2: int = 4
    masking_spec_margin: float = 0.05

    def __post_init__(self):
        if int(self.m1) != self.m1 or self.m1 < 2:
            raise ConfigError(f"m1 must be an integer >= 2, got {self.m1!r}")
        if int(self.m2) != self.m2 or self.m2 < 1:
            raise ConfigError(f"m2 must be an integer >= 1, got {self.m2!r}")
        if not 0 <= self.masking_spec_margin < 1:
            raise ConfigError("masking_spec_margin must lie in [0, 1)")


@dataclass(frozen=True)
class MaskEdges:
    """Edges of one masking filter; ``kind`` is 'filter', 'delay' or 'zero'."""
    kind: str
    passband_edge: float = 0.0
    stopband_edge: float = 0.0


@dataclass(frozen=True)
class FrmStage:
    factor: int
    case: str
    model_edges: tuple
    mask_a: MaskEdges
    mask_c: MaskEdges


def _mask(pass_edge, stop_edge, margin):
    if pass_edge <= 0:
        return MaskEdges("zero")
    if stop_edge >= 1:
        return MaskEdges("delay")
    tw = stop_edge - pass_edge
    if tw <= 0:
        raise InfeasibleSubSpec(f"masking filter transition collapsed ({pass_edge:.6g} >= {stop_edge:.6g})")
    return MaskEdges("filter", pass_edge + margin * tw / 2, stop_edge - margin * tw / 2)


def frm_stage(wp: float, ws: float, factor: int, margin: float = 0.0) -> FrmStage:
    """Band edges for one FRM level (edges as fractions of pi).

    The model filter runs at ``factor`` times the rate; case A places the
    overall transition on a falling edge of a model-filter image, case B on
    a rising edge of the complementary branch.  Case A is used when valid.
    """
    eps = 1e-12
    k = math.floor(wp * factor / 2)
    theta, phi = wp * factor - 2 * k, ws * factor - 2 * k
    if theta > eps and phi < 1 - eps:
        mask_a = _mask(wp, (2 * k + 2 - phi) / factor, margin)
        mask_c = _mask((2 * k - theta) / factor, ws, margin) if k > 0 else MaskEdges("zero")
        return FrmStage(factor, "A", (theta, phi), mask_a, mask_c)
    k = math.ceil(ws * factor / 2)
    theta, phi = 2 * k - ws * factor, 2 * k - wp * factor
    if k >= 1 and theta > eps and phi < 1 - eps:
        mask_a = _mask((2 * k - 2 + phi) / factor, ws, margin)
        mask_c = _mask(wp, (2 * k + theta) / factor, margin)
        return FrmStage(factor, "B", (theta, phi), mask_a, mask_c)
    raise InfeasibleSubSpec(
        f"factor {factor} cannot place transition [{wp}, {ws}] inside one model-filter image "
        f"(scaled transition {factor * (ws - wp):.4g} of the available band)")


def upsample_taps(taps, factor: int) -> np.ndarray:
    taps = np.asarray(taps, dtype=float)
    out = np.zeros((taps.size - 1) * factor + 1)
    out[::factor] = taps
    return out


def _center_pad(taps, length):
    pad = (length - taps.size) // 2
    return np.pad(taps, (pad, pad))


def frm_compose(model, mask_a, mask_c, factor: int) -> np.ndarray:
    """Impulse response of model(z^M) mask_a(z) + [z^-D - model(z^M)] mask_c(z).

    ``model`` must have odd length; masks are centre-padded to a common
    odd length so both branches share one group delay.
    """
    model = np.asarray(model, dtype=float)
    mask_a = np.asarray(mask_a, dtype=float)
    mask_c = np.asarray(mask_c, dtype=float)
    if model.size % 2 == 0 or mask_a.size % 2 == 0 or mask_c.size % 2 == 0:
        raise ConfigError("FRM sub-filters must have odd length")
    comp = -model.copy()
    comp[model.size // 2] += 1.0
    length = max(mask_a.size, mask_c.size)
    up_model = upsample_taps(model, factor)
    up_comp = upsample_taps(comp, factor)
    return (np.convolve(up_model, _center_pad(mask_a, length))
            + np.convolve(up_comp, _center_pad(mask_c, length)))


def _sub_design(edges, dp, ds):
    spec = FilterSpec.from_deltas(edges[0], edges[1], dp, ds)
    return design_equiripple(spec, order_cap=20000)


def _mask_taps(edges: MaskEdges, dp, ds):
    if edges.kind == "zero":
        return np.zeros(1), 0
    if edges.kind == "delay":
        return np.ones(1), 0
    f = _sub_design((edges.passband_edge, edges.stopband_edge), dp, ds)
    return f.taps, f.multiplier_count


def frm_stages(spec: FilterSpec, cfg: FrmConfig) -> list:
    outer = frm_stage(spec.passband_edge, spec.stopband_edge, cfg.m1, cfg.masking_spec_margin)
    stages = [outer]
    if cfg.m2 > 1:
        stages.append(frm_stage(*outer.model_edges, cfg.m2, cfg.masking_spec_margin))
    return stages


def _budget(spec: FilterSpec, n_levels: int, tighten: float):
    dp_i = ripple_to_delta(spec.passband_ripple_db * (1 - RIPPLE_MARGIN) / n_levels) * tighten
    ds_i = spec.ds * (1 - RIPPLE_MARGIN) / n_levels * tighten
    return dp_i, ds_i


def design_frm_two_stage(spec: FilterSpec, cfg: FrmConfig, attempts: int = 5) -> FirFilter:
    """Two-stage FRM low-pass (single-stage when ``cfg.m2 == 1``).

    The innermost model filter is upsampled by ``m1*m2``; each level adds a
    pair of masking filters.  Sub-filter ripples come from an equal dB split
    with a 20% margin; if the composite misses the spec the budget is
    tightened and the design repeated.
    """
    stages = frm_stages(spec, cfg)
    n_levels = len(stages) + 1
    last_rep = None
    for attempt in range(attempts):
        dp_i, ds_i = _budget(spec, n_levels, 0.6 ** attempt)
        tight = min(dp_i, ds_i)
        parts = {}
        mults = 0
        model = _sub_design(stages[-1].model_edges, tight, tight)
        parts["model"] = model.taps
        mults += model.multiplier_count
        composite = model.taps
        for level, stage in reversed(list(enumerate(stages))):
            outermost = level == 0
            a, ma = _mask_taps(stage.mask_a, dp_i if outermost else tight, ds_i if outermost else tight)
            c, mc = _mask_taps(stage.mask_c, dp_i if outermost else tight, ds_i if outermost else tight)
            parts[f"mask_a{level + 1}"] = a
            parts[f"mask_c{level + 1}"] = c
            mults += ma + mc
            composite = frm_compose(composite, a, c, stage.factor)
        composite = 0.5 * (composite + composite[::-1])
        rep = measure_response(composite, spec, _check_grid(composite.size))
        last_rep = rep
        if rep.meets:
            path = "frm2" if cfg.m2 > 1 else "frm1"
            return FirFilter(composite, spec=spec, linear_phase=True, multiplier_count=mults,
                             path=path, parts=parts,
                             meta={"m1": cfg.m1, "m2": cfg.m2, "attempts": attempt + 1,
                                   "cases": [s.case for s in stages], "measured": rep})
        log.debug("FRM attempt %d missed spec: %s", attempt + 1, rep)
    raise NonConvergence(f"FRM composite missed the spec after {attempts} budget tightenings "
                         f"(last: ripple {last_rep.passband_ripple_db:.4f} dB, "
                         f"atten {last_rep.stopband_atten_db:.2f} dB)")


def estimate_frm_multipliers(spec: FilterSpec, cfg: FrmConfig) -> int:
    """Multiplier estimate from Herrmann lengths, used to rank FRM factors."""
    stages = frm_stages(spec, cfg)
    dp_i, ds_i = _budget(spec, len(stages) + 1, 1.0)
    tight = min(dp_i, ds_i)

    def count(edges, dp, ds):
        n = herrmann_length(edges[0] * math.pi, edges[1] * math.pi, dp, ds)
        return (n + 1) // 2

    total = count(stages[-1].model_edges, tight, tight)
    for level, stage in enumerate(stages):
        dp, ds = (dp_i, ds_i) if level == 0 else (tight, tight)
        for mask in (stage.mask_a, stage.mask_c):
            if mask.kind == "filter":
                total += count((mask.passband_edge, mask.stopband_edge), dp, ds)
    return total


def best_frm_config(spec: FilterSpec, m1_range=range(4, 17), m2_range=range(1, 9)) -> FrmConfig:
    """Scan interpolation factors for the lowest estimated multiplier count."""
    best = None
    for m1 in m1_range:
        for m2 in m2_range:
            cfg = FrmConfig(m1, m2)
            try:
                est = estimate_frm_multipliers(spec, cfg)
            except InfeasibleSubSpec:
                continue
            key = (est, m1 * m2)
            if best is None or key < best[0]:
                best = (key, cfg)
    if best is None:
        raise InfeasibleSubSpec("no feasible FRM factors in the scanned range")
    return best[1]


@functools.lru_cache(maxsize=8)
def design_prototype(spec: FilterSpec = PROTOTYPE_SPEC, cfg: FrmConfig | None = None,
                     order_cap: int = 20000) -> FirFilter:
    """Fixed prototype with fallback: two-stage FRM, then single-stage, then direct.

    The returned filter's ``path`` records which route produced it.
    """
    if cfg is None:
        cfg = best_frm_config(spec)
    try:
        return design_frm_two_stage(spec, cfg)
    except (InfeasibleSubSpec, NonConvergence) as exc:
        log.warning("two-stage FRM failed (%s); trying single stage", exc)
    try:
        return design_frm_two_stage(spec, FrmConfig(cfg.m1, 1, cfg.masking_spec_margin))
    except (InfeasibleSubSpec, NonConvergence) as exc:
        log.warning("single-stage FRM failed (%s); designing directly", exc)
    return design_equiripple(spec, order_cap=order_cap)


# --------------------------------------------------------------------------
# coefficient files
# --------------------------------------------------------------------------

def save_taps(filt: FirFilter, path) -> None:
    """Write ``# fir v1 ntaps=<n> ...`` then one coefficient per line (repr, exact round trip)."""
    if isinstance(filt, FirFilter):
        taps = filt.taps
        header = f"# fir v1 ntaps={taps.size} multipliers={filt.multiplier_count} path={filt.path}"
    else:
        taps = np.asarray(filt, dtype=float)
        header = f"# fir v1 ntaps={taps.size}"
    lines = [header]
    lines += [repr(float(t)) for t in taps]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_taps(path) -> FirFilter:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not any(ln.strip() for ln in lines):
        raise ParseError("empty coefficient file", line=1)
    header = lines[0].strip()
    if not header.startswith("# fir v1"):
        raise ParseError(f"expected '# fir v1 ntaps=<n>' header, got {header!r}", line=1)
    declared = mults = None
    path_name = "direct"
    # optional key=value tokens after ntaps carry structured-design metadata
    for part in header.split()[3:]:
        key, _, val = part.partition("=")
        if key in ("ntaps", "multipliers"):
            try:
                num = int(val)
            except ValueError:
                raise ParseError(f"bad {key} value {val!r}", line=1, token=val) from None
            if key == "ntaps":
                declared = num
            else:
                mults = num
        elif key == "path":
            path_name = val
    taps = []
    for lineno, raw in enumerate(lines[1:], start=2):
        tok = raw.strip()
        if not tok:
            continue
        try:
            val = float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r}", line=lineno, token=tok) from None
        if not math.isfinite(val):
            raise ParseError(f"non-finite coefficient {tok!r}", line=lineno, token=tok)
        taps.append(val)
    if not taps:
        raise ParseError("no coefficients after header", line=len(lines))
    if declared is not None and declared != len(taps):
        raise ParseError(f"header declares {declared} taps, found {len(taps)}", line=1)
    return FirFilter(np.array(taps), multiplier_count=mults, path=path_name)
