"""``holescan`` command-line interface.

Exit status: 0 on success, 2 for usage or configuration errors, 1 when a
computation fails (the error class name is printed first).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys

import numpy as np

from . import __version__
from .complexity import complexity_report
from .cvbw import CvbwEngine, modulated_bank
from .detector import DetectorParams, NoiseModel, pe_curve
from .errors import ConfigError, HoleScanError, ParseError
from .fir_design import (PROTOTYPE_SPEC, FilterSpec, FrmConfig, design_equiripple,
                         design_frm_two_stage, design_prototype, load_taps, measure_response,
                         save_taps)
from .pascal_fd import PascalConfig, fd_filter
from .resampler import SrcConfig, resample
from .sensing import SCHEMA_VERSION, SensingScenario, max_threads, run_scenario

log = logging.getLogger("holescan")


# ---------------------------------------------------------------- helpers

def _read_csv(path, field="in") -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            rows = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    except OSError as exc:
        raise ConfigError(f"{field}: cannot read {path!r} ({exc.strerror})") from None
    vals = []
    for k, tok in enumerate(rows, start=1):
        tok = tok.split(",")[0]
        try:
            vals.append(float(tok))
        except ValueError:
            raise ConfigError(f"{field}: non-numeric value {tok!r} on data row {k}") from None
    return np.array(vals)


def _write_csv(path, header, rows) -> None:
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise ConfigError(f"out: directory {d!r} does not exist")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow(header)
        w.writerows(rows)


def _write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2)
    if path in (None, "-"):
        print(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(d):
        raise ConfigError(f"out: directory {d!r} does not exist")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _parse_list(text, field) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{field}: expected comma-separated numbers, got {text!r}") from None


def _parse_range(text, field) -> list:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    if ":" not in text:
        return _parse_list(text, field)
    parts = text.split(":")
    try:
        start, stop, step = (float(p) for p in parts) if len(parts) == 3 else (None,) * 3
    except ValueError:
        start = None
    if start is None or not step > 0 or stop < start:
        raise ConfigError(f"{field}: expected start:stop:step with step > 0, got {text!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def _parse_span(text, field="span-mhz") -> tuple:
    vals = text.split(":")
    try:
        lo, hi = (float(v) for v in vals)
    except ValueError:
        raise ConfigError(f"{field}: expected lo:hi in MHz, got {text!r}") from None
    return lo, hi


def _engine(taps_path, pascal_n) -> CvbwEngine:
    if taps_path:
        filt = load_taps(taps_path)
        filt.spec = PROTOTYPE_SPEC
    else:
        filt = design_prototype()
    return CvbwEngine(filt, pascal_n=pascal_n)


# ------------------------------------------------------------ subcommands

def cmd_design(args) -> None:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"spec: cannot read {args.spec!r} ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"spec: invalid JSON ({exc})") from None
    fields = ("passband_edge", "stopband_edge", "passband_ripple_db", "stopband_atten_db")
    for f in fields:
        if f not in raw:
            raise ConfigError(f"{f}: missing from spec file")
    spec = FilterSpec(*(float(raw[f]) for f in fields))
    if args.direct:
        filt = design_equiripple(spec, order_cap=args.order_cap)
    elif args.frm:
        try:
            m1, m2 = (int(v) for v in args.frm.split(","))
        except ValueError:
            raise ConfigError(f"frm: expected m1,m2, got {args.frm!r}") from None
        filt = design_frm_two_stage(spec, FrmConfig(m1, m2))
    else:
        filt = design_prototype(spec, order_cap=args.order_cap)
    save_taps(filt, args.out)
    rep = measure_response(filt.taps, spec)
    _write_json(None, {"version": SCHEMA_VERSION, "path": filt.path, "ntaps": int(filt.taps.size),
                       "multiplier_count": int(filt.multiplier_count),
                       "passband_ripple_db": rep.passband_ripple_db,
                       "stopband_atten_db": rep.stopband_atten_db, "meets_spec": rep.meets})


def cmd_fd(args) -> None:
    x = _read_csv(args.inp)
    y = fd_filter(x, PascalConfig(args.n, args.f))
    _write_csv(args.out, None, [[repr(float(v))] for v in y])


def cmd_resample(args) -> None:
    x = _read_csv(args.inp)
    y, trace = resample(x, SrcConfig(args.srcf, args.n))
    _write_csv(args.out, None, [[repr(float(v))] for v in y])
    if args.trace:
        _write_csv(args.trace, ["acc", "d", "f", "i"], trace.steps)


def cmd_cvbw(args) -> None:
    engine = _engine(args.taps, args.n)
    save_taps(engine.variable_bandwidth(args.bw_des), args.out)


def cmd_bank(args) -> None:
    lo, hi = _parse_span(args.span_mhz)
    sc = SensingScenario((lo, hi), args.sample_rate_hz, args.bands)
    engine = _engine(args.taps, args.n)
    bank = modulated_bank(engine, args.bands, sc.span_norm)
    os.makedirs(args.out, exist_ok=True)
    manifest = {"version": SCHEMA_VERSION, "span_mhz": [lo, hi],
                "sample_rate_hz": args.sample_rate_hz, "bands": []}
    for k, bf in enumerate(bank):
        name = f"band_{k:02d}.csv"
        _write_csv(os.path.join(args.out, name), ["re", "im"],
                   [[repr(float(v.real)), repr(float(v.imag))] for v in bf.taps])
        manifest["bands"].append({"index": k, "file": name,
                                  "center_mhz": sc.to_mhz(bf.center),
                                  "bandwidth_mhz": sc.width_to_mhz(bf.bandwidth),
                                  "ntaps": int(bf.taps.size)})
    _write_json(os.path.join(args.out, "bank.json"), manifest)


def cmd_sense(args) -> None:
    try:
        with open(args.scenario, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"scenario: cannot read {args.scenario!r} ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario: invalid JSON ({exc})") from None
    if isinstance(raw, dict):
        for key, val in (("seed", args.seed), ("resolution_mhz", args.resolution_mhz),
                         ("n_coarse_bands", args.bands)):
            if val is not None:
                raw[key] = val
    sc = SensingScenario.from_dict(raw)
    report = run_scenario(sc, threads=max_threads())
    _write_json(args.out, report.to_dict(trace=True))
    if args.trace:
        rows = []
        for h in report.fine:
            for side, ladder in (("left", h.left_trace), ("right", h.right_trace)):
                for step, t in enumerate(ladder, start=1):
                    rows.append([h.band_index, side, step, repr(t.bandwidth), repr(t.threshold),
                                 repr(t.energy), int(t.occupied)])
        _write_csv(args.trace, ["band_index", "side", "step", "bandwidth_mhz", "threshold",
                                "energy", "occupied"], rows)


def cmd_pe_curve(args) -> None:
    snr = _parse_list(args.snr_db, "snr-db")
    alpha = _parse_range(args.alpha, "alpha")
    for a in alpha:
        if not 0 < a < 1:
            raise ConfigError(f"alpha: values must lie in (0, 1), got {a}")
    rows = pe_curve(NoiseModel(args.sigma_w2), DetectorParams(args.ns, 0.5), snr, alpha)
    _write_csv(args.out, ["alpha", "snr_db", "lambda", "pe"],
               [[repr(a), repr(s), repr(lam), repr(p)] for a, s, lam, p in rows])


def cmd_complexity(args) -> None:
    filt = load_taps(args.taps)
    rep = complexity_report(filt, args.bands)
    _write_json(args.out, {"version": SCHEMA_VERSION, **rep.to_dict()})


# ----------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="holescan", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"holescan {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("design", help="design the fixed low-pass prototype")
    s.add_argument("--spec", required=True, help="JSON filter spec (edges as fractions of pi)")
    s.add_argument("--frm", help="FRM factors m1,m2 (default: scanned)")
    s.add_argument("--direct", action="store_true", help="direct equiripple design")
    s.add_argument("--order-cap", type=int, default=8000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("fd", help="Pascal fractional-delay filter")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--f", type=float, required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_fd)

    s = sub.add_parser("resample", help="accumulator sampling-rate converter")
    s.add_argument("--srcf", type=float, required=True)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trace")
    s.set_defaults(func=cmd_resample)

    s = sub.add_parser("cvbw", help="variable-bandwidth low-pass")
    s.add_argument("--bw-des", type=float, required=True, help="bandwidth, fraction of pi")
    s.add_argument("--taps", help="prototype coefficient file (default: designed)")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cvbw)

    s = sub.add_parser("bank", help="modulated coarse-sensing filter bank")
    s.add_argument("--bands", type=int, required=True)
    s.add_argument("--span-mhz", required=True, help="lo:hi")
    s.add_argument("--sample-rate-hz", type=float, default=25e6)
    s.add_argument("--taps")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_bank)

    s = sub.add_parser("sense", help="run a sensing scenario")
    s.add_argument("--scenario", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--trace", help="write fine-sensing ladders as CSV")
    s.add_argument("--seed", type=int)
    s.add_argument("--resolution-mhz", type=float)
    s.add_argument("--bands", type=int)
    s.set_defaults(func=cmd_sense)

    s = sub.add_parser("pe-curve", help="error probability at the adaptive threshold")
    s.add_argument("--snr-db", required=True, help="comma list, e.g. 0,3,5,10")
    s.add_argument("--alpha", required=True, help="start:stop:step or comma list")
    s.add_argument("--ns", type=int, default=1000)
    s.add_argument("--sigma-w2", type=float, default=1.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_pe_curve)

    s = sub.add_parser("complexity", help="multiplier count report")
    s.add_argument("--taps", required=True)
    s.add_argument("--bands", type=int, required=True)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_complexity)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, ParseError) as exc:
        print(f"holescan {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"holescan {args.command}: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    except HoleScanError as exc:
        print(f"holescan {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
