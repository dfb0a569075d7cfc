"""Design the sensing prototype both ways and compare cost.

Reports length, multiplier count and measured ripple for the direct
equiripple design and the two-stage FRM design, optionally saving taps.
"""
import argparse
import time

from holescan.fir_design import (PROTOTYPE_SPEC, design_equiripple, design_prototype,
                                 measure_response, save_taps)


def summarise(name, filt, seconds):
    rep = measure_response(filt.taps, PROTOTYPE_SPEC)
    print(f"{name},{filt.path},{filt.taps.size},{filt.multiplier_count},"
          f"{rep.passband_ripple_db:.4f},{rep.stopband_atten_db:.2f},{rep.meets},{seconds:.1f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--skip-direct", action="store_true", help="the direct design takes ~40 s")
    ap.add_argument("--save", help="write the FRM prototype taps here")
    args = ap.parse_args()
    print("design,path,ntaps,multipliers,passband_ripple_db,stopband_atten_db,meets,seconds")
    t0 = time.perf_counter()
    frm = design_prototype()
    summarise("frm", frm, time.perf_counter() - t0)
    if frm.meta:
        print("# frm factors:", {k: frm.meta[k] for k in ("m1", "m2") if k in frm.meta})
    if not args.skip_direct:
        t0 = time.perf_counter()
        summarise("direct", design_equiripple(PROTOTYPE_SPEC, order_cap=8000),
                  time.perf_counter() - t0)
    if args.save:
        save_taps(frm, args.save)


if __name__ == "__main__":
    main()
