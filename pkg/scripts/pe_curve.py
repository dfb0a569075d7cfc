"""Error probability at the adaptive threshold versus SNR, theory and Monte Carlo.

Writes CSV rows (alpha, snr_db, lambda, pe_theory, pe_mc).  The Monte-Carlo
column draws Gaussian-signal energies as scaled chi-square variates.
"""
import argparse

import numpy as np

from holescan.detector import (DetectorParams, NoiseModel, SignalModel, empirical_rate,
                               mc_energies_chi2, pe_curve)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--snr-db", default="-5,-3,0,3,5,10")
    ap.add_argument("--alpha", default="0.1,0.3,0.5,0.7,0.9")
    ap.add_argument("--ns", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=10 ** 5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    snr = [float(v) for v in args.snr_db.split(",")]
    alpha = [float(v) for v in args.alpha.split(",")]
    noise = NoiseModel(1.0)
    params = DetectorParams(args.ns)
    rng = np.random.default_rng(args.seed)
    h0 = mc_energies_chi2(None, noise, params, args.trials, rng)
    print("alpha,snr_db,lambda,pe_theory,pe_mc")
    for a, s, lam, p in pe_curve(noise, params, snr, alpha):
        h1 = mc_energies_chi2(SignalModel.from_snr(10 ** (s / 10), noise), noise, params,
                              args.trials, rng)
        p_mc = a * (1 - empirical_rate(h1, lam)) + (1 - a) * empirical_rate(h0, lam)
        print(f"{a},{s},{lam:.6f},{p:.6e},{p_mc:.6e}")


if __name__ == "__main__":
    main()
