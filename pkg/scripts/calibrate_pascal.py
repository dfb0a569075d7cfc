"""Delay error of the Pascal fractional-delay filter versus order.

Filters x[n] = sin(0.02 pi n) with fractional delays on a fine grid and
reports the worst interior-sample error against sin(0.02 pi (n - f)).
"""
import argparse

import numpy as np

from holescan.pascal_fd import PascalConfig, fd_filter


def max_delay_error(order_n, nu=0.01, n_samples=400, fracs=np.linspace(0, 1, 101)):
    n = np.arange(n_samples)
    x = np.sin(2 * np.pi * nu * n)
    worst = 0.0
    for f in fracs:
        y = fd_filter(x, PascalConfig(order_n, float(f)))
        ref = np.sin(2 * np.pi * nu * (n - f))
        worst = max(worst, np.max(np.abs(y - ref)[order_n:]))
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=6)
    args = ap.parse_args()
    print("order_n,max_abs_error")
    for order in range(1, args.max_order + 1):
        print(f"{order},{max_delay_error(order):.3e}")


if __name__ == "__main__":
    main()
