"""Pascal-structure variable fractional-delay filter.

The transfer function is a weighted sum of backward differences,

    H(z, f) = sum_k p_k(f) (1 - z^-1)^k,   k = 0..N

with Pascal polynomial weights p_0 = 1, p_k = p_{k-1} (1 - (f + 1)/k).
Applied to a sequence it returns an estimate of x(n - f), i.e. Newton
backward-difference interpolation on the samples x[n], ..., x[n - N].
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ConfigError, EmptyInput

DEFAULT_ORDER = 4


@dataclass(frozen=True)
class PascalConfig:
    order_n: int = DEFAULT_ORDER
    frac_delay: float = 0.0

    def __post_init__(self):
        if int(self.order_n) != self.order_n or self.order_n < 0:
            raise ConfigError(f"order_n must be a non-negative integer, got {self.order_n!r}")
        if not 0.0 <= self.frac_delay <= 1.0:
            raise ConfigError(f"frac_delay must lie in [0, 1], got {self.frac_delay!r}")


def pascal_coeffs(cfg: PascalConfig) -> np.ndarray:
    """Return p[0..N] with p[k] = prod_{j=1..k} (1 - (f + 1)/j)."""
    return pascal_coeffs_batch(np.array([cfg.frac_delay]), cfg.order_n)[0]


def pascal_coeffs_batch(f: np.ndarray, order_n: int) -> np.ndarray:
    """Pascal weights for many fractional delays at once, shape (len(f), N + 1)."""
    f = np.asarray(f, dtype=float)
    p = np.empty((f.size, order_n + 1))
    p[:, 0] = 1.0
    for k in range(1, order_n + 1):
        p[:, k] = p[:, k - 1] * (1.0 - (f + 1.0) / k)
    return p


def expanded_taps(cfg: PascalConfig) -> np.ndarray:
    """Flatten the difference cascade into one FIR: t[j] = sum_{k>=j} p[k] (-1)^j C(k, j)."""
    p = pascal_coeffs(cfg)
    n = cfg.order_n
    taps = np.zeros(n + 1)
    for j in range(n + 1):
        taps[j] = (-1) ** j * sum(p[k] * comb(k, j) for k in range(j, n + 1))
    return taps


def _weighted_differences(windows: np.ndarray, p: np.ndarray) -> np.ndarray:
    # windows[..., j] holds x[n - N + j]; the last column is the current sample.
    # Differencing is local, so applying it to a window reproduces the
    # full-sequence cascade bit for bit at that sample.
    d = windows
    out = p[..., 0] * d[..., -1]
    for k in range(1, p.shape[-1]):
        d = d[..., 1:] - d[..., :-1]
        out = out + p[..., k] * d[..., -1]
    return out


def fd_filter(x, cfg: PascalConfig) -> np.ndarray:
    """Delay ``x`` by ``cfg.frac_delay`` samples with zero initial state.

    The output has the same length as the input.  Samples before ``x[0]``
    are taken as zero.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise EmptyInput("fd_filter needs a non-empty 1-D sequence")
    n = cfg.order_n
    padded = np.concatenate([np.zeros(n), x])
    windows = np.lib.stride_tricks.sliding_window_view(padded, n + 1)
    return _weighted_differences(windows, pascal_coeffs(cfg))


def fd_samples(x: np.ndarray, index: np.ndarray, frac: np.ndarray, order_n: int) -> np.ndarray:
    """Evaluate ``fd_filter(x, f_m)[i_m]`` for many (i_m, f_m) pairs.

    Bit-identical to running :func:`fd_filter` over the whole input for each
    pair and picking out sample ``i_m``; only the needed window is touched.
    """
    x = np.asarray(x)
    index = np.asarray(index, dtype=np.int64)
    padded = np.concatenate([np.zeros(order_n, dtype=x.dtype), x])
    cols = index[:, None] + np.arange(order_n + 1)[None, :]
    windows = padded[cols]
    p = pascal_coeffs_batch(frac, order_n)
    return _weighted_differences(windows, p)
