"""Accumulator-driven sampling-rate converter built on the Pascal FD filter.

Per output step: d = frac(acc), f = 1 - d (or 0 when d == 0), i = ceil(acc),
and the output sample is the Pascal-filtered input (delay f) at index i.
The accumulator advances by ``srcf`` until it passes ``len(x) - 1``.

The accumulator is evaluated as ``n * srcf`` rather than by repeated
addition, which is the same sequence without floating-point drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptyInput
from .pascal_fd import DEFAULT_ORDER, fd_samples


@dataclass(frozen=True)
class SrcConfig:
    srcf: float
    pascal_n: int = DEFAULT_ORDER

    def __post_init__(self):
        if not (self.srcf > 0 and math.isfinite(self.srcf)):
            raise ConfigError(f"srcf must be positive and finite, got {self.srcf!r}")
        if int(self.pascal_n) != self.pascal_n or self.pascal_n < 1:
            raise ConfigError(f"pascal_n must be an integer >= 1, got {self.pascal_n!r}")


@dataclass
class SrcTrace:
    acc: np.ndarray
    d: np.ndarray
    f: np.ndarray
    i: np.ndarray
    clamped: np.ndarray = field(default=None)

    def __len__(self):
        return len(self.acc)

    @property
    def steps(self):
        return list(zip(self.acc.tolist(), self.d.tolist(), self.f.tolist(), self.i.tolist()))


def _accumulator(n_steps: int, srcf: float) -> np.ndarray:
    return np.arange(n_steps, dtype=float) * srcf


def resampled_length(input_len: int, srcf: float) -> int:
    """Number of accumulator steps taken for an input of ``input_len`` samples."""
    if input_len < 2:
        raise EmptyInput("resampling needs at least 2 input samples")
    if not srcf > 0:
        raise ConfigError(f"srcf must be positive, got {srcf!r}")
    last = input_len - 1
    k = int(math.floor(last / srcf))
    # closed form can be off by one where last/srcf rounds across an integer
    while k > 0 and k * srcf > last:
        k -= 1
    while (k + 1) * srcf <= last:
        k += 1
    return k + 1


def resample(x, cfg: SrcConfig) -> tuple[np.ndarray, SrcTrace]:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise EmptyInput("resample needs a 1-D input of at least 2 samples")
    n_out = resampled_length(x.size, cfg.srcf)
    acc = _accumulator(n_out, cfg.srcf)
    assert acc[0] == 0.0 and np.all(acc >= 0)
    fl = np.floor(acc)
    d = acc - fl
    f = np.where(d != 0.0, 1.0 - d, d)
    i = np.ceil(acc).astype(np.int64)
    clamped = i > x.size - 1
    i = np.minimum(i, x.size - 1)
    y = fd_samples(x, i, f, cfg.pascal_n)
    return y, SrcTrace(acc=acc, d=d, f=f, i=i, clamped=clamped)
