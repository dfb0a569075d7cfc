"""Complex-baseband QPSK primary users in AWGN.

Each user is a root-raised-cosine shaped QPSK stream, evaluated in closed
form at t = n / fs and shifted to its mapped centre frequency.  Random
draws are keyed by (seed, stream, block) so any prefix of the signal is
identical no matter how long a signal is eventually requested.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

NOISE_BLOCK = 8192
SYMBOL_CHUNK = 1024
PULSE_SPAN = 8  # symbols either side of the pulse peak
_OFFSET = 1 << 31


@dataclass(frozen=True)
class UserSignal:
    center_mhz: float
    symbol_rate_hz: float
    power: float
    rolloff: float = 0.25

    def __post_init__(self):
        if not self.symbol_rate_hz > 0:
            raise ConfigError(f"symbol_rate_hz must be positive, got {self.symbol_rate_hz!r}")
        if not self.power >= 0:
            raise ConfigError(f"power must be >= 0, got {self.power!r}")
        if not 0 < self.rolloff <= 1:
            raise ConfigError(f"rolloff must lie in (0, 1], got {self.rolloff!r}")

    def support_mhz(self) -> tuple[float, float]:
        """Occupied band [fc - (1+beta) Rs / 2, fc + (1+beta) Rs / 2] in MHz."""
        half = (1 + self.rolloff) * self.symbol_rate_hz / 2 / 1e6
        return self.center_mhz - half, self.center_mhz + half


def rrc_pulse(t, beta: float) -> np.ndarray:
    """Root-raised-cosine pulse, time in symbol periods, unit energy per symbol."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    sing = 1 / (4 * beta)
    at_zero = np.abs(t) < 1e-12
    at_sing = np.abs(np.abs(t) - sing) < 1e-9
    reg = ~(at_zero | at_sing)
    tr = t[reg]
    num = np.sin(math.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(math.pi * tr * (1 + beta))
    out[reg] = num / (math.pi * tr * (1 - (4 * beta * tr) ** 2))
    out[at_zero] = 1 - beta + 4 * beta / math.pi
    out[at_sing] = beta / math.sqrt(2) * ((1 + 2 / math.pi) * math.sin(math.pi / (4 * beta))
                                          + (1 - 2 / math.pi) * math.cos(math.pi / (4 * beta)))
    return out


class SignalSource:
    """Lazily extended sample stream; ``get(n)`` returns the first ``n`` samples.

    Parameters
    ----------
    users : sequence of UserSignal
    offsets : sequence of float
        Carrier frequency of each user in fractions of pi (complex baseband).
    sample_rate_hz : float
    sigma_w2 : float
        Variance of the circular complex AWGN.
    seed : int
    add_noise : bool
    """

    def __init__(self, users, offsets, sample_rate_hz, sigma_w2, seed, add_noise=True):
        if len(users) != len(offsets):
            raise ConfigError("one carrier offset per user is required")
        self.users = list(users)
        self.offsets = list(offsets)
        self.fs = float(sample_rate_hz)
        self.sigma_w2 = float(sigma_w2)
        self.seed = int(seed)
        self.add_noise = add_noise
        self._buf = np.zeros(0, dtype=complex)
        self._chunks: dict = {}
        self._lock = threading.Lock()
        self._user_meta = []
        for u in range(len(self.users)):
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, 2, u]))
            self._user_meta.append((rng.uniform(0, 1), rng.uniform(0, 2 * math.pi)))

    def get(self, n: int) -> np.ndarray:
        with self._lock:
            while self._buf.size < n:
                b = self._buf.size // NOISE_BLOCK
                self._buf = np.concatenate([self._buf, self._block(b)])
            return self._buf[:n]

    def _symbols(self, u: int, first: int, last: int) -> np.ndarray:
        c0, c1 = first // SYMBOL_CHUNK, last // SYMBOL_CHUNK
        parts = []
        for c in range(c0, c1 + 1):
            key = (u, c)
            if key not in self._chunks:
                rng = np.random.default_rng(np.random.SeedSequence([self.seed, 1, u, c + _OFFSET]))
                bits = rng.integers(0, 2, (SYMBOL_CHUNK, 2))
                self._chunks[key] = ((2 * bits[:, 0] - 1) + 1j * (2 * bits[:, 1] - 1)) / math.sqrt(2)
            parts.append(self._chunks[key])
        allsym = np.concatenate(parts)
        return allsym[first - c0 * SYMBOL_CHUNK:last - c0 * SYMBOL_CHUNK + 1]

    def _block(self, b: int) -> np.ndarray:
        n = np.arange(b * NOISE_BLOCK, (b + 1) * NOISE_BLOCK)
        x = np.zeros(NOISE_BLOCK, dtype=complex)
        for u, (user, omega) in enumerate(zip(self.users, self.offsets)):
            if user.power == 0:
                continue
            tau, phase = self._user_meta[u]
            sps = self.fs / user.symbol_rate_hz
            t = n / sps - tau  # time in symbols
            k_first = int(math.floor(t[0])) - PULSE_SPAN
            k_last = int(math.floor(t[-1])) + PULSE_SPAN + 1
            sym = self._symbols(u, k_first, k_last)
            base = np.floor(t).astype(np.int64)
            s = np.zeros(NOISE_BLOCK, dtype=complex)
            for j in range(-PULSE_SPAN, PULSE_SPAN + 2):
                k = base + j
                s += sym[k - k_first] * rrc_pulse(t - k, user.rolloff)
            x += math.sqrt(user.power) * s * np.exp(1j * (math.pi * omega * n + phase))
        if self.add_noise:
            rng = np.random.default_rng(np.random.SeedSequence([self.seed, 0, b]))
            scale = math.sqrt(self.sigma_w2 / 2)
            x += scale * (rng.standard_normal(NOISE_BLOCK) + 1j * rng.standard_normal(NOISE_BLOCK))
        return x
