"""Multiplier accounting for the sensing front end."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ConfigError

M_CHANNELS = 2  # low-pass and its high-pass translation


@dataclass(frozen=True)
class ComplexityReport:
    mu_prototype: int
    mu_modulation: int
    mu_hpf: int
    mu_total: int
    n_coarse_bands: int
    m_channels: int = M_CHANNELS

    def to_dict(self) -> dict:
        return asdict(self)


def complexity_report(prototype, n_coarse_bands: int) -> ComplexityReport:
    """Total multipliers = prototype + Nc^2 (DFT modulation) + M log2 M (high-pass).

    ``prototype`` is a FirFilter or a plain multiplier count.
    """
    if int(n_coarse_bands) != n_coarse_bands or n_coarse_bands < 1:
        raise ConfigError(f"n_coarse_bands must be an integer >= 1, got {n_coarse_bands!r}")
    mu_p = prototype if isinstance(prototype, int) else prototype.multiplier_count
    if mu_p is None or mu_p < 0:
        raise ConfigError("prototype multiplier_count is not set")
    mu_mod = int(n_coarse_bands) ** 2
    mu_hpf = int(M_CHANNELS * math.log2(M_CHANNELS))
    return ComplexityReport(int(mu_p), mu_mod, mu_hpf, int(mu_p) + mu_mod + mu_hpf,
                            int(n_coarse_bands), M_CHANNELS)
