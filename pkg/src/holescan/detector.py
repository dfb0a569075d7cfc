"""Energy detection: test statistic, closed-form Pd/Pf, and decision thresholds.

The closed forms use the central-limit approximation for the energy of
``ns`` real samples: under H0 the energy is normal with mean sigma_w^2
and standard deviation sigma_w^2 / sqrt(ns/2); under H1 both moments use
sigma_x^2 + sigma_w^2.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy.special import erfc

from .errors import DomainError, EmptyInput, OutOfRange

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_STD_NORMAL = NormalDist()


@dataclass(frozen=True)
class NoiseModel:
    sigma_w2: float = 1.0
    known_a_priori: bool = True

    def __post_init__(self):
        if not (self.sigma_w2 > 0 and math.isfinite(self.sigma_w2)):
            raise OutOfRange(f"sigma_w2 must be positive, got {self.sigma_w2!r}")


@dataclass(frozen=True)
class SignalModel:
    sigma_x2: float
    snr_gamma: float

    def __post_init__(self):
        if not self.sigma_x2 >= 0:
            raise OutOfRange(f"sigma_x2 must be >= 0, got {self.sigma_x2!r}")

    @classmethod
    def from_snr(cls, gamma: float, noise: NoiseModel) -> "SignalModel":
        return cls(gamma * noise.sigma_w2, gamma)

    @classmethod
    def from_power(cls, sigma_x2: float, noise: NoiseModel) -> "SignalModel":
        return cls(sigma_x2, sigma_x2 / noise.sigma_w2)


@dataclass(frozen=True)
class DetectorParams:
    ns: int = 1000
    alpha: float = 0.5

    def __post_init__(self):
        if int(self.ns) != self.ns or self.ns < 2:
            raise OutOfRange(f"ns must be an integer >= 2, got {self.ns!r}")
        if not 0 < self.alpha < 1:
            raise OutOfRange(f"alpha must lie in (0, 1), got {self.alpha!r}")


class Occupancy(enum.Enum):
    OCCUPIED = "Occupied"
    HOLE = "Hole"

    def __bool__(self):
        return self is Occupancy.OCCUPIED


def energy(y) -> float:
    """Mean squared magnitude of ``y``."""
    y = np.asarray(y)
    if y.size == 0:
        raise EmptyInput("energy of an empty sequence")
    return float(np.mean(np.abs(y) ** 2))


def decide(e: float, lam: float) -> Occupancy:
    """Occupied iff ``e > lam``; a tie is a hole."""
    if lam < 0:
        raise OutOfRange(f"threshold must be >= 0, got {lam!r}")
    return Occupancy.OCCUPIED if e > lam else Occupancy.HOLE


def q(z):
    """Gaussian tail probability Q(z) = P(N(0,1) > z)."""
    return 0.5 * erfc(np.asarray(z, dtype=float) / _SQRT2)[()]


def qinv(p: float) -> float:
    """Inverse of :func:`q`.

    Rational-approximation starting point, then one Newton step on
    ``q(z) - p`` to match :func:`q` to working precision.
    """
    if not 0 < p < 1:
        raise OutOfRange(f"probability must lie in (0, 1), got {p!r}")
    z = -_STD_NORMAL.inv_cdf(p)
    pdf = math.exp(-0.5 * z * z) / _SQRT2PI
    if pdf > 0:
        z += (float(q(z)) - p) / pdf
    return z


def _scale(ns: int) -> float:
    return math.sqrt(ns / 2)


def pd_theory(lam, sig: SignalModel, noise: NoiseModel, params: DetectorParams):
    total = sig.sigma_x2 + noise.sigma_w2
    return q((np.asarray(lam) - total) / (total / _scale(params.ns)))


def pf_theory(lam, noise: NoiseModel, params: DetectorParams):
    return q((np.asarray(lam) - noise.sigma_w2) / (noise.sigma_w2 / _scale(params.ns)))


def threshold_cdr(target_pd: float, sig: SignalModel, noise: NoiseModel,
                  params: DetectorParams) -> float:
    """Threshold giving detection probability ``target_pd``."""
    return (sig.sigma_x2 + noise.sigma_w2) * (1 + qinv(target_pd) / _scale(params.ns))


def threshold_cfar(target_pf: float, noise: NoiseModel, params: DetectorParams) -> float:
    """Threshold giving false-alarm probability ``target_pf``."""
    return noise.sigma_w2 * (1 + qinv(target_pf) / _scale(params.ns))


def threshold_adaptive(sig: SignalModel, noise: NoiseModel, params: DetectorParams) -> float:
    """Threshold minimising pe = (1 - alpha) Pf + alpha (1 - Pd).

    This is the stationary point of ``pe`` under the Gaussian closed forms.

    Raises
    ------
    DomainError
        If the SNR is not positive or the log/sqrt arguments are invalid.
    """
    g, a, ns = sig.snr_gamma, params.alpha, params.ns
    if not g > 0:
        raise DomainError(f"adaptive threshold needs snr_gamma > 0, got {g!r}")
    ratio = (1 - a) * (1 + g) / a
    if not ratio > 0:
        raise DomainError(f"log argument {ratio!r} is not positive")
    radicand = 1 + (4 / ns) * (1 + 2 / g) * math.log(ratio)
    if radicand < 0:
        raise DomainError(f"square-root argument {radicand!r} is negative "
                          f"(alpha={a}, gamma={g}, ns={ns})")
    return (1 + math.sqrt(radicand)) / ((2 + g) / ((1 + g) * noise.sigma_w2))


def pe(lam, sig: SignalModel, noise: NoiseModel, params: DetectorParams):
    a = params.alpha
    return (1 - a) * pf_theory(lam, noise, params) + a * (1 - pd_theory(lam, sig, noise, params))


def pe_curve(noise: NoiseModel, params: DetectorParams, snr_list, alpha_grid) -> list:
    """Rows of (alpha, snr_db, lambda_adap, pe) over the SNR/alpha grid.

    ``snr_list`` is in dB.  Rows are ordered SNR-major.
    """
    snr_list, alpha_grid = list(snr_list), list(alpha_grid)
    if not snr_list or not alpha_grid:
        raise EmptyInput("pe_curve needs non-empty SNR and alpha grids")
    rows = []
    for snr_db in snr_list:
        sig = SignalModel.from_snr(10 ** (snr_db / 10), noise)
        for alpha in alpha_grid:
            p = DetectorParams(params.ns, alpha)
            lam = threshold_adaptive(sig, noise, p)
            rows.append((float(alpha), float(snr_db), lam, float(pe(lam, sig, noise, p))))
    return rows


# --------------------------------------------------------------------------
# Monte-Carlo helpers
# --------------------------------------------------------------------------

def _energies(gen, trials: int, ns: int, chunk: int = 500) -> np.ndarray:
    out = np.empty(trials)
    for start in range(0, trials, chunk):
        stop = min(trials, start + chunk)
        out[start:stop] = np.mean(gen(stop - start, ns) ** 2, axis=1)
    return out


def mc_energies_gaussian(sig: SignalModel | None, noise: NoiseModel, params: DetectorParams,
                         trials: int, rng: np.random.Generator) -> np.ndarray:
    """Energies of ``trials`` windows of real Gaussian signal plus noise.

    ``sig=None`` gives noise-only windows (H0).
    """
    sx = 0.0 if sig is None else math.sqrt(sig.sigma_x2)
    sw = math.sqrt(noise.sigma_w2)

    def gen(n, ns):
        y = rng.normal(0.0, sw, (n, ns))
        if sx:
            y += rng.normal(0.0, sx, (n, ns))
        return y
    return _energies(gen, trials, params.ns)


def mc_energies_chi2(sig: SignalModel | None, noise: NoiseModel, params: DetectorParams,
                     trials: int, rng: np.random.Generator) -> np.ndarray:
    """Same distribution as :func:`mc_energies_gaussian`, drawn as scaled chi-square."""
    var = noise.sigma_w2 + (0.0 if sig is None else sig.sigma_x2)
    return var * rng.chisquare(params.ns, trials) / params.ns


def mc_energies_qpsk(sig: SignalModel, noise: NoiseModel, params: DetectorParams,
                     trials: int, rng: np.random.Generator, omega0: float = 0.3 * math.pi
                     ) -> np.ndarray:
    """Energies of real passband QPSK (one sample per symbol) plus Gaussian noise.

    x[n] = sqrt(2 sigma_x^2) cos(omega0 n + phi + theta_n) with a uniform
    random carrier phase per window and theta_n drawn from the four QPSK
    phases.
    """
    amp = math.sqrt(2 * sig.sigma_x2)
    sw = math.sqrt(noise.sigma_w2)

    def gen(n, ns):
        phi = rng.uniform(0, 2 * math.pi, (n, 1))
        theta = (2 * rng.integers(0, 4, (n, ns)) + 1) * (math.pi / 4)
        x = amp * np.cos(omega0 * np.arange(ns) + phi + theta)
        return x + rng.normal(0.0, sw, (n, ns))
    return _energies(gen, trials, params.ns)


def empirical_rate(energies: np.ndarray, lam: float) -> float:
    """Fraction of windows declared occupied."""
    return float(np.mean(energies > lam))
