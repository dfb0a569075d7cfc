"""Parks-McClellan (Remez exchange) design of odd-length linear-phase low-pass filters.

Works in the x = cos(w) domain and interpolates with the barycentric
Lagrange formula.  Barycentric weights are accumulated as logarithms so
that filters with several thousand taps do not overflow.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError, NonConvergence

_CHUNK = 2048
_SCALE_FROM = 401


def _log_weights(xn: np.ndarray):
    """log|w_k| and sign(w_k) for w_k = 1 / prod_{j != k} (x_k - x_j)."""
    n = xn.size
    logw = np.empty(n)
    sign = np.empty(n)
    for start in range(0, n, _CHUNK):
        stop = min(n, start + _CHUNK)
        diff = xn[start:stop, None] - xn[None, :]
        diff[np.arange(stop - start), np.arange(start, stop)] = 1.0
        logw[start:stop] = -np.sum(np.log(np.abs(diff)), axis=1)
        sign[start:stop] = np.where(np.sum(diff < 0, axis=1) % 2 == 0, 1.0, -1.0)
    return logw, sign


def _bary_eval(xq: np.ndarray, xn: np.ndarray, w: np.ndarray, vals: np.ndarray) -> np.ndarray:
    out = np.empty(xq.size)
    wv = w * vals
    for start in range(0, xq.size, _CHUNK):
        stop = min(xq.size, start + _CHUNK)
        diff = xq[start:stop, None] - xn[None, :]
        hit = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = 1.0 / diff
            out[start:stop] = (inv @ wv) / (inv @ w)
        rows, cols = np.nonzero(hit)
        out[start + rows] = vals[cols]
    return out


def _grid(numtaps: int, wp: float, ws: float, density: int):
    m = (numtaps - 1) // 2
    total = wp + (math.pi - ws)
    n_grid = density * (m + 1)
    n_pass = max(8, int(round(n_grid * wp / total)))
    n_stop = max(8, int(round(n_grid * (math.pi - ws) / total)))
    w = np.concatenate([np.linspace(0.0, wp, n_pass), np.linspace(ws, math.pi, n_stop)])
    band = np.concatenate([np.zeros(n_pass, dtype=int), np.ones(n_stop, dtype=int)])
    return w, band


def _local_extrema(err: np.ndarray, band: np.ndarray) -> np.ndarray:
    idx = []
    for b in (0, 1):
        sel = np.nonzero(band == b)[0]
        e = err[sel]
        if e.size < 2:
            idx.extend(sel.tolist())
            continue
        left = np.concatenate([[-np.inf if e[0] > 0 else np.inf], e[:-1]])
        right = np.concatenate([e[1:], [-np.inf if e[-1] > 0 else np.inf]])
        is_max = (e > 0) & (e >= left) & (e >= right)
        is_min = (e < 0) & (e <= left) & (e <= right)
        idx.extend(sel[is_max | is_min].tolist())
    return np.array(sorted(idx), dtype=np.int64)


def _alternate(cand: np.ndarray, err: np.ndarray) -> list:
    keep = []
    for i in cand:
        if keep and np.sign(err[i]) == np.sign(err[keep[-1]]):
            if abs(err[i]) > abs(err[keep[-1]]):
                keep[-1] = i
        else:
            keep.append(i)
    return keep


def _trim(keep: list, err: np.ndarray, r: int) -> list:
    keep = list(keep)
    while len(keep) > r:
        mags = np.abs(err[keep])
        if len(keep) - r == 1:
            keep.pop(0 if mags[0] < mags[-1] else -1)
            continue
        pair = np.maximum(mags[:-1], mags[1:])
        j = int(np.argmin(pair))
        ends = min(mags[0], mags[-1])
        if ends <= pair[j]:
            keep.pop(0 if mags[0] < mags[-1] else -1)
        else:
            del keep[j:j + 2]
    return keep


def _fill_gaps(keep: list, r: int, n_grid: int) -> list:
    # provisional reference points; the next exchange restores alternation
    pts = sorted(set(keep))
    while len(pts) < r:
        ext = [-1] + pts + [n_grid]
        gaps = np.diff(ext)
        j = int(np.argmax(gaps))
        if gaps[j] < 2:
            break
        pts.insert(j, ext[j] + gaps[j] // 2)
    return pts


def remez_lowpass(numtaps: int, wp: float, ws: float, stop_weight: float = 1.0,
                  grid_density: int = 16, maxiter: int = 80, tol: float = 1e-5,
                  init_freqs=None):
    """Equiripple low-pass design.

    Parameters
    ----------
    numtaps : int
        Odd filter length (type I linear phase).
    wp, ws : float
        Pass/stop band edges in rad/sample, 0 < wp < ws < pi.
    stop_weight : float
        Error weight in the stopband relative to the passband.
    init_freqs : array_like, optional
        Extremal frequencies from a previous design, used as a warm start.

    Returns
    -------
    taps : ndarray
    info : dict
        ``delta`` (passband deviation), ``iterations`` and the final
        extremal frequencies ``ext_freqs``.
    """
    if numtaps < 3 or numtaps % 2 == 0:
        raise ConfigError(f"numtaps must be odd and >= 3, got {numtaps}")
    if not 0 < wp < ws < math.pi:
        raise ConfigError(f"need 0 < wp < ws < pi, got wp={wp}, ws={ws}")
    m = (numtaps - 1) // 2
    r = m + 2
    w, band = _grid(numtaps, wp, ws, grid_density)
    x = np.cos(w)
    des = np.where(band == 0, 1.0, 0.0)
    wt = np.where(band == 0, 1.0, stop_weight)

    if init_freqs is None and numtaps > _SCALE_FROM:
        # reference scaling: warm-start from a roughly half-length design
        half = (numtaps // 2) | 1
        _, coarse = remez_lowpass(half, wp, ws, stop_weight, grid_density, maxiter, tol)
        init_freqs = coarse["ext_freqs"]
    if init_freqs is not None and len(init_freqs) >= 2:
        old = np.sort(np.asarray(init_freqs, dtype=float))
        target = np.interp(np.linspace(0, 1, r), np.linspace(0, 1, old.size), old)
        ext = np.unique(np.clip(np.searchsorted(w, target), 0, w.size - 1))
        if ext.size != r:
            ext = None
    else:
        ext = None
    if ext is None:
        ext = np.unique(np.round(np.linspace(0, w.size - 1, r)).astype(np.int64))

    delta = 0.0
    for it in range(1, maxiter + 1):
        xe = x[ext]
        logw, sgn = _log_weights(xe)
        gam = sgn * np.exp(logw - logw.max())
        alt = (-1.0) ** np.arange(r)
        delta = np.dot(gam, des[ext]) / np.dot(gam, alt / wt[ext])
        vals = des[ext] - alt * delta / wt[ext]
        # interpolate through the first r-1 nodes
        xl = xe[-1]
        logb = logw[:-1] + np.log(np.abs(xe[:-1] - xl))
        sb = sgn[:-1] * np.sign(xe[:-1] - xl)
        beta = sb * np.exp(logb - logb.max())
        amp = _bary_eval(x, xe[:-1], beta, vals[:-1])
        err = wt * (des - amp)

        peak = np.max(np.abs(err))
        cand = _local_extrema(err, band)
        strong = cand[np.abs(err[cand]) >= abs(delta) * (1 - 1e-12)]
        keep = _alternate(strong, err)
        if len(keep) < r:
            keep = _alternate(cand, err)
        if len(keep) < r:
            if it > maxiter // 2:
                raise NonConvergence(
                    f"Remez exchange lost alternation ({len(keep)} < {r} extrema) at iteration {it}")
            keep = _fill_gaps(keep, r, w.size)
        new_ext = np.array(_trim(keep, err, r), dtype=np.int64)
        converged = (peak - abs(delta)) <= tol * peak or np.array_equal(new_ext, ext)
        ext = new_ext
        if converged:
            break
    else:
        raise NonConvergence(f"Remez exchange did not converge in {maxiter} iterations "
                             f"(numtaps={numtaps}, delta={delta:.3g})")

    # sample the converged amplitude on the DFT grid and invert
    n = numtaps
    wk = 2 * np.pi * np.arange(m + 1) / n
    ak = _bary_eval(np.cos(wk), xe[:-1], beta, vals[:-1])
    full = np.concatenate([ak, ak[:0:-1]])
    h0 = np.fft.ifft(full).real
    taps = np.roll(h0, m)
    taps = 0.5 * (taps + taps[::-1])
    return taps, {"delta": abs(delta), "iterations": it, "ext_freqs": w[ext]}


def herrmann_length(wp: float, ws: float, dp: float, ds: float) -> int:
    """Herrmann-Rabiner-Chan estimate of the odd length of an equiripple low-pass.

    Band edges are in rad/sample.
    """
    d1, d2 = max(dp, ds), min(dp, ds)
    l1, l2 = math.log10(d1), math.log10(d2)
    dinf = (l2 * (5.309e-3 * l1 ** 2 + 7.114e-2 * l1 - 4.761e-1)
            - (2.66e-3 * l1 ** 2 + 5.941e-1 * l1 + 4.278e-1))
    f = 11.01217 + 0.51244 * (l1 - l2)
    df = (ws - wp) / (2 * math.pi)
    n = dinf / df - f * df + 1
    n = max(3, int(math.ceil(n)))
    return n if n % 2 == 1 else n + 1


def kaiser_order(wp: float, ws: float, dp: float, ds: float) -> float:
    """Kaiser's order estimate for an equiripple filter (edges in rad/sample)."""
    df = (ws - wp) / (2 * math.pi)
    return (-20 * math.log10(math.sqrt(dp * ds)) - 13) / (14.6 * df)
