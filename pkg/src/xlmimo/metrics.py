"""Per-realization link metrics: SINR, spectral efficiency, received power.

UL SINRs use the true channel with the estimate-derived combiner; DL SINRs
use the transpose inner product h^T w with the unit-norm precoders and
equal power allocation. The six received-power statistics are kept linear
per realization; Monte Carlo averaging happens outside and the dBm
conversion is applied to the averaged values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import FrameStructure, watt_to_dbm

STATS_FIELDS = ("s_ul", "i_ul", "n_ul", "s_dl", "i_dl", "n_dl")


class MetricUndefinedError(ArithmeticError):
    """SINR undefined (zero combining column); skip the realization."""


@dataclass(frozen=True)
class RealizationMetrics:
    sinr_ul: np.ndarray       # (K,) per-user UL SINR
    sinr_dl: np.ndarray       # (K,) per-user DL SINR
    se_ul: float              # bits per channel use
    se_dl: float
    se_total: float
    power_stats_linear: np.ndarray   # (6,) linear W, order STATS_FIELDS
    skipped: bool = False


def _as_power_vector(p, K: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.full(K, float(p)) if p.ndim == 0 else p


def crossgains(H: np.ndarray, V: np.ndarray) -> np.ndarray:
    """P[i, k] = h_i^H v_k, all combining inner products at once."""
    return H.conj().T @ V


def sinr_ul(H: np.ndarray, V: np.ndarray, p_ul, sigma2_ul: float) -> np.ndarray:
    """Per-user UL SINR: signal over other-user leakage plus combiner noise."""
    K = H.shape[1]
    p = _as_power_vector(p_ul, K)
    vnorm2 = np.sum(np.abs(V) ** 2, axis=0)
    if np.any(vnorm2 == 0):
        raise MetricUndefinedError("zero combining column")
    g2 = np.abs(crossgains(H, V)) ** 2       # g2[i, k] = |v_k^H h_i|^2
    signal = p * np.diagonal(g2)
    interference = (p[:, None] * g2).sum(axis=0) - signal
    return signal / (interference + sigma2_ul * vnorm2)


def sinr_dl(H: np.ndarray, W: np.ndarray, p_dl, sigma2_dl: float) -> np.ndarray:
    """Per-user DL SINR with transpose reception, gain |h_k^T w_i|."""
    K = H.shape[1]
    p = _as_power_vector(p_dl, K)
    g2 = np.abs(H.T @ W) ** 2                # g2[k, i] = |h_k^T w_i|^2
    signal = p * np.diagonal(g2)
    interference = (g2 * p[None, :]).sum(axis=1) - signal
    return signal / (interference + sigma2_dl)


def ergodic_se(gamma_ul: np.ndarray, gamma_dl: np.ndarray,
               frame: FrameStructure) -> tuple[float, float]:
    """Per-realization SE contributions in bits per channel use.

    The ergodic expectation is realized by averaging these values over
    Monte Carlo realizations.
    """
    se_ul = frame.tau_u / frame.tau_c * float(np.log2(1.0 + gamma_ul).sum())
    se_dl = frame.tau_d / frame.tau_c * float(np.log2(1.0 + gamma_dl).sum())
    return se_ul, se_dl


def received_power_linear(H, V, W, p_ul, p_dl, sigma2_ul, sigma2_dl) -> np.ndarray:
    """The six received-power quantities of one realization, linear watts.

    Order: UL signal, UL interference, UL noise, DL signal,
    DL interference, DL noise.
    """
    K = H.shape[1]
    pu = _as_power_vector(p_ul, K)
    pd = _as_power_vector(p_dl, K)
    vnorm2 = np.sum(np.abs(V) ** 2, axis=0)
    g2 = np.abs(crossgains(H, V)) ** 2
    s_ul = float(np.mean(pu * np.diagonal(g2)))
    i_ul = float(np.mean((pu[:, None] * g2).sum(axis=0) - pu * np.diagonal(g2)))
    n_ul = float(sigma2_ul * np.mean(vnorm2))
    d2 = np.abs(H.T @ W) ** 2
    s_dl = float(np.mean(pd * np.diagonal(d2)))
    i_dl = float(np.mean((d2 * pd[None, :]).sum(axis=1) - pd * np.diagonal(d2)))
    return np.array([s_ul, i_ul, n_ul, s_dl, i_dl, float(sigma2_dl)])


def received_power_stats(H, V, W, p_ul, p_dl, sigma2_ul, sigma2_dl) -> np.ndarray:
    """Same six quantities converted to dBm."""
    lin = received_power_linear(H, V, W, p_ul, p_dl, sigma2_ul, sigma2_dl)
    return stats_to_dbm(lin)


def stats_to_dbm(linear: np.ndarray) -> np.ndarray:
    """Elementwise W -> dBm; zero power maps to -inf."""
    out = np.full(len(linear), -np.inf)
    pos = np.asarray(linear) > 0
    out[pos] = 10.0 * np.log10(np.asarray(linear)[pos]) + 30.0
    return out


def sinrs_from_crossgains(P: np.ndarray, vnorm2: np.ndarray, p_ul, p_dl,
                          sigma2_ul: float, sigma2_dl: float):
    """UL and DL SINR vectors from P[i, k] = h_i^H v_k and combiner norms.

    Shared post-processing for both kernel backends; algebraically
    identical to sinr_ul / sinr_dl on the full matrices since
    |v_k^H h_i| = |P[i, k]| and |h_k^T w_i| = |P[k, i]| / ||v_i||.
    """
    K = P.shape[0]
    pu = _as_power_vector(p_ul, K)
    pd = _as_power_vector(p_dl, K)
    g2 = np.abs(P) ** 2
    diag = np.diagonal(g2)
    sig_ul = pu * diag
    int_ul = (pu[:, None] * g2).sum(axis=0) - sig_ul
    gamma_ul = sig_ul / (int_ul + sigma2_ul * vnorm2)
    d2 = g2 / vnorm2[None, :]                # d2[k, i] = |h_k^T w_i|^2
    ddiag = np.diagonal(d2)
    sig_dl = pd * ddiag
    int_dl = (d2 * pd[None, :]).sum(axis=1) - sig_dl
    gamma_dl = sig_dl / (int_dl + sigma2_dl)
    return gamma_ul, gamma_dl


def power_stats_from_crossgains(P: np.ndarray, vnorm2: np.ndarray, p_ul, p_dl,
                                sigma2_ul: float, sigma2_dl: float) -> np.ndarray:
    """Linear received-power statistics from the cross-gain matrix."""
    K = P.shape[0]
    pu = _as_power_vector(p_ul, K)
    pd = _as_power_vector(p_dl, K)
    g2 = np.abs(P) ** 2
    diag = np.diagonal(g2)
    s_ul = float(np.mean(pu * diag))
    i_ul = float(np.mean((pu[:, None] * g2).sum(axis=0) - pu * diag))
    n_ul = float(sigma2_ul * np.mean(vnorm2))
    d2 = g2 / vnorm2[None, :]
    ddiag = np.diagonal(d2)
    s_dl = float(np.mean(pd * ddiag))
    i_dl = float(np.mean((d2 * pd[None, :]).sum(axis=1) - pd * ddiag))
    return np.array([s_ul, i_ul, n_ul, s_dl, i_dl, float(sigma2_dl)])
