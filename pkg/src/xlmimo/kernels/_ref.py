"""Pure numpy implementations of the hot per-realization kernels.

These are the fallback used when the compiled extension is unavailable and
the reference the compiled kernels are tested against. Both backends share
the same contract:

selection_order(theta, strength) -> (M, K) int64
    Column k lists all antenna indices by decreasing (theta, strength),
    lowest index first on full ties. The top-n prefix of a column is the
    user's active set for any n.

evaluate_selection(H, H_hat, order, n, use_zf, pivot_rtol)
    -> (P, vnorm2, n_act, ok)
    Builds the per-user combiners on the top-n rows and returns the
    cross-gain matrix P[i, k] = h_i^H v_k, squared combiner norms, the
    number of antennas active for at least one user, and ok=False when ZF
    hits a singular Gram or a combining column is zero.
"""

from __future__ import annotations

import numpy as np

from ..selection import (SingularChannelError, combine_mr, combine_zf,
                         selection_order_ref)

BACKEND_NAME = "python"


def selection_order(theta: np.ndarray, strength: np.ndarray) -> np.ndarray:
    return selection_order_ref(theta, strength)


def evaluate_selection(H: np.ndarray, H_hat: np.ndarray, order: np.ndarray,
                       n: int, use_zf: bool, pivot_rtol: float):
    m, n_users = H.shape
    V = np.zeros((m, n_users), dtype=complex)
    for k in range(n_users):
        rows = order[:n, k]
        if use_zf:
            try:
                V[:, k] = combine_zf(H_hat, rows, k, rtol=pivot_rtol)
            except SingularChannelError:
                return None, None, 0, False
        else:
            V[:, k] = combine_mr(H_hat, rows, k)
    vnorm2 = np.sum(np.abs(V) ** 2, axis=0)
    if np.any(vnorm2 == 0.0):
        return None, None, 0, False
    P = H.conj().T @ V
    n_act = int(np.unique(order[:n, :]).size)
    return P, vnorm2, n_act, True
