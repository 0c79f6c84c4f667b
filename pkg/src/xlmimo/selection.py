"""Per-antenna scoring, greedy antenna selection and MR/ZF processing.

For every user the score of antenna m is the estimated signal power at m
divided by the summed estimated power of all other users at m. The N
highest-scoring antennas form the user's active set; combining (MR or ZF)
is computed on the row-restricted estimate and the precoder is the
normalized conjugate of the combiner. Combiner and precoder rows outside
the active set are exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative pivot tolerance of the LDL^H solve: a factorization pivot below
# this fraction of the largest Gram diagonal is treated as singular.
ZF_PIVOT_RTOL = 1e-12

SCHEME_MR = "mr"
SCHEME_ZF = "zf"
SCHEMES = (SCHEME_MR, SCHEME_ZF)


class ZfInfeasibleError(ValueError):
    """ZF requested with fewer selected antennas than users."""


class SingularChannelError(ArithmeticError):
    """Gram matrix of the selected rows is numerically singular."""


class ZeroCombinerError(ArithmeticError):
    """A combining column is identically zero; metrics are undefined."""


@dataclass(frozen=True)
class SelectionResult:
    D: np.ndarray          # (N, K) selected antenna rows per user, best first
    D_union: np.ndarray    # sorted union of all selected rows
    n_act: int             # |D_union|
    V: np.ndarray          # (M, K) combining matrix, zero outside D[:, k]
    W: np.ndarray          # (M, K) unit-norm precoding matrix, same support
    scheme: str
    n: int                 # antennas per user


def hrnp_scores(H_hat: np.ndarray) -> np.ndarray:
    """Score matrix theta with theta[m, k] = |hhat_mk|^2 / sum_{i != k} |hhat_mi|^2.

    A zero numerator scores 0 regardless of the denominator. A positive
    numerator over a zero denominator (no interferer visible at m) scores
    +inf; such antennas outrank every finite score and are ordered among
    themselves by |hhat_mk|^2 (see selection_tiebreak).
    """
    a2 = np.abs(H_hat) ** 2
    den = a2.sum(axis=1, keepdims=True) - a2
    with np.errstate(divide="ignore", invalid="ignore"):
        theta = a2 / den
    theta[a2 == 0] = 0.0
    theta[(den == 0) & (a2 > 0)] = np.inf
    return theta


def selection_tiebreak(theta: np.ndarray, H_hat: np.ndarray) -> np.ndarray:
    """Secondary sort key: |hhat|^2 where theta is infinite, zero elsewhere.

    Finite score ties keep the lowest antenna index, so the secondary key
    must not discriminate among them.
    """
    strength = np.zeros_like(theta)
    inf = np.isinf(theta)
    if inf.any():
        strength[inf] = np.abs(H_hat[inf]) ** 2
    return strength


def select_antennas(theta_col: np.ndarray, n: int,
                    strength_col: np.ndarray | None = None) -> np.ndarray:
    """Indices of the n largest scores, best first.

    Equal scores break toward the lowest antenna index. ``strength_col``
    orders infinite scores among themselves (largest first).
    """
    m = theta_col.shape[0]
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= {m}, got n={n}")
    if strength_col is None:
        strength_col = np.zeros_like(theta_col)
    order = np.lexsort((-strength_col, -theta_col))
    return order[:n]


def selection_order_ref(theta: np.ndarray, strength: np.ndarray) -> np.ndarray:
    """Full greedy selection order for every user, one column per user."""
    m, k = theta.shape
    order = np.empty((m, k), dtype=np.int64)
    for j in range(k):
        order[:, j] = np.lexsort((-strength[:, j], -theta[:, j]))
    return order


def ldlh_factor(G: np.ndarray, rtol: float = ZF_PIVOT_RTOL):
    """LDL^H factorization of a Hermitian matrix with a pivot check.

    Returns (L, d) with unit lower-triangular L and real pivots d. Raises
    SingularChannelError when a pivot magnitude falls below
    rtol * max(diag(G)).
    """
    k = G.shape[0]
    L = np.zeros_like(G)
    d = np.zeros(k)
    tol = rtol * float(np.max(np.abs(np.diagonal(G).real)))
    for j in range(k):
        w = G[j:, j] - L[j:, :j] @ (L[j, :j].conj() * d[:j])
        pivot = w[0].real
        if abs(pivot) <= tol:
            raise SingularChannelError(
                f"pivot {pivot:.3e} below tolerance {tol:.3e} at step {j}")
        d[j] = pivot
        L[j, j] = 1.0
        if j + 1 < k:
            L[j + 1:, j] = w[1:] / pivot
    return L, d


def ldlh_solve(L: np.ndarray, d: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve (L diag(d) L^H) x = b by forward/diagonal/backward substitution."""
    k = L.shape[0]
    y = b.astype(complex).copy()
    for j in range(k):           # L y = b
        y[j + 1:] -= L[j + 1:, j] * y[j]
    y /= d                       # D z = y
    for j in range(k - 1, -1, -1):   # L^H x = z
        y[j] -= L[j + 1:, j].conj() @ y[j + 1:]
    return y


def combine_mr(H_hat: np.ndarray, D_k: np.ndarray, k: int) -> np.ndarray:
    """MR combining column: a copy of the estimate on the selected rows."""
    if len(D_k) == 0:
        raise ValueError("empty selection")
    col = np.zeros(H_hat.shape[0], dtype=complex)
    col[D_k] = H_hat[D_k, k]
    return col


def combine_zf(H_hat: np.ndarray, D_k: np.ndarray, k: int,
               rtol: float = ZF_PIVOT_RTOL) -> np.ndarray:
    """ZF combining column on the selected rows.

    Restricted to the rows in D_k, the result is the k-th column of
    Hk (Hk^H Hk)^{-1}, so v^H applied to the estimated channel of user j
    gives exactly delta_kj on those rows. The Gram system is solved via
    LDL^H with a pivot-magnitude singularity check.
    """
    m, n_users = H_hat.shape
    if len(D_k) < n_users:
        raise ZfInfeasibleError(
            f"ZF needs at least K={n_users} selected antennas, got {len(D_k)}")
    Hk = H_hat[D_k, :]
    G = Hk.conj().T @ Hk
    L, d = ldlh_factor(G, rtol)
    e_k = np.zeros(n_users)
    e_k[k] = 1.0
    x = ldlh_solve(L, d, e_k)
    col = np.zeros(m, dtype=complex)
    col[D_k] = Hk @ x
    return col


def precode(V: np.ndarray) -> np.ndarray:
    """Unit-norm conjugate of each combining column, same sparsity."""
    norms = np.linalg.norm(V, axis=0)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise ZeroCombinerError(f"combining column {bad} is zero")
    return V.conj() / norms


def build_selection(H_hat: np.ndarray, n: int, scheme: str) -> SelectionResult:
    """Run scoring, per-user top-n selection, combining and precoding."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    m, n_users = H_hat.shape
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= {m}, got n={n}")
    theta = hrnp_scores(H_hat)
    strength = selection_tiebreak(theta, H_hat)
    order = selection_order_ref(theta, strength)
    D = order[:n, :]
    V = np.zeros((m, n_users), dtype=complex)
    for k in range(n_users):
        if scheme == SCHEME_ZF:
            V[:, k] = combine_zf(H_hat, D[:, k], k)
        else:
            V[:, k] = combine_mr(H_hat, D[:, k], k)
    W = precode(V)
    union = np.unique(D)
    return SelectionResult(D=D, D_union=union, n_act=int(union.size),
                           V=V, W=W, scheme=scheme, n=n)
