# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-realization kernels: greedy selection order, row-restricted
MR/ZF combining via an LDL^H Gram solve, and the cross-gain products.

Same contract as the numpy fallback in _ref.py; see that module for the
interface documentation.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "native"


def selection_order_greedy(double[:, ::1] theta, double[:, ::1] strength):
    """Greedy repeated argmax per user over (theta, strength), first index
    wins ties. Returns the full (M, K) priority order.

    O(M^2) per user; the sort-based route in _ref is faster and produces
    the identical order, so this serves as an independent cross-check of
    the ordering rule rather than as the dispatched implementation."""
    cdef Py_ssize_t m = theta.shape[0]
    cdef Py_ssize_t k = theta.shape[1]
    out_arr = np.empty((m, k), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    taken_arr = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] taken = taken_arr
    cdef Py_ssize_t j, step, i, best
    cdef double bt, bs
    for j in range(k):
        for i in range(m):
            taken[i] = 0
        for step in range(m):
            best = -1
            bt = 0.0
            bs = 0.0
            for i in range(m):
                if taken[i]:
                    continue
                if best < 0 or theta[i, j] > bt or \
                        (theta[i, j] == bt and strength[i, j] > bs):
                    best = i
                    bt = theta[i, j]
                    bs = strength[i, j]
            taken[best] = 1
            out[step, j] = best
    return out_arr


def evaluate_selection(double complex[:, ::1] H,
                       double complex[:, ::1] H_hat,
                       cnp.int64_t[:, ::1] order,
                       Py_ssize_t n, bint use_zf, double pivot_rtol):
    cdef Py_ssize_t m = H.shape[0]
    cdef Py_ssize_t k = H.shape[1]
    cdef Py_ssize_t uk, a, b, r, j, i

    P_arr = np.zeros((k, k), dtype=np.complex128)
    cdef double complex[:, ::1] P = P_arr
    vn2_arr = np.zeros(k, dtype=np.float64)
    cdef double[::1] vn2 = vn2_arr
    active_arr = np.zeros(m, dtype=np.uint8)
    cdef cnp.uint8_t[::1] active = active_arr

    hk_arr = np.empty((n, k), dtype=np.complex128)
    cdef double complex[:, ::1] hk = hk_arr
    gram_arr = np.empty((k, k), dtype=np.complex128)
    cdef double complex[:, ::1] gram = gram_arr
    piv_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] piv = piv_arr
    x_arr = np.empty(k, dtype=np.complex128)
    cdef double complex[::1] x = x_arr
    v_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] v = v_arr

    cdef double complex acc, lij
    cdef double tol, maxdiag, pivot, nrm2
    cdef Py_ssize_t row, n_act

    if use_zf and n < k:
        return None, None, 0, False

    for uk in range(k):
        if use_zf:
            # gather the selected rows of the estimate
            for r in range(n):
                row = order[r, uk]
                for a in range(k):
                    hk[r, a] = H_hat[row, a]
            # Hermitian Gram of the restricted estimate, upper then mirror
            maxdiag = 0.0
            for a in range(k):
                for b in range(a, k):
                    acc = 0
                    for r in range(n):
                        acc = acc + hk[r, a].conjugate() * hk[r, b]
                    gram[a, b] = acc
                    if b > a:
                        gram[b, a] = acc.conjugate()
                if gram[a, a].real > maxdiag:
                    maxdiag = gram[a, a].real
            # in-place LDL^H: pivots on the diagonal, multipliers below
            tol = pivot_rtol * maxdiag
            for j in range(k):
                acc = gram[j, j]
                for a in range(j):
                    acc = acc - gram[j, a] * gram[j, a].conjugate() * piv[a]
                pivot = acc.real
                if (pivot if pivot >= 0.0 else -pivot) <= tol:
                    return None, None, 0, False
                piv[j] = pivot
                for i in range(j + 1, k):
                    acc = gram[i, j]
                    for a in range(j):
                        acc = acc - gram[i, a] * gram[j, a].conjugate() * piv[a]
                    gram[i, j] = acc / pivot
            # solve (L D L^H) x = e_uk
            for a in range(k):
                x[a] = 1.0 if a == uk else 0.0
            for j in range(k):
                for i in range(j + 1, k):
                    x[i] = x[i] - gram[i, j] * x[j]
            for j in range(k):
                x[j] = x[j] / piv[j]
            for j in range(k - 1, -1, -1):
                acc = x[j]
                for i in range(j + 1, k):
                    acc = acc - gram[i, j].conjugate() * x[i]
                x[j] = acc
            # combiner on the selected rows
            for r in range(n):
                acc = 0
                for a in range(k):
                    acc = acc + hk[r, a] * x[a]
                v[r] = acc
        else:
            for r in range(n):
                v[r] = H_hat[order[r, uk], uk]
        nrm2 = 0.0
        for r in range(n):
            nrm2 += v[r].real * v[r].real + v[r].imag * v[r].imag
        if nrm2 == 0.0:
            return None, None, 0, False
        vn2[uk] = nrm2
        for i in range(k):
            acc = 0
            for r in range(n):
                acc = acc + H[order[r, uk], i].conjugate() * v[r]
            P[i, uk] = acc
        for r in range(n):
            active[order[r, uk]] = 1

    n_act = 0
    for i in range(m):
        if active[i]:
            n_act += 1
    return P_arr, vn2_arr, n_act, True
