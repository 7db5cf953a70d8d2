# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Row reduction over GF(p), p < 2**31, on C-contiguous int64 matrices."""

import numpy as np
from libc.stdint cimport int64_t


cdef inline int64_t _inverse(int64_t a, int64_t p):
    cdef int64_t t = 0, new_t = 1, r = p, new_r = a, q, tmp
    while new_r != 0:
        q = r // new_r
        tmp = t - q * new_t
        t = new_t
        new_t = tmp
        tmp = r - q * new_r
        r = new_r
        new_r = tmp
    if t < 0:
        t += p
    return t


def rref_mod(int64_t[:, ::1] A, int64_t p):
    """Reduce ``A`` in place to reduced row echelon form mod ``p``.

    Entries must already lie in ``[0, p)``. Returns the pivot columns.
    """
    cdef Py_ssize_t m = A.shape[0], n = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, t, piv, nnz
    cdef int64_t inv, f, tmp
    cdef int64_t[::1] nz = np.empty(max(n, 1), dtype=np.int64)
    pivots = []
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                tmp = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = tmp
        inv = _inverse(A[r, c], p)
        nnz = 0
        for j in range(c, n):
            if A[r, j] != 0:
                A[r, j] = (A[r, j] * inv) % p
                nz[nnz] = j
                nnz += 1
        for i in range(m):
            if i == r:
                continue
            f = A[i, c]
            if f == 0:
                continue
            f = p - f
            for t in range(nnz):
                j = nz[t]
                A[i, j] = (A[i, j] + f * A[r, j]) % p
        pivots.append(c)
        r += 1
    return pivots
