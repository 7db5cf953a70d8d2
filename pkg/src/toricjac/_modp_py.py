"""Numpy fallback for the compiled GF(p) row reduction in ``_modp.pyx``."""

import numpy as np


def rref_mod(A, p):
    """Reduce ``A`` in place to reduced row echelon form mod ``p``.

    Entries must already lie in ``[0, p)`` and ``p < 2**31`` so that every
    product fits in int64. Returns the pivot columns.
    """
    m, n = A.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        below = np.flatnonzero(A[r:, c])
        if below.size == 0:
            continue
        piv = r + int(below[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r, c:] = A[r, c:] * inv % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            cols = c + np.flatnonzero(A[r, c:])
            block = A[np.ix_(rows, cols)]
            block -= np.outer(col[rows], A[r, cols]) % p
            block %= p
            A[np.ix_(rows, cols)] = block
        pivots.append(c)
        r += 1
    return pivots
