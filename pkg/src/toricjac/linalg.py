"""Exact linear algebra over Q and over prime fields, plus Smith normal form.

Every routine takes a ``modulus`` argument. ``None`` means exact arithmetic
over the rationals (fraction-free elimination on primitive integer rows);
a prime ``p < 2**31`` means arithmetic in GF(p) through the compiled row
reduction kernel, or its numpy fallback when the extension is not built.

Reduced row echelon forms are canonical, so kernel bases are reproducible
and independent of the pivoting strategy, in both modes.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

try:
    from toricjac._modp import rref_mod as _rref_mod_compiled
except ImportError:  # pragma: no cover - depends on the build
    _rref_mod_compiled = None
from toricjac._modp_py import rref_mod as _rref_mod_python

#: Primes just below 2**31; products of two residues fit in int64.
DEFAULT_PRIMES = (2147483647, 2147483629, 2147483587)
DEFAULT_PRIME = DEFAULT_PRIMES[0]

BACKEND = "compiled" if _rref_mod_compiled is not None else "python"


def set_backend(name: str) -> None:
    """Select the GF(p) row reduction kernel: ``"compiled"`` or ``"python"``."""
    global BACKEND
    if name == "compiled" and _rref_mod_compiled is None:
        raise RuntimeError("compiled kernel toricjac._modp is not built")
    if name not in ("compiled", "python"):
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def rref_mod(A: np.ndarray, p: int) -> list[int]:
    """In-place GF(p) reduced row echelon form of an int64 array; returns pivots."""
    if BACKEND == "compiled":
        return _rref_mod_compiled(A, p)
    return _rref_mod_python(A, p)


class RationalMatrix:
    """Sparse matrix with exact rational entries.

    ``entries`` maps ``(row, col)`` to a nonzero :class:`~fractions.Fraction`.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] = ()):
        self.rows = rows
        self.cols = cols
        self.entries: dict[tuple[int, int], Fraction] = {}
        for (i, j), value in dict(entries).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry {(i, j)} outside {rows}x{cols}")
            value = Fraction(value)
            if value:
                self.entries[i, j] = value

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]]) -> "RationalMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        return cls(rows, cols, {(i, j): x for i, row in enumerate(data) for j, x in enumerate(row) if x})

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, object]]) -> "RationalMatrix":
        """Build from a list of sparse columns ``{row: value}``."""
        return cls(rows, len(columns), {(i, j): x for j, col in enumerate(columns) for i, x in col.items()})

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __repr__(self) -> str:
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, {(j, i): x for (i, j), x in self.entries.items()})

    T = property(transpose)

    def dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def select_rows(self, rows: Sequence[int]) -> "RationalMatrix":
        position = {r: k for k, r in enumerate(rows)}
        return RationalMatrix(
            len(rows), self.cols,
            {(position[i], j): x for (i, j), x in self.entries.items() if i in position},
        )

    def hstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if other.rows != self.rows:
            raise ValueError("row counts differ")
        entries = dict(self.entries)
        entries.update({(i, j + self.cols): x for (i, j), x in other.entries.items()})
        return RationalMatrix(self.rows, self.cols + other.cols, entries)

    def apply(self, vector: Sequence[object]) -> list[Fraction]:
        out = [Fraction(0)] * self.rows
        for (i, j), x in self.entries.items():
            out[i] += x * vector[j]
        return out

    def to_modp(self, p: int) -> np.ndarray:
        """Dense int64 image in GF(p); raises if ``p`` divides a denominator."""
        A = np.zeros((self.rows, self.cols), dtype=np.int64)
        for (i, j), x in self.entries.items():
            A[i, j] = to_residue(x, p)
        return A


def to_residue(x: object, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def _as_matrix(A) -> RationalMatrix:
    if isinstance(A, RationalMatrix):
        return A
    return RationalMatrix.from_dense(A)


# -- exact elimination ------------------------------------------------------

def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for x in row.values():
        g = math.gcd(g, x)
        if g == 1:
            return row
    return {j: x // g for j, x in row.items()}


def _integer_rows(A: RationalMatrix) -> list[dict[int, int]]:
    """Rows scaled to primitive integer vectors (row space unchanged)."""
    out = []
    for row in A.row_dicts():
        if not row:
            continue
        denom = 1
        for x in row.values():
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
        out.append(_primitive({j: int(x * denom) for j, x in row.items()}))
    return out


def _echelon_exact(A: RationalMatrix) -> dict[int, dict[int, int]]:
    """Fraction-free row echelon form as ``{pivot column: primitive row}``.

    Each incoming row is reduced against the existing pivots by integer
    cross-multiplication; every pivot row keeps its leading entry at its
    pivot column. Primitive normalisation keeps entries at the size of the
    corresponding minors, as in Bareiss elimination.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in _integer_rows(A):
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                if row[c] < 0:
                    row = {j: -x for j, x in row.items()}
                pivots[c] = row
                break
            a, b = prow[c], row[c]
            g = math.gcd(a, b)
            a, b = a // g, b // g
            new = {j: a * x for j, x in row.items()}
            for j, x in prow.items():
                v = new.get(j, 0) - b * x
                if v:
                    new[j] = v
                else:
                    new.pop(j, None)
            row = _primitive(new) if new else new
    return pivots


def _rref_exact(A: RationalMatrix) -> tuple[list[dict[int, Fraction]], list[int]]:
    pivots = _echelon_exact(A)
    cols = sorted(pivots)
    # back substitution from the last pivot upward
    for idx in range(len(cols) - 1, -1, -1):
        c = cols[idx]
        prow = pivots[c]
        for upper in cols[:idx]:
            row = pivots[upper]
            b = row.get(c)
            if not b:
                continue
            a = prow[c]
            g = math.gcd(a, b)
            a, b = a // g, b // g
            new = {j: a * x for j, x in row.items()}
            for j, x in prow.items():
                v = new.get(j, 0) - b * x
                if v:
                    new[j] = v
                else:
                    new.pop(j, None)
            pivots[upper] = _primitive(new)
    rows = []
    for c in cols:
        row = pivots[c]
        lead = row[c]
        rows.append({j: Fraction(x, lead) for j, x in row.items()})
    return rows, cols


# -- public interface ---------------------------------------------------------

def rref(A, modulus: int | None = None):
    """Reduced row echelon form ``(rows, pivots)``.

    Over Q the rows are sparse ``{col: Fraction}`` dicts; over GF(p) they are
    the first ``rank`` rows of a dense int64 array.
    """
    A = _as_matrix(A)
    if modulus is None:
        return _rref_exact(A)
    M = A.to_modp(modulus)
    pivots = rref_mod(M, modulus)
    return M[: len(pivots)], pivots


def rank(A, modulus: int | None = None) -> int:
    A = _as_matrix(A)
    if not A.entries:
        return 0
    if modulus is None:
        return len(_echelon_exact(A))
    M = A.to_modp(modulus)
    if M.shape[0] > M.shape[1]:
        M = np.ascontiguousarray(M.T)
    return len(rref_mod(M, modulus))


def rank_modular(A, primes: Iterable[int] = DEFAULT_PRIMES, certify: bool = False) -> int:
    """Largest rank over several prime fields (a lower bound for the rank over Q).

    With ``certify=True`` the exact rank is computed as well and a mismatch
    raises :class:`ArithmeticError`.
    """
    A = _as_matrix(A)
    r = max(rank(A, p) for p in primes)
    if certify:
        exact = rank(A)
        if exact != r:
            raise ArithmeticError(f"modular rank {r} differs from exact rank {exact}")
    return r


def kernel_basis(A, modulus: int | None = None) -> list[list]:
    """Canonical basis of the right null space, one vector per free column."""
    A = _as_matrix(A)
    n = A.cols
    if modulus is None:
        rows, pivots = _rref_exact(A)
        free = [j for j in range(n) if j not in set(pivots)]
        basis = []
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for row, c in zip(rows, pivots):
                x = row.get(f)
                if x:
                    v[c] = -x
            basis.append(v)
        return basis
    K = kernel_matrix_mod(A.to_modp(modulus), modulus)
    return [[int(x) for x in col] for col in K.T]


def kernel_matrix_mod(M: np.ndarray, p: int) -> np.ndarray:
    """Columns span the right kernel of the int64 matrix ``M`` over GF(p)."""
    M = np.array(M, dtype=np.int64, copy=True, order="C")
    n = M.shape[1]
    pivots = rref_mod(M, p)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    K = np.zeros((n, len(free)), dtype=np.int64)
    if free:
        K[free, np.arange(len(free))] = 1
        if pivots:
            K[pivots, :] = (-M[: len(pivots)][:, free]) % p
    return K


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """``A @ B mod p`` for residues below 2**31 without int64 overflow."""
    if A.shape[1] > 1 << 15:
        raise ValueError("inner dimension too large for limb splitting")
    lo = B & 0xFFFF
    hi = B >> 16
    out = (A @ hi) % p
    out = (out * (1 << 16)) % p
    return (out + (A @ lo) % p) % p


def colspace_intersect_coords(A, keep: Iterable[int], modulus: int | None = None):
    """Dimension and basis of ``{v in colspace(A) : v_i = 0 for i not in keep}``.

    Computed as the image under ``A`` of the kernel of the complementary row
    block. Basis vectors are full-length columns (zero outside ``keep``).
    """
    A = _as_matrix(A)
    keep = set(keep)
    outside = [i for i in range(A.rows) if i not in keep]
    if modulus is None:
        K = kernel_basis(A.select_rows(outside)) if outside else [
            [Fraction(int(i == j)) for i in range(A.cols)] for j in range(A.cols)
        ]
        images = [A.apply(v) for v in K]
        span_rows, _ = _rref_exact(RationalMatrix.from_dense(images)) if images else ([], [])
        basis = [[row.get(i, Fraction(0)) for i in range(A.rows)] for row in span_rows]
        return len(basis), basis
    M = A.to_modp(modulus)
    if outside:
        K = kernel_matrix_mod(M[outside], modulus)
    else:
        K = np.eye(A.cols, dtype=np.int64)
    if K.shape[1] == 0:
        return 0, []
    images = np.ascontiguousarray(matmul_mod(M, K, modulus).T)
    pivots = rref_mod(images, modulus)
    basis = [[int(x) for x in row] for row in images[: len(pivots)]]
    return len(basis), basis


def span_rank(vectors: Sequence[Sequence[object]], modulus: int | None = None) -> int:
    """Rank of a list of equal-length vectors."""
    if not vectors:
        return 0
    if modulus is None:
        return rank(RationalMatrix.from_dense(vectors))
    M = np.array([[to_residue(x, modulus) for x in v] for v in vectors], dtype=np.int64)
    if M.shape[0] > M.shape[1]:
        M = np.ascontiguousarray(M.T)
    return len(rref_mod(M, modulus))


# -- integer matrices ---------------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]]):
    """Smith normal form of an integer matrix.

    Returns ``(invariants, U, V, D)`` with ``U @ A @ V == D`` exactly, ``U`` and
    ``V`` unimodular, ``D`` diagonal with ``d1 | d2 | ...``. ``invariants`` is
    the list of nonzero diagonal entries.
    """
    D = [[int(x) for x in row] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    U = _identity(m)
    V = _identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row dst += c * row src
        D[dst] = [x + c * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):  # col dst += c * col src
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        nonzero = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pull in any entry the pivot does not divide
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    invariants = [D[i][i] for i in range(min(m, n)) if D[i][i]]
    return invariants, U, V, D


def integer_det(A: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    M = [[int(x) for x in row] for row in A]
    n = len(M)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank_mod_array(M: np.ndarray, p: int) -> int:
    """Rank over GF(p) of an int64 residue array (the input is not modified)."""
    if M.size == 0:
        return 0
    M = np.array(M.T if M.shape[0] > M.shape[1] else M, dtype=np.int64, order="C")
    return len(rref_mod(M, p))


def residues(vectors: Sequence[Sequence[object]], p: int) -> np.ndarray:
    """Int64 array of residues of rational vectors, one vector per row."""
    return np.array([[to_residue(x, p) for x in v] for v in vectors], dtype=np.int64).reshape(len(vectors), -1)
