from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_rank, sympy_snf_invariants
from toricjac import linalg
from toricjac._modp_py import rref_mod as rref_python

P = linalg.DEFAULT_PRIME

small_ints = st.integers(min_value=-6, max_value=6)


def matrices(max_rows=6, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@given(matrices())
@settings(max_examples=80, deadline=None)
def test_exact_rank_matches_textbook_elimination(rows):
    assert linalg.rank(rows) == dense_rank(rows)


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_modular_rank_equals_exact_rank_for_small_entries(rows):
    assert linalg.rank(rows, P) == linalg.rank(rows)
    assert linalg.rank_modular(rows, certify=True) == linalg.rank(rows)


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_kernel_basis_is_a_basis_of_the_null_space(rows):
    A = linalg.RationalMatrix.from_dense(rows)
    basis = linalg.kernel_basis(A)
    assert len(basis) == A.cols - linalg.rank(A)
    for v in basis:
        assert all(x == 0 for x in A.apply(v))
    if basis:
        assert linalg.rank(basis) == len(basis)


@given(matrices())
@settings(max_examples=40, deadline=None)
def test_modular_kernel_annihilates(rows):
    A = linalg.RationalMatrix.from_dense(rows)
    K = linalg.kernel_matrix_mod(A.to_modp(P), P)
    assert K.shape[1] == A.cols - linalg.rank(A, P)
    assert not (linalg.matmul_mod(A.to_modp(P), K, P)).any()


def test_rref_exact_is_canonical():
    rows, pivots = linalg.rref([[2, 4, 6], [1, 2, 4]])
    assert pivots == [0, 2]
    assert rows[0] == {0: Fraction(1), 1: Fraction(2)}
    assert rows[1] == {2: Fraction(1)}


def test_rref_over_field_and_rationals_agree():
    A = [[3, 1, 4, 1], [5, 9, 2, 6], [8, 10, 6, 7]]
    exact_rows, exact_piv = linalg.rref(A)
    mod_rows, mod_piv = linalg.rref(A, P)
    assert exact_piv == list(mod_piv)
    for er, mr in zip(exact_rows, mod_rows):
        assert [linalg.to_residue(er.get(j, Fraction(0)), P) for j in range(4)] == list(mr)


def test_to_residue_rejects_denominator_divisible_by_p():
    assert linalg.to_residue(Fraction(1, 2), 7) == 4
    with pytest.raises(ZeroDivisionError):
        linalg.to_residue(Fraction(1, 7), 7)


@pytest.mark.skipif(linalg._rref_mod_compiled is None, reason="compiled kernel not built")
def test_compiled_and_numpy_kernels_agree():
    rng = np.random.default_rng(3)
    for shape in [(5, 9), (20, 12), (40, 40)]:
        A = rng.integers(0, P, size=shape, dtype=np.int64)
        A[:, 3] = (A[:, 0] + 2 * A[:, 1]) % P
        B = A.copy()
        assert list(linalg._rref_mod_compiled(A, P)) == list(rref_python(B, P))
        assert np.array_equal(A, B)


def test_backend_switch(monkeypatch):
    monkeypatch.setattr(linalg, "BACKEND", linalg.BACKEND)
    linalg.set_backend("python")
    assert linalg.rank([[1, 2], [2, 4]], P) == 1
    with pytest.raises(ValueError):
        linalg.set_backend("fortran")


def test_matmul_mod_matches_python_integers():
    rng = np.random.default_rng(5)
    A = rng.integers(0, P, size=(7, 30), dtype=np.int64)
    B = rng.integers(0, P, size=(30, 4), dtype=np.int64)
    expected = [[sum(int(A[i, t]) * int(B[t, j]) for t in range(30)) % P for j in range(4)] for i in range(7)]
    assert linalg.matmul_mod(A, B, P).tolist() == expected


@given(matrices(4, 5))
@settings(max_examples=60, deadline=None)
def test_smith_normal_form_against_sympy(rows):
    invariants, U, V, D = linalg.smith_normal_form(rows)
    A = np.array(rows, dtype=object)
    assert (np.array(U, dtype=object) @ A @ np.array(V, dtype=object)).tolist() == D
    assert abs(linalg.integer_det(U)) == 1 and abs(linalg.integer_det(V)) == 1
    assert invariants == sympy_snf_invariants(rows)
    assert all(b % a == 0 for a, b in zip(invariants, invariants[1:]))


def test_integer_det():
    assert linalg.integer_det([[2, 1], [7, 4]]) == 1
    assert linalg.integer_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3
    assert linalg.integer_det([[0, 1], [1, 0]]) == -1


def test_colspace_intersection_keeps_only_selected_rows():
    # columns (1,1,0) and (0,1,1): the only combination vanishing on row 0 is a multiple of column 2
    A = [[1, 0], [1, 1], [0, 1]]
    dim, basis = linalg.colspace_intersect_coords(A, [1, 2])
    assert dim == 1
    assert basis[0][0] == 0 and basis[0][1] == basis[0][2] != 0
