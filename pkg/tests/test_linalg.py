import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsdcodes.errors import DimensionMismatch
from hsdcodes.field import field_from_order
from hsdcodes.linalg import (
    Matrix,
    all_ones,
    conj_matrix,
    diag,
    echelon_form,
    hermitian_gram,
    hermitian_inner,
    hstack,
    identity,
    in_row_space,
    inverse,
    is_unitary,
    kernel,
    matrix_power,
    permutation_matrix,
    rank,
    right_inverse,
    right_kernel_hermitian,
    row_space_equal,
    transpose,
    vstack,
)

F9 = field_from_order(9)


def rand_matrix(F, r, c, seed):
    rng = np.random.default_rng(seed)
    return Matrix(F, rng.integers(0, F.order, size=(r, c)))


@st.composite
def matrices(draw, F=F9, max_rows=5, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    data = draw(st.lists(st.integers(0, F.order - 1), min_size=r * c, max_size=r * c))
    return Matrix(F, np.array(data, dtype=np.int64).reshape(r, c))


def test_identity_and_ones():
    assert identity(F9, 1) == Matrix.parse(F9, [["1"]])
    assert all_ones(F9, 2) == Matrix.parse(F9, [["1", "1"], ["1", "1"]])
    J = all_ones(F9, 4)
    assert J @ J == J * F9(4)


@given(matrices())
def test_block_and_involution_laws(A):
    assert identity(F9, A.rows) @ A == A
    assert conj_matrix(conj_matrix(A)) == A
    B = rand_matrix(F9, A.rows, 3, A.cols)
    assert transpose(hstack(A, B)) == vstack(transpose(A), transpose(B))


@given(matrices())
def test_echelon_spans_same_space(A):
    E, r, piv = echelon_form(A)
    assert r == len(piv) == rank(A)
    top = Matrix(F9, E.a[:r]) if r else None
    if r:
        assert row_space_equal(A, top)
        # pivots normalised to 1 and cleared above and below
        for i, j in enumerate(piv):
            col = E.a[:r, j]
            assert col[i] == 0 and all(c == F9.zero_code for k, c in enumerate(col) if k != i)
    assert r + kernel(A).rows == A.cols


def test_echelon_simple_cases():
    E, r, piv = echelon_form(identity(F9, 4))
    assert E == identity(F9, 4) and r == 4 and piv == [0, 1, 2, 3]
    assert echelon_form(all_ones(F9, 4))[1] == 1


def test_row_space_oracle_random_4x6():
    # membership checked by solving x A = v for every row of each side
    A = rand_matrix(F9, 4, 6, 7)
    E, r, _ = echelon_form(A)
    for i in range(A.rows):
        assert in_row_space(Matrix(F9, E.a[:r]), Matrix(F9, A.a[i : i + 1]))
    for i in range(r):
        assert in_row_space(A, Matrix(F9, E.a[i : i + 1]))


def test_right_kernel_hermitian():
    assert right_kernel_hermitian(identity(F9, 3)).rows == 0
    F4 = field_from_order(4)
    M = Matrix.parse(F4, [["1", "1"]])
    K = right_kernel_hermitian(M)
    assert K.rows == 1
    assert hermitian_inner(F4, M.a[0], K.a[0]) == F4.zero_code
    A = rand_matrix(F9, 3, 6, 11)
    K = right_kernel_hermitian(A)
    assert K.rows == 6 - rank(A)
    assert hermitian_gram(A, K).is_zero()


def test_unitary_predicate():
    assert is_unitary(identity(F9, 5))
    assert is_unitary(permutation_matrix(F9, [2, 0, 3, 1]))
    assert not is_unitary(diag(F9, [F9.omega, F9.one]))


def test_inverse_and_right_inverse():
    A = rand_matrix(F9, 4, 4, 3)
    while rank(A) < 4:
        A = rand_matrix(F9, 4, 4, int(A.a.sum()))
    assert A @ inverse(A) == identity(F9, 4)
    R = rand_matrix(F9, 2, 5, 5)
    assert R @ right_inverse(R) == identity(F9, 2)
    assert matrix_power(A, 3) == A @ A @ A
    assert matrix_power(A, 0) == identity(F9, 4)


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        identity(F9, 2) @ identity(F9, 3)
