from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distblock.exact_linalg import (
    DimensionError,
    ExactMatrix,
    SingularMatrixError,
    aI_bJ,
    adjugate,
    block_assemble,
    cofactor_sum,
    determinant,
    dumps,
    inv_aI_bJ,
    inverse,
    matrix_from_json,
    outer,
    schur_block_inverse,
    schur_complement,
)


def square(max_n=6, lo=-4, hi=4):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


def hilbert(n):
    return ExactMatrix.from_function(n, n, lambda i, j: F(1, i + j + 1))


def test_small_determinants():
    assert determinant(ExactMatrix([[1, 2], [3, 4]])) == -2
    assert determinant(ExactMatrix.identity(5)) == 1
    assert determinant(ExactMatrix.zeros(0, 0)) == 1
    # 1/det(H_3) = 2160
    assert determinant(hilbert(3)) == F(1, 2160)


def test_rational_entries_scale_back():
    A = ExactMatrix([["1/2", "1/3"], ["1/4", "1/5"]])
    assert determinant(A) == F(1, 10) - F(1, 12)


@settings(max_examples=60, deadline=None)
@given(square(7))
def test_bareiss_matches_flint(rows):
    A = ExactMatrix(rows)
    assert determinant(A, backend="bareiss") == determinant(A, backend="flint")


@settings(max_examples=60, deadline=None)
@given(square(6))
def test_inverse_backends_agree(rows):
    A = ExactMatrix(rows)
    if determinant(A) == 0:
        with pytest.raises(SingularMatrixError):
            inverse(A, backend="gauss")
        with pytest.raises(SingularMatrixError):
            inverse(A, backend="flint")
        return
    Ai = inverse(A, backend="gauss")
    assert Ai == inverse(A, backend="flint")
    assert A @ Ai == ExactMatrix.identity(A.rows)


def test_hilbert_inverse_is_integral():
    Hi = inverse(hilbert(4))
    assert Hi.is_integer()
    assert Hi[0, 0] == 16 and Hi[3, 3] == 2800


def test_adjugate_2x2():
    assert adjugate(ExactMatrix([[1, 2], [3, 4]])) == ExactMatrix([[4, -2], [-3, 1]])
    assert adjugate(ExactMatrix([[7]])) == ExactMatrix([[1]])


@settings(max_examples=60, deadline=None)
@given(square(5, -2, 2))
def test_adjugate_identity_and_cofactor_sum(rows):
    A = ExactMatrix(rows)
    adj = adjugate(A)
    assert A @ adj == ExactMatrix.scalar(A.rows, determinant(A))
    assert cofactor_sum(A) == adj.entry_sum()


def test_cofactor_sum_singular():
    # rank one: every 2x2 minor vanishes, so only 1x1 case is nonzero
    assert cofactor_sum(ExactMatrix.ones(3)) == 0
    assert cofactor_sum(ExactMatrix([[0, 1], [1, 0]])) == -2
    assert cofactor_sum(ExactMatrix([[0, 1, 1], [1, 0, 1], [1, 1, 0]])) == 3


def test_aI_bJ_inverse():
    for n, a, b in [(1, 2, 3), (4, F(1, 2), -1), (5, -3, F(2, 7))]:
        assert aI_bJ(n, a, b) @ inv_aI_bJ(n, a, b) == ExactMatrix.identity(n)
    with pytest.raises(SingularMatrixError):
        inv_aI_bJ(3, 3, -1)


def test_schur():
    A = ExactMatrix([[4, 1, 2], [1, 3, 0], [2, 0, 5]])
    assert schur_block_inverse(A, 1) == inverse(A)
    assert schur_block_inverse(A, 2) == inverse(A)
    S = schur_complement(A, 1)
    assert determinant(A) == S[0, 0] * determinant(A.block(1, 3, 1, 3))


def test_block_assemble_with_empty_blocks():
    a = ExactMatrix.ones(2, 2)
    e = ExactMatrix.zeros(2, 0)
    M = block_assemble([[a, e], [ExactMatrix.zeros(0, 2), ExactMatrix.zeros(0, 0)]])
    assert M == a
    with pytest.raises(DimensionError):
        block_assemble([[a, ExactMatrix.ones(3, 1)]])


def test_arithmetic_and_shapes():
    A = ExactMatrix([[1, 2, 3]])
    assert A.T.shape == (3, 1)
    assert (A @ A.T) == ExactMatrix([[14]])
    assert outer([1, 2], [3, 4]) == ExactMatrix([[3, 4], [6, 8]])
    with pytest.raises(DimensionError):
        A @ A
    with pytest.raises(DimensionError):
        determinant(A)


def test_json_roundtrip():
    A = ExactMatrix([[F(1, 2), -3], [0, F(-7, 9)]])
    assert dumps(A) == '[["1/2","-3"],["0","-7/9"]]'
    assert matrix_from_json(dumps(A)) == A
