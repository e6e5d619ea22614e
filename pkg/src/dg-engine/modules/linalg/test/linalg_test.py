import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ

from dg_errors import FieldMismatchError, NotAComplexError, ShapeMismatchError
from dg_linalg import (Field, GradedMap, GradedSpace, Subspace, compose_graded, graded_direct_sum, homology_dims,
                       kernel, lc_add, lc_sign, matrix, matmul, is_zero_matrix, quotient_basis, rank, same_field,
                       solve_linear)

Q = Field(0)
F5 = Field(5)


def vectors(field, rows):
    return [[field.convert(x) for x in row] for row in rows]


@pytest.mark.parametrize("text, characteristic", [('Q', 0), ('Fp 2', 2), ('Fp 5', 5), ('Fp 101', 101)])
def test_field_parse(text, characteristic):
    field = Field.parse(text)
    assert field.characteristic == characteristic
    assert field.name == text


@pytest.mark.parametrize("text", ['R', 'Fp', 'Fp 4', 'Fp x', 'Q 3'])
def test_field_parse_rejects(text):
    with pytest.raises(ValueError):
        Field.parse(text)


def test_field_scalars():
    assert Q.scalar(1, 2) == QQ(1, 2)
    assert F5.scalar(1, 2) * F5.scalar(2) == F5.one
    assert F5.format(F5.scalar(-1)) == '4'
    assert Q.format(Q.scalar(-3, 6)) == '-1/2'
    with pytest.raises(ZeroDivisionError):
        F5.scalar(1, 5)


def test_field_mixing_is_rejected():
    with pytest.raises(FieldMismatchError):
        same_field(Q, F5)


@pytest.mark.parametrize('field, value', [(F5, QQ(1, 2)), (F5, QQ(3)), (Q, F5.one)])
def test_convert_rejects_foreign_scalars(field, value):
    with pytest.raises(FieldMismatchError):
        field.convert(value)
    with pytest.raises(FieldMismatchError):
        matrix([[value]], 1, 1, field)


@pytest.mark.parametrize('field', [Q, F5])
def test_convert_accepts_ints_and_own_scalars(field):
    assert field.convert(7) == field.scalar(7)
    assert field.convert(field.scalar(1, 2)) == field.scalar(1, 2)
    assert F5.convert(7) == F5.scalar(2)


def test_sparse_combinations_drop_zeros():
    acc = lc_add({0: Q.one}, {0: -Q.one, 1: Q.scalar(2)})
    assert acc == {1: Q.scalar(2)}
    assert lc_sign({1: Q.one}, 3) == {1: -Q.one}
    assert lc_sign({1: Q.one}, 2) == {1: Q.one}


@pytest.mark.parametrize("field", [Q, F5])
def test_rank_and_kernel(field):
    m = matrix([[1, 2], [2, 4]], 2, 2, field)
    assert rank(m, field) == 1
    basis = kernel(m, field)
    assert len(basis) == 1
    assert is_zero_matrix(matmul(m, matrix([[v] for v in basis[0]], 2, 1, field)))


def test_rank_differs_by_characteristic():
    rows = [[1, 2], [3, 1]]
    assert rank(matrix(rows, 2, 2, Q), Q) == 2
    assert rank(matrix(rows, 2, 2, F5), F5) == 1


def test_solve_linear():
    m = matrix([[1, 1], [0, 1]], 2, 2, Q)
    assert solve_linear(m, [3, 1], Q) == [Q.scalar(2), Q.scalar(1)]
    assert solve_linear(matrix([[1], [1]], 2, 1, Q), [1, 2], Q) is None
    with pytest.raises(ShapeMismatchError):
        solve_linear(m, [1], Q)


def test_subspace_coordinates_and_complement():
    sub = Subspace(vectors(Q, [[1, 1, 0], [0, 0, 1]]), 3, Q)
    assert sub.dim == 2
    assert sub.complement == (1,)
    assert sub.contains(vectors(Q, [[2, 2, 5]])[0])
    assert sub.coordinates(vectors(Q, [[2, 2, 5]])[0]) == [Q.scalar(2), Q.scalar(5)]
    with pytest.raises(ValueError):
        sub.coordinates(vectors(Q, [[1, 0, 0]])[0])
    assert sub.quotient_coordinates(vectors(Q, [[1, 0, 0]])[0]) == [Q.scalar(-1)]


def test_quotient_basis():
    sub, representatives = quotient_basis(vectors(Q, [[1, -1, 0]]), 3, Q)
    assert sub.dim == 1
    assert representatives == (1, 2)


def two_term_complex(entry, field=Q):
    space = GradedSpace.from_degrees({0: ['a'], 1: ['b']})
    return GradedMap(space, space, 1, {0: matrix([[entry]], 1, 1, field)}, field)


@pytest.mark.parametrize("entry, expected", [(1, {0: 0, 1: 0}), (0, {0: 1, 1: 1})])
def test_homology_of_two_term_complex(entry, expected):
    assert homology_dims(two_term_complex(entry)) == expected


def test_homology_window_pads_zeros():
    assert homology_dims(two_term_complex(0), (-1, 2)) == {-1: 0, 0: 1, 1: 1, 2: 0}


def test_non_complex_is_rejected():
    space = GradedSpace.from_degrees({0: ['a'], 1: ['b'], 2: ['c']})
    d = GradedMap(space, space, 1, {0: matrix([[1]], 1, 1, Q), 1: matrix([[1]], 1, 1, Q)}, Q)
    assert not compose_graded(d, d).is_zero()
    with pytest.raises(NotAComplexError):
        homology_dims(d)


def test_graded_direct_sum_labels():
    v = GradedSpace.from_degrees({0: ['a']})
    w = GradedSpace.from_degrees({0: ['b'], 1: ['c']})
    total = graded_direct_sum(v, w)
    assert total.dim(0) == 2 and total.dim(1) == 1
    assert total.labels[0] == ('<a|0>', '<b|1>')


def test_block_shape_is_checked():
    space = GradedSpace.from_degrees({0: ['a'], 1: ['b']})
    with pytest.raises(ShapeMismatchError):
        GradedMap(space, space, 1, {0: matrix([[1, 0]], 1, 2, Q)}, Q)


small_matrices = st.integers(1, 4).flatmap(
    lambda ncols: st.lists(st.lists(st.integers(-3, 3), min_size=ncols, max_size=ncols), min_size=1, max_size=4))


@settings(max_examples=50, deadline=None)
@given(small_matrices, st.sampled_from([Q, F5, Field(2)]))
def test_rank_nullity(rows, field):
    m = matrix(rows, len(rows), len(rows[0]), field)
    assert rank(m, field) + len(kernel(m, field)) == len(rows[0])
    for v in kernel(m, field):
        assert is_zero_matrix(matmul(m, matrix([[x] for x in v], len(v), 1, field)))
