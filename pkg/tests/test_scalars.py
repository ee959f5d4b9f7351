from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcontact.scalars import (GaussianRational, MalformedScalarError, Matrix, format_scalar, gq,
                              gq_normalize, kernel_of_columns, matrix_inverse, parse_scalar,
                              rref_solve)

I = GaussianRational(0, 1)


def test_normalize_reduces_gcd():
    z = gq_normalize(2, 4, 0, 1)
    assert z.re == Fraction(1, 2) and z.im == 0


def test_normalize_sign():
    z = gq_normalize(0, 5, -3, -6)
    assert z.re == 0 and z.im == Fraction(1, 2)


def test_normalize_unit_modulus_point():
    z = gq_normalize(3, 5, 4, 5)
    assert z == gq("3/5+4/5*i")
    assert z.norm2() == 1


def test_zero_denominator_rejected():
    with pytest.raises(MalformedScalarError):
        gq_normalize(1, 0, 0, 1)
    with pytest.raises(MalformedScalarError):
        parse_scalar("1/0")


@pytest.mark.parametrize("text", ["0", "1", "-1", "i", "-i", "1/2", "3/5+4/5*i", "-2-7/3*i", "1/2*i"])
def test_text_round_trip(text):
    assert format_scalar(parse_scalar(text)) == text


@pytest.mark.parametrize("bad", ["", "1//2", "x", "1+2", "i*i", "1/2+"])
def test_malformed_text(bad):
    with pytest.raises(MalformedScalarError):
        parse_scalar(bad)


def test_i_squared():
    assert I * I == gq(-1)


def test_division():
    assert gq(2) / gq("1+i") == gq("1-i")


def test_rref_identity():
    r = rref_solve(Matrix.identity(3), [gq(1), I, gq(0)])
    assert r.consistent and r.solution == (gq(1), I, gq(0))
    assert r.kernel == ()


def test_rref_kernel_single_row():
    r = rref_solve(Matrix.from_rows([[1, 1]]))
    assert r.rank == 1
    assert r.kernel == ((gq(-1), gq(1)),)


def test_rref_kernel_gaussian():
    r = rref_solve(Matrix.from_rows([[1, I], [I, -1]]), [0, 0])
    assert r.rank == 1
    assert r.kernel == ((-I, gq(1)),)


def test_rref_inconsistent_is_data():
    r = rref_solve(Matrix.from_rows([[1, 0], [1, 0]]), [1, 2])
    assert not r.consistent and r.solution is None


def test_particular_solution_free_vars_zero():
    r = rref_solve(Matrix.from_rows([[1, 1, 1]]), [3])
    assert r.solution == (gq(3), gq(0), gq(0))


def test_matrix_inverse():
    A = Matrix.from_rows([[1, I], [0, 2]])
    assert A @ matrix_inverse(A) == Matrix.identity(2)
    with pytest.raises(ZeroDivisionError):
        matrix_inverse(Matrix.from_rows([[1, 1], [1, 1]]))


small = st.integers(-6, 6)
scalars = st.builds(lambda a, b, c, d: gq_normalize(a, b, c, d), small, st.integers(1, 5), small,
                    st.integers(1, 5))


@given(scalars, scalars)
def test_field_exactness(x, y):
    assert (x + y) - y == x
    if y:
        assert (x * y) / y == x


@given(scalars)
def test_text_round_trip_random(x):
    assert parse_scalar(format_scalar(x)) == x


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(scalars, min_size=4, max_size=4), min_size=1, max_size=4),
       st.lists(scalars, min_size=4, max_size=4))
def test_rref_certificates(rows, x0):
    A = Matrix.from_rows(rows)
    b = A.apply(x0)
    r1 = rref_solve(A, b)
    r2 = rref_solve(A, b)
    assert r1 == r2
    assert r1.consistent
    assert A.apply(r1.solution) == b
    for v in r1.kernel:
        assert not any(A.apply(v))
    assert r1.rank + len(r1.kernel) == 4


def test_kernel_of_columns_matches_rref():
    cols = [[1, 0], [0, 1], [1, 1]]
    ker = kernel_of_columns(cols, 2)
    assert ker == ((gq(-1), gq(-1), gq(1)),)
