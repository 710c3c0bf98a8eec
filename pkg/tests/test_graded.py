from fractions import Fraction

import pytest

from pnrec.graded import (
    TableMismatchError,
    TruncationWindow,
    UnknownVariableError,
    Variable,
    VariableTable,
    check_homogeneous,
    mul,
    normalize_monomial,
    partial_derivative,
    truncate,
)
from pnrec.parser import parse_expression

T = VariableTable([
    Variable("q1", "q", 0, kappa=1, orbit_index=1),
    Variable("q2", "q", 0, kappa=2, orbit_index=2),
    Variable("q3", "q", 0, kappa=3, orbit_index=3),
    Variable("q5", "q", 0, kappa=5, orbit_index=5),
    Variable("q9", "q", 0, kappa=9, orbit_index=9),
    Variable("th1", "tau", 1),
    Variable("th2", "tau", 1),
    Variable("t1", "t", 0),
])


def P(text):
    return parse_expression(text, T)


def test_normalize_odd_swap():
    mono, sign = normalize_monomial([("th2", 1), ("th1", 1)], T)
    assert sign == -1
    assert mono == normalize_monomial([("th1", 1), ("th2", 1)], T)[0]


def test_normalize_odd_square():
    assert normalize_monomial([("th1", 1), ("th1", 1)], T)[1] == 0


def test_normalize_even_moves_free():
    mono, sign = normalize_monomial([("q2", 1), ("th1", 1), ("q1", 1)], T)
    assert sign == 1
    assert P("q1*q2*th1").terms == {mono: 1}


def test_normalize_unknown():
    with pytest.raises(UnknownVariableError):
        normalize_monomial([("nope", 1)], T)


def test_mul_examples():
    f = P("3*q1 + th1")
    assert mul(T.one(), f) == f
    assert P("th1") * P("th2") == P("th1*th2")
    assert P("th2") * P("th1") == -P("th1*th2")
    assert P("q1 + th1") * P("q1 - th1") == P("q1^2")


def test_mul_table_mismatch():
    other = VariableTable([Variable("q1", "q")])
    with pytest.raises(TableMismatchError):
        mul(P("q1"), other.var("q1"))


def test_zero_is_empty():
    assert (P("q1") - P("q1")).terms == {}
    assert P("0") == T.zero()


def test_partial_derivative_examples():
    assert partial_derivative(P("q1^2*q2"), "q1") == P("2*q1*q2")
    assert partial_derivative(P("th1*th2"), "th1") == P("th2")
    assert partial_derivative(P("th1*th2"), "th2") == -P("th1")


def test_partial_derivative_unknown():
    with pytest.raises(UnknownVariableError):
        partial_derivative(P("q1"), "zz")


def test_truncate_examples():
    assert truncate(P("q1*q9"), TruncationWindow(8)).is_zero()
    assert truncate(P("q1*q2"), TruncationWindow(8)) == P("q1*q2")
    assert truncate(P("3/2*q3*q5 + q2"), TruncationWindow(4)) == P("q2")


def test_truncate_degree():
    w = TruncationWindow(8, max_degree=2)
    assert truncate(P("q1*q2*q3 + q1^2 + t1"), w) == P("q1^2 + t1")


def test_parity_and_coefficients():
    assert P("th1*q1").parity() == 1
    assert P("th1 + q1").parity() is None
    assert P("3/2*q1^2*t1").coefficient([("t1", 1), ("q1", 2)]) == Fraction(3, 2)


def test_power_of_odd():
    assert (P("th1") ** 2).is_zero()
    assert P("q1") ** 0 == T.one()


def test_check_homogeneous():
    t = VariableTable([Variable("a", "t", zgrade=2), Variable("b", "t", zgrade=-1)])
    assert check_homogeneous(t.var("a") * t.var("b"), 1)
    assert not check_homogeneous(t.var("a") + t.var("b"), 2)


def test_duplicate_variable_rejected():
    with pytest.raises(Exception):
        VariableTable([Variable("x", "t"), Variable("x", "t")])
