from fractions import Fraction

import pytest

from oracle import matrix_mul, transpose
from pnrec.graded import TableMismatchError, Variable, VariableTable
from pnrec.models import build_s1_ch_model, build_s1_sft_model, s1_closed_forms
from pnrec.parser import parse_expression
from pnrec.poisson import StructuralPoisson
from pnrec.recursion import sft_step
from pnrec.tensors import (
    Bivector,
    Endomorphism11,
    OneForm,
    TensorError,
    VectorField,
    apply_endomorphism,
    contract_bivector,
    differential,
    lie_bracket,
    lie_derivative_bivector,
    lie_derivative_endomorphism,
    magri_morosi_compatibility,
    nijenhuis_torsion,
    torsion_on_fields,
)

XY = VariableTable([Variable("x", "t"), Variable("y", "t")])
NAMES = ("x", "y")
x, y = XY.var("x"), XY.var("y")


def endo(matrix):
    """``matrix[upper][lower]`` -> Endomorphism11."""
    return Endomorphism11(XY, {(NAMES[j], NAMES[i]): XY.const(matrix[i][j])
                               for i in range(2) for j in range(2) if matrix[i][j]})


def linear_field(M):
    return VectorField(XY, {NAMES[a]: x * M[a][0] + y * M[a][1] for a in range(2)})


def as_matrix(entries):
    return [[entries.get((NAMES[i], NAMES[j]), XY.zero()) for j in range(2)] for i in range(2)]


def test_apply_endomorphism_trivial():
    X = VectorField(XY, {"x": x * y, "y": XY.one()})
    assert apply_endomorphism(Endomorphism11(XY), X).is_zero()
    assert apply_endomorphism(Endomorphism11.identity(XY, NAMES), X) == X


def test_apply_s1_component():
    m = build_s1_ch_model(8)
    NX = apply_endomorphism(m.N, m.primaries["1"])
    assert NX["q3"] == parse_expression("3*q1*q2", m.table)


def test_lie_bracket_examples():
    d = VectorField(XY, {"x": XY.one()})
    assert lie_bracket(d, VectorField(XY, {"x": x})) == d
    X = VectorField(XY, {"x": x * y, "y": x ** 2})
    assert lie_bracket(X, X).is_zero()


def test_lie_bracket_table_mismatch():
    other = VariableTable([Variable("x", "t")])
    with pytest.raises(TableMismatchError):
        lie_bracket(VectorField(XY, {"x": x}), VectorField(other, {"x": other.var("x")}))


def test_lie_derivative_endomorphism_matrix_oracle():
    M = [[1, 2], [-3, 5]]
    Nm = [[2, 0], [7, -1]]
    L = lie_derivative_endomorphism(linear_field(M), endo(Nm), NAMES)
    expected = [[a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(matrix_mul(Nm, M), matrix_mul(M, Nm))]
    got = [[L.entry(NAMES[j], NAMES[i]) for j in range(2)] for i in range(2)]
    assert got == [[XY.const(v) for v in row] for row in expected]
    assert lie_derivative_endomorphism(VectorField(XY), endo(Nm), NAMES).is_zero()


def test_lie_derivative_bivector_matrix_oracle():
    M = [[1, 2], [-3, 5]]
    Bm = [[0, 4], [-4, 0]]
    B = Bivector.from_upper(XY, {("x", "y"): XY.const(4)})
    L = lie_derivative_bivector(linear_field(M), B)
    MB = matrix_mul(M, Bm)
    BMt = matrix_mul(Bm, transpose(M))
    expected = [[-(MB[i][j] + BMt[i][j]) for j in range(2)] for i in range(2)]
    assert as_matrix(L.entries) == [[XY.const(v) for v in row] for row in expected]
    assert lie_derivative_bivector(VectorField(XY), B).is_zero()


def test_s1_lie_derivative_of_N_vanishes():
    m = build_s1_ch_model(8)
    assert lie_derivative_endomorphism(m.primaries["1"], m.N, m.table.names).is_zero()


def test_s1_sft_omega_invariant_under_zero_field():
    m = build_s1_sft_model(4)
    assert lie_derivative_bivector(VectorField(m.table), m.omega).is_zero()


def test_torsion_constant_is_zero():
    assert nijenhuis_torsion(endo([[1, 2], [3, 4]]), NAMES).is_zero()


def test_torsion_s1_vanishes():
    m = build_s1_ch_model(8)
    assert nijenhuis_torsion(m.N, m.table.names).is_zero()


def test_torsion_counterexample():
    N = Endomorphism11(XY, {("x", "x"): y, ("y", "y"): x})
    T = nijenhuis_torsion(N, NAMES)
    assert not T.is_zero()
    dx, dy = VectorField(XY, {"x": XY.one()}), VectorField(XY, {"y": XY.one()})
    expected = VectorField(XY, {"x": y - x, "y": y - x})
    assert torsion_on_fields(N, dx, dy) == expected
    assert VectorField(XY, {a: T.entry(a, "x", "y") for a in NAMES}) == expected


def test_magri_morosi_examples():
    P = Bivector.from_upper(XY, {("x", "y"): XY.one()})
    r = magri_morosi_compatibility(endo([[0, 1], [0, 0]]), P)
    assert r.residual1 == {("x", "x"): XY.const(-2)}
    assert r.residual2 == {}
    assert not r.compatible
    assert magri_morosi_compatibility(Endomorphism11.identity(XY, NAMES), P).compatible
    assert magri_morosi_compatibility(Endomorphism11.identity(XY, NAMES, Fraction(5, 3)), P).compatible
    Q = Bivector.from_upper(XY, {("x", "y"): x * y})
    assert magri_morosi_compatibility(Endomorphism11.identity(XY, NAMES), Q).compatible


def test_contract_bivector_examples():
    B = Bivector.from_upper(XY, {("x", "y"): XY.one()})
    df = OneForm(XY, {"x": x * 2, "y": XY.const(3)})
    assert contract_bivector(B, df) == VectorField(XY, {"x": XY.const(3), "y": -x * 2})
    assert contract_bivector(B, OneForm(XY)).is_zero()


def test_contract_omega_with_seed():
    # omega(., dt1) is the t-column of omega: component v^l equals l v^l
    K = 6
    m = build_s1_sft_model(K)
    Y = contract_bivector(m.omega, differential(m.table.var("t1")))
    for k in range(1, K + 1):
        assert Y[f"p{k}"] == m.table.var(f"p{k}") * k
        assert Y[f"q{k}"] == m.table.var(f"q{k}") * -k
    assert Y["t1"].is_zero()
    h0 = s1_closed_forms("sft_hamiltonian", 0, window=K, table=m.table)
    assert sft_step(StructuralPoisson(m.table), m.omega, m.table.var("t1")) == h0


def test_bivector_symmetry_validated():
    with pytest.raises(TensorError):
        Bivector(XY, {("x", "y"): x, ("y", "x"): x}, "antisymmetric")
    B = Bivector(XY, {("x", "y"): x, ("y", "x"): x}, "symmetric")
    assert B.symmetry_defect() is None
