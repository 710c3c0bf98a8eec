"""Algebraic properties checked on randomized corpora.

Each entry of ``PROPERTIES`` is ``(name, strategies, check)``; ``check`` takes
one drawn value per strategy and raises ``AssertionError`` on a violation.
"""
from hypothesis import strategies as st

import oracle
from strategies import (
    EVEN3,
    MIXED,
    PQ,
    PQ_EVEN,
    even_endomorphisms,
    even_fields,
    homogeneous,
    homogeneous_any,
    polynomials,
)
from pnrec.graded import TruncationWindow, mul, partial_derivative, truncate
from pnrec.models import Model, build_s1_ch_model, build_s1_sft_model, dump_model, load_model
from pnrec.parser import format_polynomial, parse_expression
from pnrec.poisson import StructuralPoisson, hamiltonian_vector_field, integrate_hamiltonian, poisson_bracket
from pnrec.tensors import (
    Bivector,
    Endomorphism11,
    VectorField,
    apply_endomorphism,
    contract_bivector,
    differential,
    lie_bracket,
    lie_derivative_bivector,
    lie_derivative_endomorphism,
    nijenhuis_torsion,
    torsion_on_fields,
)


def sgn(p):
    return -1 if p & 1 else 1


POISSON = StructuralPoisson(PQ)
POISSON_EVEN = StructuralPoisson(PQ_EVEN)
names_mixed = st.sampled_from(MIXED.names)
names_pq = st.sampled_from(PQ.names)


# -- graded core ------------------------------------------------------------

def check_product_oracle(f, g):
    assert mul(f, g) == oracle.product(f, g)


def check_associative(f, g, h):
    assert (f * g) * h == f * (g * h)


def check_graded_commutative(f, g):
    assert f * g == g * f * sgn(f.parity() * g.parity())


def check_derivative_oracle(f, v):
    assert partial_derivative(f, v) == oracle.left_derivative(f, v)


def check_derivative_leibniz(f, g, v):
    pv = MIXED[v].parity
    lhs = partial_derivative(f * g, v)
    rhs = partial_derivative(f, v) * g + f * partial_derivative(g, v) * sgn(pv * f.parity())
    assert lhs == rhs


def check_derivatives_commute(f, u, v):
    s = sgn(MIXED[u].parity * MIXED[v].parity)
    assert partial_derivative(partial_derivative(f, v), u) == \
        partial_derivative(partial_derivative(f, u), v) * s


def check_parser_roundtrip(f):
    text = format_polynomial(f)
    assert parse_expression(text, f.table) == f
    assert format_polynomial(parse_expression(text, f.table)) == text


def check_truncation(f, g, K):
    w = TruncationWindow(K)
    assert truncate(f + g, w) == truncate(f, w) + truncate(g, w)
    assert truncate(truncate(f, w), w) == truncate(f, w)
    for v in MIXED.names:
        var = MIXED[v]
        if var.orbit_index is None or var.orbit_index <= K:
            assert truncate(partial_derivative(f, v), w) == partial_derivative(truncate(f, w), v)


# -- tensors ----------------------------------------------------------------

def check_lie_jacobi(X, Y, Z):
    j = (lie_bracket(lie_bracket(X, Y, (0, 0)), Z, (0, 0))
         + lie_bracket(lie_bracket(Y, Z, (0, 0)), X, (0, 0))
         + lie_bracket(lie_bracket(Z, X, (0, 0)), Y, (0, 0)))
    assert j.is_zero()


def check_lie_antisymmetric(X, Y):
    assert lie_bracket(X, Y, (0, 0)) == -lie_bracket(Y, X, (0, 0))


def check_lie_derivative_leibniz(X, N, Y):
    coords = EVEN3.names
    L = lie_derivative_endomorphism(X, N, coords)
    lhs = lie_bracket(X, apply_endomorphism(N, Y), (0, 0))
    rhs = apply_endomorphism(L, Y) + apply_endomorphism(N, lie_bracket(X, Y, (0, 0)))
    assert lhs == rhs


def check_torsion_oracle(N):
    T = nijenhuis_torsion(N, EVEN3.names)
    for b in EVEN3.names:
        for c in EVEN3.names:
            fb = VectorField(EVEN3, {b: EVEN3.one()})
            fc = VectorField(EVEN3, {c: EVEN3.one()})
            expected = torsion_on_fields(N, fb, fc)
            got = VectorField(EVEN3, {a: T.entry(a, b, c) for a in EVEN3.names})
            assert got == expected


def check_lie_bivector_symmetry(X, entries, symmetric):
    sym = "symmetric" if symmetric else "antisymmetric"
    if not symmetric:
        entries = {k: v for k, v in entries.items() if k[0] != k[1]}
    B = Bivector.from_upper(EVEN3, entries, sym)
    L = lie_derivative_bivector(X, B)
    assert L.symmetry == sym and L.symmetry_defect() is None
    # derivation property on functions: L_X {f,g} = {Xf,g} + {f,Xg} + (L_X B)(df,dg)
    x, y = EVEN3.var("x"), EVEN3.var("y")
    for f, g in ((x, y), (x * y, y)):
        lhs = X(B.bracket(f, g))
        rhs = B.bracket(X(f), g) + B.bracket(f, X(g)) + L.bracket(f, g)
        assert lhs == rhs
    Y = contract_bivector(B, differential(x * y))
    assert Y.table is EVEN3


# -- poisson ----------------------------------------------------------------

def check_bracket_antisymmetric(f, g):
    s = sgn(f.parity() * g.parity())
    assert poisson_bracket(POISSON, f, g) == -poisson_bracket(POISSON, g, f) * s


def check_bracket_leibniz(f, g, h):
    s = sgn(f.parity() * g.parity())
    lhs = poisson_bracket(POISSON, f, g * h)
    rhs = poisson_bracket(POISSON, f, g) * h + g * poisson_bracket(POISSON, f, h) * s
    assert lhs == rhs


def check_bracket_jacobi(f, g, h):
    b = lambda a, c: poisson_bracket(POISSON_EVEN, a, c)  # noqa: E731
    assert (b(f, b(g, h)) + b(g, b(h, f)) + b(h, b(f, g))).is_zero()


def check_bracket_graded_jacobi(f, g, h):
    b = lambda a, c: poisson_bracket(POISSON, a, c)  # noqa: E731
    s = sgn(f.parity() * g.parity())
    assert b(f, b(g, h)) == b(b(f, g), h) + b(g, b(f, h)) * s


def check_hamiltonian_roundtrip(h):
    X = hamiltonian_vector_field(POISSON, h)
    h2 = integrate_hamiltonian(POISSON, X)
    assert hamiltonian_vector_field(POISSON, h2) == X
    assert (h - h2).is_pq_free()


def check_hamiltonian_field_acts(h, f):
    X = hamiltonian_vector_field(POISSON_EVEN, h)
    assert X(f) == poisson_bracket(POISSON_EVEN, f, h)


# -- models -----------------------------------------------------------------

def check_model_roundtrip(kind, K, entries):
    if kind == "ch":
        model = build_s1_ch_model(K)
    elif kind == "sft":
        model = build_s1_sft_model(K)
    else:
        model = Model(EVEN3, TruncationWindow(K), N=Endomorphism11(EVEN3, entries))
    doc = dump_model(model)
    again = load_model(doc)
    assert again == model
    assert dump_model(again) == doc


endo_entries = st.dictionaries(
    st.tuples(st.sampled_from(EVEN3.names), st.sampled_from(EVEN3.names)),
    polynomials(EVEN3, 3, 3), max_size=4)
upper_entries = st.dictionaries(
    st.sampled_from([("x", "y"), ("x", "z"), ("y", "z"), ("x", "x")]),
    polynomials(EVEN3, 2, 2), max_size=3)


PROPERTIES = [
    ("product_matches_word_oracle", (polynomials(MIXED), polynomials(MIXED)), check_product_oracle),
    ("associativity", (polynomials(MIXED, 3, 3),) * 3, check_associative),
    ("graded_commutativity", (homogeneous_any(MIXED), homogeneous_any(MIXED)), check_graded_commutative),
    ("derivative_matches_oracle", (polynomials(MIXED), names_mixed), check_derivative_oracle),
    ("graded_leibniz_derivative", (homogeneous_any(MIXED), polynomials(MIXED), names_mixed),
     check_derivative_leibniz),
    ("derivatives_commute", (polynomials(MIXED, 5, 5), names_mixed, names_mixed), check_derivatives_commute),
    ("parser_roundtrip", (polynomials(MIXED, 6, 5),), check_parser_roundtrip),
    ("truncation", (polynomials(MIXED), polynomials(MIXED), st.integers(1, 3)), check_truncation),
    ("lie_jacobi", (even_fields(),) * 3, check_lie_jacobi),
    ("lie_antisymmetry", (even_fields(), even_fields()), check_lie_antisymmetric),
    ("lie_derivative_leibniz", (even_fields(), even_endomorphisms(), even_fields()),
     check_lie_derivative_leibniz),
    ("torsion_oracle", (even_endomorphisms(),), check_torsion_oracle),
    ("lie_bivector_symmetry", (even_fields(), upper_entries, st.booleans()), check_lie_bivector_symmetry),
    ("bracket_antisymmetry", (homogeneous_any(PQ), homogeneous_any(PQ)), check_bracket_antisymmetric),
    ("bracket_leibniz", (homogeneous_any(PQ), homogeneous_any(PQ), polynomials(PQ)), check_bracket_leibniz),
    ("bracket_jacobi", (polynomials(PQ_EVEN, 3, 3),) * 3, check_bracket_jacobi),
    ("bracket_graded_jacobi", (homogeneous_any(PQ, 3, 3),) * 3, check_bracket_graded_jacobi),
    ("hamiltonian_roundtrip", (homogeneous_any(PQ),), check_hamiltonian_roundtrip),
    ("hamiltonian_field_acts", (polynomials(PQ_EVEN), polynomials(PQ_EVEN)), check_hamiltonian_field_acts),
    ("model_roundtrip", (st.sampled_from(["ch", "sft", "custom"]), st.integers(1, 5), endo_entries),
     check_model_roundtrip),
]
