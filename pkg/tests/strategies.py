"""Hypothesis strategies for random tables, polynomials and tensors."""
from fractions import Fraction

from hypothesis import strategies as st

from pnrec.graded import Polynomial, Variable, VariableTable
from pnrec.tensors import Endomorphism11, VectorField

MIXED = VariableTable([
    Variable("q1", "q", 0, kappa=1, orbit_index=1),
    Variable("th1", "tau", 1),
    Variable("q2", "q", 0, kappa=2, orbit_index=2),
    Variable("th2", "tau", 1),
    Variable("t1", "t", 0),
    Variable("th3", "tau", 1),
])

# structural bracket table: one even and one odd p/q pair, plus parameters
PQ = VariableTable([
    Variable("t1", "t", 0),
    Variable("q1", "q", 0, kappa=1, orbit_index=1),
    Variable("p1", "p", 0, kappa=1, orbit_index=1),
    Variable("q2", "q", 1, kappa=2, orbit_index=2),
    Variable("p2", "p", 1, kappa=2, orbit_index=2),
    Variable("tau1", "tau", 1),
])

PQ_EVEN = VariableTable([
    Variable("q1", "q", 0, kappa=1, orbit_index=1),
    Variable("p1", "p", 0, kappa=1, orbit_index=1),
    Variable("q2", "q", 0, kappa=3, orbit_index=2),
    Variable("p2", "p", 0, kappa=3, orbit_index=2),
    Variable("t1", "t", 0),
])

EVEN3 = VariableTable([Variable(n, "t") for n in "xyz"])

coefficients = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


def words(table, max_len=4):
    return st.lists(st.integers(0, len(table) - 1), max_size=max_len)


def word_terms(table, max_terms=4, max_len=4):
    return st.lists(st.tuples(coefficients, words(table, max_len)), max_size=max_terms)


def polynomials(table, max_terms=4, max_len=4):
    return word_terms(table, max_terms, max_len).map(lambda items: _build(table, items))


def _build(table, items):
    from oracle import from_words
    return from_words(table, items)


def homogeneous(table, parity, max_terms=4, max_len=4):
    """Parity-homogeneous polynomials (the wrong-parity part is dropped)."""
    return polynomials(table, max_terms, max_len).map(lambda f: f.parity_parts()[parity])


def homogeneous_any(table, max_terms=4, max_len=4):
    return st.integers(0, 1).flatmap(lambda p: homogeneous(table, p, max_terms, max_len))


def even_fields(table=EVEN3, max_terms=3, max_len=2):
    comps = st.fixed_dictionaries({n: polynomials(table, max_terms, max_len) for n in table.names})
    return comps.map(lambda c: VectorField(table, c))


def even_endomorphisms(table=EVEN3, max_terms=2, max_len=2):
    keys = [(a, b) for a in table.names for b in table.names]
    entries = st.fixed_dictionaries({k: polynomials(table, max_terms, max_len) for k in keys})
    return entries.map(lambda e: Endomorphism11(table, e))
