"""Structural Poisson bracket with multiplicities, Hamiltonian vector fields,
jacobiators, Poisson pencils and Lenard-Magri Casimir towers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, product

from . import linalg
from .graded import (
    Polynomial,
    TableMismatchError,
    TruncationWindow,
    VariableTable,
    partial_derivative,
    truncate,
)
from .tensors import Bivector, TensorError, VectorField, _sign


class InconsistentSystem(Exception):
    """No Hamiltonian exists for the given vector field."""

    def __init__(self, first: str, second: str, residual: Polynomial):
        super().__init__(
            f"mixed partial derivatives disagree for ({first}, {second}): residual {residual}"
        )
        self.pair = (first, second)
        self.residual = residual


class SeedNotCasimir(Exception):
    pass


class NoSolutionWithinDegree(Exception):
    def __init__(self, step: int, degree: int):
        super().__init__(f"Lenard step {step} has no solution of degree <= {degree}")
        self.step = step
        self.degree = degree


class AmbiguousSolution(Exception):
    def __init__(self, step: int, kernel_dimension: int):
        super().__init__(f"Lenard step {step} is ambiguous: kernel dimension {kernel_dimension}")
        self.step = step
        self.kernel_dimension = kernel_dimension


class StructuralPoisson:
    """Structural bracket pairing ``p_g`` with ``q_g`` with weight ``kappa_g``.

    ``{f,g} = sum kappa (f<d_p . d_q>g - (-1)^{|p|} f<d_q . d_p>g)`` with a right
    derivative on ``f`` and a left derivative on ``g``.  For even pairs this
    is ``df/dp dg/dq - (-1)^{|f||g|} dg/dp df/dq``; for odd pairs it is the
    sign choice that keeps the bracket a graded biderivation.
    """

    def __init__(self, table: VariableTable):
        self.table = table
        pairs = []
        seen_q = set()
        for v in table:
            if v.kind != "p":
                continue
            partners = [w for w in table if w.kind == "q" and w.orbit_index == v.orbit_index
                        and w.kappa == v.kappa]
            if len(partners) != 1:
                raise ValueError(f"unpaired p-variable {v.name!r}")
            q = partners[0]
            if q.name in seen_q:
                raise ValueError(f"q-variable {q.name!r} paired twice")
            seen_q.add(q.name)
            pairs.append((v.name, q.name, v.kappa))
        self.pairs = tuple(pairs)

    def __eq__(self, other):
        return isinstance(other, StructuralPoisson) and self.table == other.table

    def __hash__(self):
        return hash(("StructuralPoisson", self.table))

    def __repr__(self):
        return f"StructuralPoisson({len(self.pairs)} pairs)"

    @property
    def coordinates(self) -> tuple[str, ...]:
        return tuple(n for p, q, _ in self.pairs for n in (p, q))

    def as_bivector(self) -> Bivector:
        """Explicit view ``Pi^{p q} = kappa``, ``Pi^{q p} = -(-1)^{|p||q|} kappa``."""
        t = self.table
        entries = {}
        for p, q, k in self.pairs:
            entries[(p, q)] = t.const(k)
        return Bivector.from_upper(t, entries, "antisymmetric")

    def bracket(self, f: Polynomial, g: Polynomial, window: TruncationWindow | None = None) -> Polynomial:
        return poisson_bracket(self, f, g, window)


def _homogeneous_bracket(P, f, g, pf, window):
    # f is parity-homogeneous; right derivative f<d_v = (-1)^{|v|(|f|+1)} d_v f
    t = P.table
    out = t.zero()
    for p, q, k in P.pairs:
        par = t[p].parity
        right = _sign(par * (pf + 1))
        fp = partial_derivative(f, p)
        gq = partial_derivative(g, q)
        gp = partial_derivative(g, p)
        fq = partial_derivative(f, q)
        if window is not None:
            fp, gq, gp, fq = (truncate(x, window) for x in (fp, gq, gp, fq))
        out = out + (fp * gq - fq * gp * _sign(par)) * (k * right)
    return out


def poisson_bracket(P: StructuralPoisson, f: Polynomial, g: Polynomial,
                    window: TruncationWindow | None = None) -> Polynomial:
    """Structural bracket, bilinear over parity parts.

    With ``window`` the result is the truncation of the exact bracket; the
    derivative factors are truncated first, which is equivalent because a
    product monomial lies in the window iff both factors do.
    """
    for h in (f, g):
        if h.table is not P.table and h.table != P.table:
            raise TableMismatchError("polynomial does not belong to the bracket's table")
    out = P.table.zero()
    fparts = [(x, i) for i, x in enumerate(f.parity_parts()) if x.terms]
    if not g.terms:
        return out
    for fx, pf in fparts:
        out = out + _homogeneous_bracket(P, fx, g, pf, window)
    if window is not None:
        out = truncate(out, window)
    return out


def hamiltonian_vector_field(P: StructuralPoisson, h: Polynomial) -> VectorField:
    """``X_h = Pi(., dh)``, i.e. ``X_h^A = {v^A, h}``, so ``X_h(f) = {f, h}``."""
    t = P.table
    comps = {}
    for name in P.coordinates:
        comps[name] = poisson_bracket(P, t.var(name), h)
    return VectorField(t, comps)


def integrate_hamiltonian(P: StructuralPoisson, Y: VectorField, normalization: Polynomial | None = None,
                          certified: TruncationWindow | None = None) -> Polynomial:
    """Find ``h`` with ``hamiltonian_vector_field(P, h) == Y``.

    ``h`` is determined up to terms free of p/q variables; ``normalization``
    supplies that part (default zero).  The mixed-partial conditions are
    checked exactly, or only inside ``certified`` when the input is known to
    be exact there but truncated beyond it.  Raises :class:`InconsistentSystem`
    naming the first failing pair of coordinates.
    """
    t = P.table
    pq = set(P.coordinates)
    for name in Y.components:
        if name not in pq:
            raise ValueError(f"component along non-p/q variable {name!r}")
    if normalization is not None and not normalization.is_pq_free():
        raise ValueError("normalization must be free of p/q variables")
    # gradient dh/dv^a from the components of Y
    grad: dict[str, Polynomial] = {}
    for p, q, k in P.pairs:
        yp, yq = Y[p], Y[q]
        if yp.terms:
            grad[q] = yp / k
        if yq.terms:
            # {q, h} = -(-1)^{|p|} kappa dh/dp
            grad[p] = yq * Fraction(-_sign(t[p].parity), k)
    order = sorted(pq, key=t.index)
    zero = t.zero()
    if certified is not None:
        # gradients along coordinates outside the certified window are not exact
        bad = t._out_of_window(certified.max_orbit)
        order = [a for a in order if t.index(a) not in bad]
    for a, b in combinations(order, 2):
        ga, gb = grad.get(a, zero), grad.get(b, zero)
        res = partial_derivative(gb, a) - partial_derivative(ga, b) * _sign(t[a].parity * t[b].parity)
        if certified is not None:
            res = truncate(res, certified)
        if res.terms:
            raise InconsistentSystem(a, b, res)
    # Euler reconstruction: sum_a v^a d_a h = (pq-degree) * h termwise
    euler = zero
    for a, g in grad.items():
        euler = euler + t.var(a) * g
    terms = {}
    for mono, c in euler.terms.items():
        d = euler.pq_degree(mono)
        terms[mono] = c / d
    h = Polynomial(t, terms)
    if normalization is not None:
        h = h + normalization
    return h


def jacobiator(B: Bivector, coordinates=None) -> dict:
    """Nonzero values of ``{f,{g,h}} + {g,{h,f}} + {h,{f,g}}`` on coordinate triples."""
    if B.symmetry != "antisymmetric":
        raise TensorError("jacobiator needs an antisymmetric bivector")
    t = B.table
    if t.has_odd:
        raise TensorError("jacobiator is implemented for even tables")
    coords = sorted(set(coordinates) if coordinates is not None else B.indices(), key=t.index)
    out = {}
    xs = {c: t.var(c) for c in coords}
    for a, b, c in combinations(coords, 3):
        f, g, h = xs[a], xs[b], xs[c]
        j = (B.bracket(f, B.bracket(g, h)) + B.bracket(g, B.bracket(h, f))
             + B.bracket(h, B.bracket(f, g)))
        if j.terms:
            out[(a, b, c)] = j
    return out


@dataclass(frozen=True)
class PoissonPencil:
    """Compatible pair of Poisson bivectors; the pencil is ``P2 - lambda P1``."""

    P1: Bivector
    P2: Bivector

    def __post_init__(self):
        if self.P1.table != self.P2.table:
            raise TableMismatchError("pencil bivectors live on different tables")
        for name, B in (("P1", self.P1), ("P2", self.P2), ("P1 + P2", self.P1 + self.P2)):
            bad = jacobiator(B, self.coordinates)
            if bad:
                key = next(iter(bad))
                raise ValueError(f"jacobiator of {name} does not vanish at {key}: {bad[key]}")

    @property
    def table(self) -> VariableTable:
        return self.P1.table

    @property
    def coordinates(self) -> tuple[str, ...]:
        return self.P1.table.names

    def hamiltonian_field(self, which: int, f: Polynomial) -> VectorField:
        """``{., f}_which`` as a vector field on the pencil coordinates."""
        B = self.P1 if which == 1 else self.P2
        t = self.table
        return VectorField(t, {c: B.bracket(t.var(c), f) for c in self.coordinates})


@dataclass
class CasimirTower:
    """Lenard-Magri tower ``c_{-1}, c_0, c_1, ...``."""

    seed: Polynomial
    coefficients: list[Polynomial]
    resonance: bool = False
    kernel_dimensions: list[int] = field(default_factory=list)

    @property
    def levels(self) -> list[Polynomial]:
        return [self.seed] + list(self.coefficients)

    def __getitem__(self, i: int) -> Polynomial:
        return self.levels[i + 1]


def _monomials_up_to(table: VariableTable, coords, degree: int):
    idx = sorted(table.index(c) for c in coords)
    out = []
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(idx, d):
            mono = {}
            for v in combo:
                mono[v] = mono.get(v, 0) + 1
            out.append(tuple(sorted(mono.items())))
    return out


def _field_vector(X: VectorField, coords) -> dict:
    vec = {}
    for c in coords:
        for m, v in X[c].terms.items():
            vec[(c, m)] = v
    return vec


def _poly(table, monomials, coeffs: dict) -> Polynomial:
    return Polynomial(table, {monomials[j]: v for j, v in coeffs.items()})


def casimir_expand(pencil: PoissonPencil, seed: Polynomial, order: int,
                   degree_bound: int | None = None, strict: bool = False) -> CasimirTower:
    """Lenard-Magri expansion of a Casimir of the pencil.

    Solves ``P1 d c_{i+1} = P2 d c_i`` for ``i = -1 .. order-2`` on the ansatz
    of polynomials of degree ``<= degree_bound``.  The Casimirs of ``P1`` left
    free by each step are fixed by reducing ``P2 d c_{i+1}`` modulo the image
    of those Casimirs (so the tower stops as soon as it can); whatever freedom
    remains after that is set to zero and reported in ``kernel_dimensions``.
    ``resonance`` is set when the seed is a common Casimir of both structures.
    """
    t = pencil.table
    coords = pencil.coordinates
    if pencil.hamiltonian_field(1, seed):
        raise SeedNotCasimir(f"seed {seed} is not a Casimir of P1")
    if degree_bound is None:
        degree_bound = max(seed.degree(), 0) + order + 1
    monos = _monomials_up_to(t, coords, degree_bound)
    basis = [Polynomial._make(t, {m: Fraction(1)}) for m in monos]
    cols1 = [_field_vector(pencil.hamiltonian_field(1, b), coords) for b in basis]
    cols2 = [_field_vector(pencil.hamiltonian_field(2, b), coords) for b in basis]

    resonance = not pencil.hamiltonian_field(2, seed)
    coeffs: list[Polynomial] = []
    kernel_dims: list[int] = []
    current = seed
    for step in range(order):
        rhs = _field_vector(pencil.hamiltonian_field(2, current), coords)
        particular, kernel = linalg.solve(cols1, rhs)
        if particular is None:
            raise NoSolutionWithinDegree(step, degree_bound)
        # fix the P1-Casimir freedom by reducing P2 d c_{i+1}
        base = _field_vector(pencil.hamiltonian_field(2, _poly(t, monos, particular)), coords)
        kcols = []
        for vec in kernel:
            col = {}
            for j, v in vec.items():
                for key, w in cols2[j].items():
                    col[key] = col.get(key, 0) + v * w
            kcols.append({k: v for k, v in col.items() if v})
        shift, _, remaining = linalg.reduce_modulo(kcols, base)
        solution = dict(particular)
        for i, a in shift.items():
            for j, v in kernel[i].items():
                solution[j] = solution.get(j, 0) + a * v
        kernel_dims.append(remaining)
        if strict and remaining:
            raise AmbiguousSolution(step, remaining)
        current = _poly(t, monos, {j: v for j, v in solution.items() if v})
        coeffs.append(current)
    return CasimirTower(seed, coeffs, resonance, kernel_dims)

