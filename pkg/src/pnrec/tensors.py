"""Coordinate tensor fields on a formal graded superspace.

Components are keyed by variable name.  Contractions are plain sums over
coordinates; any multiplicity weights live inside the entries themselves.
Even-variable formulas are the textbook coordinate expressions; for odd
coordinates a symbol moving past another contributes the Koszul sign.
"""
from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple

from .graded import (
    Polynomial,
    TableMismatchError,
    TruncationWindow,
    VariableTable,
    partial_derivative,
    truncate,
)


class TensorError(Exception):
    pass


def _check_table(a, b):
    if a is not b and a != b:
        raise TableMismatchError("tensor fields belong to different variable tables")


def _sign(p: int) -> int:
    return -1 if p & 1 else 1


def _clean(entries: Mapping) -> dict:
    return {k: v for k, v in entries.items() if v.terms}


class _Sparse:
    """Shared behaviour for the sparse tensor containers."""

    __slots__ = ("table", "_data")

    def _entries(self) -> dict:
        return self._data

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.table == other.table and self._entries() == other._entries()

    def __hash__(self):
        return hash((type(self).__name__, frozenset(self._entries().items())))

    def is_zero(self) -> bool:
        return not self._data

    def __bool__(self):
        return bool(self._data)


class VectorField(_Sparse):
    """Sum of ``X^a d/dv^a`` with finitely many nonzero components."""

    __slots__ = ()

    def __init__(self, table: VariableTable, components: Mapping[str, Polynomial] | None = None):
        self.table = table
        comps = {}
        for name, f in (components or {}).items():
            table.index(name)
            _check_table(table, f.table)
            if f.terms:
                comps[name] = f
        self._data = comps

    @property
    def components(self) -> dict[str, Polynomial]:
        return dict(self._data)

    def __getitem__(self, name) -> Polynomial:
        return self._data.get(name) or self.table.zero()

    def __iter__(self):
        order = self.table.index
        return iter(sorted(self._data, key=order))

    def __repr__(self):
        inner = ", ".join(f"{k}: {self._data[k]}" for k in self)
        return f"VectorField({{{inner}}})"

    def parity(self) -> int:
        """Parity of the field; raises if it is not homogeneous."""
        pars = set()
        for name, f in self._data.items():
            p = f.parity()
            if p is None:
                raise TensorError(f"component {name!r} is parity-inhomogeneous")
            pars.add((p + self.table[name].parity) & 1)
        if len(pars) > 1:
            raise TensorError("vector field is parity-inhomogeneous; pass parity explicitly")
        return pars.pop() if pars else 0

    def __call__(self, f: Polynomial) -> Polynomial:
        """Apply as a derivation: ``X(f) = sum_a X^a * d_a f``."""
        _check_table(self.table, f.table)
        out = self.table.zero()
        for name, comp in self._data.items():
            d = partial_derivative(f, name)
            if d.terms:
                out = out + comp * d
        return out

    def __add__(self, other):
        _check_table(self.table, other.table)
        comps = dict(self._data)
        for k, v in other._data.items():
            comps[k] = comps[k] + v if k in comps else v
        return VectorField(self.table, comps)

    def __neg__(self):
        return VectorField(self.table, {k: -v for k, v in self._data.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "VectorField":
        """Left multiplication by a scalar or polynomial."""
        if isinstance(c, Polynomial):
            return VectorField(self.table, {k: c * v for k, v in self._data.items()})
        return VectorField(self.table, {k: v * c for k, v in self._data.items()})

    def truncate(self, window: TruncationWindow) -> "VectorField":
        out = {}
        for k, v in self._data.items():
            var = self.table[k]
            if var.kind in ("p", "q") and var.orbit_index is not None and abs(var.orbit_index) > window.max_orbit:
                continue
            out[k] = truncate(v, window)
        return VectorField(self.table, out)

    def map(self, fn) -> "VectorField":
        return VectorField(self.table, {k: fn(v) for k, v in self._data.items()})


class OneForm(_Sparse):
    """Sum of ``w_a dv^a``."""

    __slots__ = ()

    def __init__(self, table: VariableTable, components: Mapping[str, Polynomial] | None = None):
        self.table = table
        comps = {}
        for name, f in (components or {}).items():
            table.index(name)
            _check_table(table, f.table)
            if f.terms:
                comps[name] = f
        self._data = comps

    @property
    def components(self) -> dict[str, Polynomial]:
        return dict(self._data)

    def __getitem__(self, name) -> Polynomial:
        return self._data.get(name) or self.table.zero()

    def __repr__(self):
        inner = ", ".join(f"{k}: {v}" for k, v in self._data.items())
        return f"OneForm({{{inner}}})"


def differential(f: Polynomial, variables: Iterable[str] | None = None) -> OneForm:
    """``df`` with components the left derivatives of ``f``."""
    names = f.table.names if variables is None else variables
    used = f.variables_used()
    return OneForm(f.table, {n: partial_derivative(f, n) for n in names if n in used})


class Endomorphism11(_Sparse):
    """(1,1)-tensor ``N_a^b dv^a (x) d/dv^b``; ``entries[(lower, upper)]``."""

    __slots__ = ("_rows",)

    def __init__(self, table: VariableTable, entries: Mapping[tuple[str, str], Polynomial] | None = None):
        self.table = table
        data = {}
        for (lo, up), f in (entries or {}).items():
            table.index(lo)
            table.index(up)
            _check_table(table, f.table)
            if f.terms:
                data[(lo, up)] = f
        self._data = data
        rows: dict = {}
        for (lo, up), f in data.items():
            rows.setdefault(lo, {})[up] = f
        self._rows = rows

    @classmethod
    def identity(cls, table: VariableTable, coordinates: Iterable[str], scale=1) -> "Endomorphism11":
        c = table.const(scale)
        return cls(table, {(a, a): c for a in coordinates})

    @property
    def entries(self) -> dict[tuple[str, str], Polynomial]:
        return dict(self._data)

    def entry(self, lower: str, upper: str) -> Polynomial:
        return self._data.get((lower, upper)) or self.table.zero()

    def row(self, lower: str) -> dict[str, Polynomial]:
        return self._rows.get(lower, {})

    def indices(self) -> set[str]:
        return {k for pair in self._data for k in pair}

    def __repr__(self):
        return f"Endomorphism11({len(self._data)} entries)"

    def __call__(self, X: VectorField) -> VectorField:
        return apply_endomorphism(self, X)

    def __add__(self, other):
        _check_table(self.table, other.table)
        data = dict(self._data)
        for k, v in other._data.items():
            data[k] = data[k] + v if k in data else v
        return Endomorphism11(self.table, data)

    def __neg__(self):
        return Endomorphism11(self.table, {k: -v for k, v in self._data.items()})

    def __sub__(self, other):
        return self + (-other)

    def compose(self, other: "Endomorphism11") -> "Endomorphism11":
        """``self`` after ``other``: ``(self o other)(X) = self(other(X))``."""
        _check_table(self.table, other.table)
        data: dict = {}
        for (a, c), f in other._data.items():
            for b, g in self.row(c).items():
                v = f * g
                data[(a, b)] = data[(a, b)] + v if (a, b) in data else v
        return Endomorphism11(self.table, data)

    def matrix(self, coordinates) -> list[list[Polynomial]]:
        """Matrix with rows = upper index, columns = lower index."""
        return [[self.entry(lo, up) for lo in coordinates] for up in coordinates]


SYMMETRIES = ("symmetric", "antisymmetric")


class Bivector(_Sparse):
    """(2,0)-tensor ``B^{AB} d/dv^A (x) d/dv^B`` with a declared graded symmetry.

    Under index swap ``B^{BA} = s * (-1)^{|A||B|} B^{AB}`` with ``s = +1`` for
    symmetric and ``-1`` for antisymmetric.
    """

    __slots__ = ("symmetry", "_rows")

    def __init__(self, table: VariableTable, entries: Mapping[tuple[str, str], Polynomial] | None = None,
                 symmetry: str = "antisymmetric", check: bool = True):
        if symmetry not in SYMMETRIES:
            raise ValueError(f"symmetry must be one of {SYMMETRIES}")
        self.table = table
        self.symmetry = symmetry
        data = {}
        for (a, b), f in (entries or {}).items():
            table.index(a)
            table.index(b)
            _check_table(table, f.table)
            if f.terms:
                data[(a, b)] = f
        self._data = data
        rows: dict = {}
        for (a, b), f in data.items():
            rows.setdefault(a, {})[b] = f
        self._rows = rows
        if check:
            bad = self.symmetry_defect()
            if bad is not None:
                raise TensorError(f"entries {bad} violate the declared {symmetry} symmetry")

    @classmethod
    def from_upper(cls, table, entries, symmetry="antisymmetric") -> "Bivector":
        """Complete a half-specified bivector by its declared symmetry."""
        s = 1 if symmetry == "symmetric" else -1
        full = {}
        for (a, b), f in entries.items():
            full[(a, b)] = f
            if a != b:
                full[(b, a)] = f * (s * _sign(table[a].parity * table[b].parity))
        return cls(table, full, symmetry)

    def _swap_sign(self, a, b) -> int:
        s = 1 if self.symmetry == "symmetric" else -1
        return s * _sign(self.table[a].parity * self.table[b].parity)

    def symmetry_defect(self):
        for (a, b), f in self._data.items():
            if self.entry(b, a) != f * self._swap_sign(a, b):
                return (a, b)
        return None

    @property
    def entries(self) -> dict[tuple[str, str], Polynomial]:
        return dict(self._data)

    def entry(self, a: str, b: str) -> Polynomial:
        return self._data.get((a, b)) or self.table.zero()

    def row(self, a: str) -> dict[str, Polynomial]:
        return self._rows.get(a, {})

    def indices(self) -> set[str]:
        return {k for pair in self._data for k in pair}

    def __repr__(self):
        return f"Bivector({self.symmetry}, {len(self._data)} entries)"

    def __eq__(self, other):
        if not isinstance(other, Bivector):
            return NotImplemented
        return self.symmetry == other.symmetry and self.table == other.table and self._data == other._data

    __hash__ = _Sparse.__hash__

    def __add__(self, other: "Bivector") -> "Bivector":
        _check_table(self.table, other.table)
        if self.symmetry != other.symmetry:
            raise TensorError("cannot add bivectors of different symmetry")
        data = dict(self._data)
        for k, v in other._data.items():
            data[k] = data[k] + v if k in data else v
        return Bivector(self.table, data, self.symmetry)

    def scale(self, c) -> "Bivector":
        return Bivector(self.table, {k: v * c for k, v in self._data.items()}, self.symmetry)

    def bracket(self, f: Polynomial, g: Polynomial) -> Polynomial:
        """``{f, g} = sum d_A f * B^{AB} * d_B g``."""
        out = self.table.zero()
        for a, row in self._rows.items():
            da = partial_derivative(f, a)
            if not da.terms:
                continue
            for b, entry in row.items():
                db = partial_derivative(g, b)
                if db.terms:
                    out = out + da * entry * db
        return out

    def matrix(self, coordinates) -> list[list[Polynomial]]:
        return [[self.entry(a, b) for b in coordinates] for a in coordinates]


class Tensor12(_Sparse):
    """(1,2)-tensor; ``entries[(upper, lower1, lower2)]``."""

    __slots__ = ()

    def __init__(self, table: VariableTable, entries: Mapping[tuple[str, str, str], Polynomial] | None = None):
        self.table = table
        self._data = _clean(entries or {})

    @property
    def entries(self) -> dict[tuple[str, str, str], Polynomial]:
        return dict(self._data)

    def entry(self, upper, lower1, lower2) -> Polynomial:
        return self._data.get((upper, lower1, lower2)) or self.table.zero()

    def __repr__(self):
        return f"Tensor12({len(self._data)} entries)"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def apply_endomorphism(N: Endomorphism11, X: VectorField) -> VectorField:
    """``N(X)^b = sum_a X^a N_a^b``."""
    _check_table(N.table, X.table)
    out: dict = {}
    for a, xa in X._data.items():
        for b, nab in N.row(a).items():
            v = xa * nab
            out[b] = out[b] + v if b in out else v
    return VectorField(X.table, out)


def lie_bracket(X: VectorField, Y: VectorField, parities: tuple[int, int] | None = None) -> VectorField:
    """``[X,Y]^b = X(Y^b) - (-1)^{|X||Y|} Y(X^b)``."""
    _check_table(X.table, Y.table)
    if parities is None:
        px, py = X.parity(), Y.parity()
    else:
        px, py = parities
    s = _sign(px * py)
    out = {}
    for b in set(X._data) | set(Y._data):
        v = X(Y[b])
        w = Y(X[b])
        out[b] = v - w if s == 1 else v + w
    return VectorField(X.table, out)


def _coordinate_field(table: VariableTable, a: str) -> VectorField:
    return VectorField(table, {a: table.one()})


def lie_derivative_endomorphism(X: VectorField, N: Endomorphism11,
                                coordinates: Iterable[str] | None = None) -> Endomorphism11:
    """Lie derivative of a (1,1)-tensor along ``X``.

    Defined by ``(L_X N)(Y) = [X, N(Y)] - N([X, Y])`` on coordinate fields,
    which for even variables is
    ``X^c d_c N_a^b - N_a^c d_c X^b + (d_a X^c) N_c^b``.
    """
    _check_table(X.table, N.table)
    table = X.table
    px = X.parity()
    if coordinates is None:
        coords = N.indices() | set(X._data)
    else:
        coords = set(coordinates)
    out = {}
    for a in sorted(coords, key=table.index):
        pa = table[a].parity
        Na = VectorField(table, N.row(a))
        first = lie_bracket(X, Na, (px, pa))
        xa = lie_bracket(X, _coordinate_field(table, a), (px, pa))
        second = apply_endomorphism(N, xa)
        for b, v in (first - second)._data.items():
            out[(a, b)] = v
    return Endomorphism11(table, out)


def lie_derivative_bivector(X: VectorField, B: Bivector,
                            coordinates: Iterable[str] | None = None) -> Bivector:
    """Lie derivative of a (2,0)-tensor along ``X``.

    Uses ``(L_X B)(., dv^c) = [X, B(., dv^c)] - B(., d X^c)``; for even
    variables ``X^d d_d B^{Ac} - B^{dc} d_d X^A - B^{Ad} d_d X^c``.
    """
    _check_table(X.table, B.table)
    table = X.table
    px = X.parity()
    cols = {b for _, b in B._data} | set(X._data)
    if coordinates is not None:
        cols &= set(coordinates)
    out = {}
    for c in sorted(cols, key=table.index):
        column = VectorField(table, {a: B.entry(a, c) for a in B.indices() if (a, c) in B._data})
        first = lie_bracket(X, column, (px, table[c].parity))
        second = contract_bivector(B, differential(X[c]))
        for a, v in (first - second)._data.items():
            out[(a, c)] = v
    return Bivector(table, out, B.symmetry, check=False)


def nijenhuis_torsion(N: Endomorphism11, coordinates: Iterable[str] | None = None) -> Tensor12:
    """Nijenhuis torsion in index form.

    ``T^a_{bc} = N^a_g (d_c N^g_b - d_b N^g_c) - (d_g N^a_b) N^g_c + (d_g N^a_c) N^g_b``
    where ``N^a_b`` is the entry with lower index ``b`` and upper index ``a``.
    """
    table = N.table
    coord_set = set(coordinates) if coordinates is not None else N.indices()
    coords = sorted(coord_set, key=table.index)
    # D[(c, lo, up)] = d_c N_lo^up
    D: dict = {}
    for (lo, up), f in N._data.items():
        for c in f.variables_used():
            if c in coord_set:
                d = partial_derivative(f, c)
                if d.terms:
                    D[(c, lo, up)] = d
    zero = table.zero()
    # upper-indexed view: cols[g] = {a: N^a_g}
    cols = {g: N.row(g) for g in coords}
    out = {}
    for a in coords:
        for b in coords:
            for c in coords:
                total = zero
                for g, row in cols.items():
                    nag = row.get(a)
                    if nag is not None:
                        diff = D.get((c, b, g), zero) - D.get((b, c, g), zero)
                        if diff.terms:
                            total = total + nag * diff
                    ngc = N._data.get((c, g))
                    if ngc is not None:
                        d = D.get((g, b, a))
                        if d is not None:
                            total = total - d * ngc
                    ngb = N._data.get((b, g))
                    if ngb is not None:
                        d = D.get((g, c, a))
                        if d is not None:
                            total = total + d * ngb
                if total.terms:
                    out[(a, b, c)] = total
    return Tensor12(table, out)


def torsion_on_fields(N: Endomorphism11, X: VectorField, Y: VectorField) -> VectorField:
    """``[NX,NY] - N[NX,Y] - N[X,NY] + N^2[X,Y]`` (even fields)."""
    NX, NY = N(X), N(Y)
    return (lie_bracket(NX, NY, (0, 0)) - N(lie_bracket(NX, Y, (0, 0)))
            - N(lie_bracket(X, NY, (0, 0))) + N(N(lie_bracket(X, Y, (0, 0)))))


def contract_bivector(B: Bivector, df: OneForm) -> VectorField:
    """``Y^A = sum_B B^{AB} (df)_B``."""
    _check_table(B.table, df.table)
    out: dict = {}
    for a, row in B._rows.items():
        for b, entry in row.items():
            w = df._data.get(b)
            if w is not None:
                v = entry * w
                out[a] = out[a] + v if a in out else v
    return VectorField(B.table, out)


class CompatibilityResidual(NamedTuple):
    residual1: dict
    residual2: dict

    @property
    def compatible(self) -> bool:
        return not self.residual1 and not self.residual2


def magri_morosi_compatibility(N: Endomorphism11, P: Bivector,
                               coordinates: Iterable[str] | None = None) -> CompatibilityResidual:
    """Residuals of the two Poisson-Nijenhuis conditions, nonzero entries only.

    ``residual1[(k, j)] = N^k_l P^{lj} - P^{kl} N^j_l`` and
    ``residual2[(k, j, m)] = P^{lj}(d_l N^k_m - d_m N^k_l) - P^{kl} d_l N^j_m
    - N^l_m d_l P^{kj} + N^j_l d_m P^{kl}``.
    """
    _check_table(N.table, P.table)
    if P.symmetry != "antisymmetric":
        raise TensorError("the Poisson tensor must be antisymmetric")
    table = N.table
    coords = sorted(set(coordinates) if coordinates is not None else (N.indices() | P.indices()),
                    key=table.index)
    zero = table.zero()

    def n(up, lo):
        return N._data.get((lo, up), zero)

    def p(a, b):
        return P._data.get((a, b), zero)

    def d(x, f):
        return partial_derivative(f, x) if f.terms else zero

    r1 = {}
    for k in coords:
        for j in coords:
            total = zero
            for l in coords:
                total = total + n(k, l) * p(l, j) - p(k, l) * n(j, l)
            if total.terms:
                r1[(k, j)] = total
    r2 = {}
    for k in coords:
        for j in coords:
            for m in coords:
                total = zero
                for l in coords:
                    total = (total + p(l, j) * (d(l, n(k, m)) - d(m, n(k, l)))
                             - p(k, l) * d(l, n(j, m))
                             - n(l, m) * d(l, p(k, j))
                             + n(j, l) * d(m, p(k, l)))
                if total.terms:
                    r2[(k, j, m)] = total
    return CompatibilityResidual(r1, r2)
