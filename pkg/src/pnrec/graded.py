"""Sparse graded-commutative polynomials over the rationals.

Monomials are tuples of ``(variable_index, exponent)`` pairs sorted by the
declaration order of the owning :class:`VariableTable`.  Odd variables
anticommute and square to zero; the sign picked up while sorting is the
Koszul sign.  Derivatives are *left* derivatives throughout the package.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

KINDS = ("t", "tau", "p", "q", "novikov")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

Monomial = tuple  # tuple[tuple[int, int], ...]
Scalar = Union[int, Fraction]


class GradedAlgebraError(Exception):
    """Base class for errors raised by the algebra layer."""


class UnknownVariableError(GradedAlgebraError):
    def __init__(self, name):
        super().__init__(f"unknown variable {name!r}")
        self.name = name


class TableMismatchError(GradedAlgebraError):
    pass


def _parity(value) -> int:
    if value in (0, "even", False):
        return 0
    if value in (1, "odd", True):
        return 1
    raise ValueError(f"parity must be 'even' or 'odd', got {value!r}")


@dataclass(frozen=True)
class Variable:
    """A formal graded variable.

    ``kappa`` (orbit multiplicity) only makes sense for ``p``/``q`` kinds and
    defaults to 1 there.  ``cz`` is informational only.
    """

    name: str
    kind: str
    parity: int = 0
    zgrade: int = 0
    kappa: int | None = None
    orbit_index: int | None = None
    cz: int | None = None

    def __post_init__(self):
        if not _IDENT.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")
        if self.kind not in KINDS:
            raise ValueError(f"variable {self.name!r}: kind must be one of {KINDS}")
        object.__setattr__(self, "parity", _parity(self.parity))
        if self.kind in ("p", "q"):
            kappa = 1 if self.kappa is None else self.kappa
            if int(kappa) != kappa or kappa < 1:
                raise ValueError(f"variable {self.name!r}: kappa must be a positive integer")
            object.__setattr__(self, "kappa", int(kappa))
        elif self.kappa is not None:
            raise ValueError(f"variable {self.name!r}: kappa is only allowed for p/q variables")

    @property
    def odd(self) -> bool:
        return self.parity == 1


class VariableTable:
    """Ordered registry of variables; declaration order is the monomial order."""

    __slots__ = ("variables", "_index", "odd_mask", "has_odd", "_hash", "_window_cache")

    def __init__(self, variables: Iterable[Variable]):
        self.variables = tuple(variables)
        self._index = {}
        for i, v in enumerate(self.variables):
            if v.name in self._index:
                raise ValueError(f"duplicate variable name {v.name!r}")
            self._index[v.name] = i
        self.odd_mask = tuple(v.parity for v in self.variables)
        self.has_odd = any(self.odd_mask)
        self._hash = hash(self.variables)
        self._window_cache = {}

    def __len__(self):
        return len(self.variables)

    def __iter__(self) -> Iterator[Variable]:
        return iter(self.variables)

    def __contains__(self, name) -> bool:
        return name in self._index

    def __getitem__(self, key) -> Variable:
        if isinstance(key, int):
            return self.variables[key]
        return self.variables[self.index(key)]

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, VariableTable):
            return NotImplemented
        return self._hash == other._hash and self.variables == other.variables

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"VariableTable({', '.join(self.names)})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def index(self, name) -> int:
        if isinstance(name, Variable):
            name = name.name
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariableError(name) from None

    def var(self, name) -> "Polynomial":
        return Polynomial._make(self, {((self.index(name), 1),): Fraction(1)})

    def const(self, c: Scalar) -> "Polynomial":
        c = Fraction(c)
        return Polynomial._make(self, {(): c} if c else {})

    def zero(self) -> "Polynomial":
        return Polynomial._make(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def of_kind(self, *kinds) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.kind in kinds)

    def partner(self, name) -> Variable:
        """The canonical p <-> q partner (same orbit label and multiplicity)."""
        v = self[name]
        if v.kind not in ("p", "q"):
            raise ValueError(f"{v.name!r} is not a p/q variable")
        other = "q" if v.kind == "p" else "p"
        for w in self.variables:
            if w.kind == other and w.orbit_index == v.orbit_index and w.kappa == v.kappa:
                return w
        raise ValueError(f"{v.name!r} has no {other}-partner")

    def _out_of_window(self, max_orbit: int) -> frozenset:
        cached = self._window_cache.get(max_orbit)
        if cached is None:
            cached = frozenset(
                i for i, v in enumerate(self.variables)
                if v.kind in ("p", "q") and v.orbit_index is not None
                and abs(v.orbit_index) > max_orbit
            )
            self._window_cache[max_orbit] = cached
        return cached


@dataclass(frozen=True)
class TruncationWindow:
    """Finite window on which computations are kept.

    Drops monomials containing a p/q variable with ``|orbit_index| > max_orbit``
    and, when set, monomials of total degree above ``max_degree``.
    """

    max_orbit: int
    max_degree: int | None = None

    def __post_init__(self):
        if self.max_orbit < 1:
            raise ValueError("max_orbit must be a positive integer")
        if self.max_degree is not None and self.max_degree < 1:
            raise ValueError("max_degree must be a positive integer")


def _mul_monomials(a: Monomial, b: Monomial, odd_mask) -> tuple[Monomial, int]:
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    sign = 1
    i = j = 0
    # number of odd factors of ``a`` not yet emitted; a factor of ``b`` that
    # jumps ahead of them picks up one sign per odd factor it passes
    odd_left = sum(odd_mask[v] for v, _ in a)
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va < vb:
            out.append(a[i])
            odd_left -= odd_mask[va]
            i += 1
        elif vb < va:
            if odd_mask[vb] and odd_left & 1:
                sign = -sign
            out.append(b[j])
            j += 1
        else:
            if odd_mask[va]:
                return (), 0
            out.append((va, ea + eb))
            i += 1
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out), sign


def normalize_monomial(raw, table: VariableTable) -> tuple[Monomial, int]:
    """Sort an unordered product of variables into canonical order.

    ``raw`` is a sequence of ``(variable, exponent)`` pairs, variables given by
    name, :class:`Variable` or index.  Returns ``(monomial, sign)``; the sign
    is 0 when an odd variable occurs twice.
    """
    mono: Monomial = ()
    sign = 1
    for var, exp in raw:
        idx = var if isinstance(var, int) else table.index(var)
        exp = int(exp)
        if exp < 0:
            raise ValueError("exponents must be nonnegative")
        if exp == 0:
            continue
        if table.odd_mask[idx] and exp > 1:
            return (), 0
        mono, s = _mul_monomials(mono, ((idx, exp),), table.odd_mask)
        if s == 0:
            return (), 0
        sign *= s
    return mono, sign


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class Polynomial:
    """Immutable sparse polynomial; ``terms`` maps monomial -> nonzero Fraction."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VariableTable, terms: Mapping | None = None):
        self.table = table
        clean = {}
        for mono, c in (terms or {}).items():
            c = _as_fraction(c)
            if c:
                clean[mono] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, table, terms):
        obj = cls.__new__(cls)
        obj.table = table
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def from_terms(cls, table: VariableTable, items) -> "Polynomial":
        """Build from ``(coefficient, [(var, exp), ...])`` pairs in any order."""
        acc: dict = {}
        for coeff, raw in items:
            mono, sign = normalize_monomial(raw, table)
            if sign == 0:
                continue
            acc[mono] = acc.get(mono, 0) + sign * _as_fraction(coeff)
        return cls._make(table, {m: c for m, c in acc.items() if c})

    # -- basic protocol -------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            if other.table is not self.table and other.table != self.table:
                return False
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return not self.terms
            return self.terms == {(): other}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Polynomial({str(self)!r})"

    def __str__(self):
        from .parser import format_polynomial
        return format_polynomial(self)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.table is not self.table and other.table != self.table:
                raise TableMismatchError("polynomials belong to different variable tables")
            return other
        if isinstance(other, (int, Fraction)):
            return self.table.const(other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                del out[m]
        return Polynomial._make(self.table, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._make(self.table, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return self.table.zero()
            return Polynomial._make(self.table, {m: c * v for m, v in self.terms.items()})
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = self.table.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- inspection -----------------------------------------------------
    def monomial_parity(self, mono: Monomial) -> int:
        odd = self.table.odd_mask
        return sum(odd[v] for v, _ in mono) & 1

    def parity(self) -> int | None:
        """Parity when homogeneous (0 for the zero polynomial), else ``None``."""
        pars = {self.monomial_parity(m) for m in self.terms}
        if not pars:
            return 0
        if len(pars) == 1:
            return pars.pop()
        return None

    def parity_parts(self) -> tuple["Polynomial", "Polynomial"]:
        even, odd = {}, {}
        for m, c in self.terms.items():
            (odd if self.monomial_parity(m) else even)[m] = c
        return Polynomial._make(self.table, even), Polynomial._make(self.table, odd)

    def zgrade(self) -> int | None:
        """Total z-grading when homogeneous, else ``None``."""
        vs = self.table.variables
        grades = {sum(vs[v].zgrade * e for v, e in m) for m in self.terms}
        if len(grades) == 1:
            return grades.pop()
        return None if grades else 0

    def degree(self) -> int:
        """Total polynomial degree; -1 for the zero polynomial."""
        return max((sum(e for _, e in m) for m in self.terms), default=-1)

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def variables_used(self) -> set[str]:
        names = self.table.names
        return {names[v] for m in self.terms for v, _ in m}

    def coefficient(self, raw) -> Fraction:
        """Coefficient of a monomial given as ``[(var, exp), ...]`` in any order.

        The Koszul sign of the reordering is applied, so the result is the
        coefficient of the product exactly as written.
        """
        mono, sign = normalize_monomial(raw, self.table)
        if sign == 0:
            return Fraction(0)
        return sign * self.terms.get(mono, Fraction(0))

    def items(self):
        """Terms as ``(coefficient, {name: exponent})`` in canonical order."""
        names = self.table.names
        for m in sorted(self.terms, key=monomial_sort_key):
            yield self.terms[m], {names[v]: e for v, e in m}

    def pq_degree(self, mono: Monomial) -> int:
        vs = self.table.variables
        return sum(e for v, e in mono if vs[v].kind in ("p", "q"))

    # -- operations -----------------------------------------------------
    def diff(self, var) -> "Polynomial":
        return partial_derivative(self, var)

    def truncate(self, window: TruncationWindow) -> "Polynomial":
        return truncate(self, window)

    def filter(self, predicate) -> "Polynomial":
        """Keep the terms whose monomial satisfies ``predicate(mono)``."""
        return Polynomial._make(self.table, {m: c for m, c in self.terms.items() if predicate(m)})

    def pq_part(self) -> "Polynomial":
        """The terms containing at least one p/q variable."""
        vs = self.table.variables
        return self.filter(lambda m: any(vs[v].kind in ("p", "q") for v, _ in m))

    def is_pq_free(self) -> bool:
        return not self.pq_part()

    def set_zero(self, names: Iterable[str]) -> "Polynomial":
        """Restrict to the locus where the given variables vanish."""
        idx = {self.table.index(n) for n in names}
        return self.filter(lambda m: not any(v in idx for v, _ in m))

    def retable(self, table: VariableTable) -> "Polynomial":
        """Move to another table by variable name (reordering with signs)."""
        if table is self.table or table == self.table:
            return self
        names = self.table.names
        return Polynomial.from_terms(
            table, ((c, [(names[v], e) for v, e in m]) for m, c in self.terms.items())
        )


def monomial_sort_key(mono: Monomial):
    return (sum(e for _, e in mono), mono)


def mul(f: Polynomial, g: Polynomial) -> Polynomial:
    """Graded-commutative product with Koszul signs."""
    if f.table is not g.table and f.table != g.table:
        raise TableMismatchError("polynomials belong to different variable tables")
    if not f.terms or not g.terms:
        return f.table.zero()
    odd = f.table.odd_mask
    out: dict = {}
    get = out.get
    if not f.table.has_odd:
        for ma, ca in f.terms.items():
            for mb, cb in g.terms.items():
                if not ma:
                    m = mb
                elif not mb:
                    m = ma
                else:
                    d = dict(ma)
                    for v, e in mb:
                        d[v] = d.get(v, 0) + e
                    m = tuple(sorted(d.items()))
                out[m] = get(m, 0) + ca * cb
    else:
        for ma, ca in f.terms.items():
            for mb, cb in g.terms.items():
                m, s = _mul_monomials(ma, mb, odd)
                if s:
                    out[m] = get(m, 0) + s * ca * cb
    return Polynomial._make(f.table, {m: c for m, c in out.items() if c})


def partial_derivative(f: Polynomial, var) -> Polynomial:
    """Left graded derivative: move ``var`` to the front, then strip it."""
    idx = var if isinstance(var, int) else f.table.index(var)
    odd = f.table.odd_mask
    var_odd = odd[idx]
    out: dict = {}
    for mono, c in f.terms.items():
        for pos, (v, e) in enumerate(mono):
            if v == idx:
                break
        else:
            continue
        if var_odd:
            if sum(odd[w] for w, _ in mono[:pos]) & 1:
                c = -c
            rest = mono[:pos] + mono[pos + 1:]
        else:
            c = c * e
            rest = mono[:pos] + ((v, e - 1),) + mono[pos + 1:] if e > 1 else mono[:pos] + mono[pos + 1:]
        out[rest] = out.get(rest, 0) + c
    return Polynomial._make(f.table, {m: c for m, c in out.items() if c})


def truncate(f: Polynomial, window: TruncationWindow) -> Polynomial:
    """Linear idempotent projection onto the monomials inside ``window``."""
    bad = f.table._out_of_window(window.max_orbit)
    maxdeg = window.max_degree

    def keep(m):
        if maxdeg is not None and sum(e for _, e in m) > maxdeg:
            return False
        return not any(v in bad for v, _ in m)

    return f.filter(keep)


def check_homogeneous(f: Polynomial, zgrade: int) -> bool:
    """Optional grading validator: every term has z-grading ``zgrade``."""
    return f.is_zero() or f.zgrade() == zgrade
