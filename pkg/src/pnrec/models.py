"""Computable model instances: the S^1 examples, a so(3) pencil, closed-form
oracles for the S^1 towers, and the JSON model document format."""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path

from .graded import (
    KINDS,
    GradedAlgebraError,
    Polynomial,
    TruncationWindow,
    Variable,
    VariableTable,
    check_homogeneous,
)
from .parser import ParseError, format_polynomial, parse_expression
from .poisson import PoissonPencil, StructuralPoisson
from .recursion import (
    CohomologyRing,
    DescendantTower,
    RingError,
    c_coefficients,
    ch_tower,
    compositions,
    multiset_orderings,
    sft_tower,
)
from .tensors import Bivector, Endomorphism11, TensorError, VectorField


class ModelError(ValueError):
    """Invalid model document; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


@dataclass(eq=False)
class Model:
    table: VariableTable
    window: TruncationWindow | None = None
    N: Endomorphism11 | None = None
    omega: Bivector | None = None
    primaries: dict = field(default_factory=dict)
    ring: CohomologyRing | None = None
    pencil: PoissonPencil | None = None
    grading_checks: bool = False

    def __post_init__(self):
        self.structural_poisson = (StructuralPoisson(self.table)
                                   if self.table.of_kind("p", "q") else None)
        if self.grading_checks:
            check_gradings(self)

    def __eq__(self, other):
        if not isinstance(other, Model):
            return NotImplemented
        return (self.table == other.table and self.window == other.window and self.N == other.N
                and self.omega == other.omega and self.primaries == other.primaries
                and self.ring == other.ring and _pencil_eq(self.pencil, other.pencil)
                and self.grading_checks == other.grading_checks)

    # -- derived data ---------------------------------------------------
    def c_table(self, m: int, alpha: str) -> dict:
        """C-coefficients at ``tau = 0``, moved onto the model's table."""
        if self.ring is None:
            raise ModelError("ring", "model has no cohomology ring")
        taus = [v.name for v in self.ring.table if v.kind == "tau"]
        out = {}
        for mu, c in c_coefficients(self.ring, m, alpha).items():
            c = c.set_zero(taus)
            if c.terms:
                out[mu] = c.retable(self.table)
        return out

    def ch_tower(self, levels: int, classes=None) -> DescendantTower:
        if self.N is None:
            raise ModelError("endomorphism", "model has no (1,1)-tensor")
        return ch_tower(self.N, self.primaries, self.c_table, levels, classes, self.window)

    def sft_seeds(self) -> dict:
        """Casimir seeds ``h_{alpha,-1} = t^alpha`` for the even classes.

        This is ``eta_{alpha beta} t^beta`` with the seed labelled by the
        class dual to ``alpha``; for ``H*(S^1)`` it is ``h_{1,-1} = t1``.
        """
        out = {}
        for cls, var, par in zip(self.ring.basis, self.ring.variables, self.ring.parities):
            if par == 0 and var in self.table:
                out[cls] = self.table.var(var)
        return out

    def sft_tower(self, levels: int, classes=None, normalization=None) -> DescendantTower:
        if self.omega is None or self.structural_poisson is None:
            raise ModelError("bivector", "model has no omega bivector or p/q variables")
        seeds = self.sft_seeds()
        if classes is not None:
            seeds = {c: seeds[c] for c in classes}
        return sft_tower(self.structural_poisson, self.omega, seeds, levels, normalization, self.window)

    def fingerprint(self) -> str:
        return fingerprint(self)


def _pencil_eq(a, b):
    if a is None or b is None:
        return a is b
    return a.P1 == b.P1 and a.P2 == b.P2


def check_gradings(model: Model):
    """Entries of N and omega must be z-homogeneous of tensor degree -2."""
    t = model.table
    if model.N is not None:
        for (lo, up), f in model.N.entries.items():
            want = -2 - t[lo].zgrade + t[up].zgrade
            if not check_homogeneous(f, want):
                raise ModelError(f"endomorphism[{lo},{up}]", f"entry {f} is not of degree {want}")
    if model.omega is not None:
        for (a, b), f in model.omega.entries.items():
            want = -2 + t[a].zgrade + t[b].zgrade
            if not check_homogeneous(f, want):
                raise ModelError(f"bivector[{a},{b}]", f"entry {f} is not of degree {want}")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def s1_ring() -> CohomologyRing:
    """``H*(S^1)`` with basis ``1, dphi`` and coordinates ``t1, tau1``."""
    return CohomologyRing(
        basis=("1", "dphi"),
        degrees=(0, 1),
        parities=(0, 1),
        products={("1", "1"): {"1": 1}, ("1", "dphi"): {"dphi": 1}, ("dphi", "1"): {"dphi": 1}},
        integral={"dphi": 1},
        eta=((0, 1), (1, 0)),
        variables=("t1", "tau1"),
    )


def build_s1_ch_model(K: int) -> Model:
    """Contact-homology model of the S^1 orbits up to multiplicity ``K``.

    Variables ``t1, q1..qK`` (even, ``kappa = k``); ``N_k^l = ((l-k)/k) q^(l-k)``
    for ``l > k``; primary field ``X^k = k q^k``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    table = VariableTable([Variable("t1", "t")]
                          + [Variable(f"q{k}", "q", kappa=k, orbit_index=k) for k in range(1, K + 1)])
    q = {k: table.var(f"q{k}") for k in range(1, K + 1)}
    entries = {}
    for k in range(1, K + 1):
        for l in range(k + 1, K + 1):
            entries[(f"q{k}", f"q{l}")] = q[l - k] * Fraction(l - k, k)
    N = Endomorphism11(table, entries)
    X = VectorField(table, {f"q{k}": q[k] * k for k in q})
    return Model(table, TruncationWindow(K), N=N, primaries={"1": X}, ring=s1_ring())


def s1_sft_names(K: int) -> dict:
    """Map orbit label ``k`` (``-K..K``) to the variable name of ``v^k``."""
    names = {0: "t1"}
    for k in range(1, K + 1):
        names[k] = f"p{k}"
        names[-k] = f"q{k}"
    return names


def build_s1_sft_model(K: int) -> Model:
    """Rational-SFT model of the S^1 orbits up to multiplicity ``K``.

    ``v^k = p_k`` and ``v^-k = q_k`` with ``kappa = k``; ``v^0`` is ``t1``.
    ``omega^{kl} = (k+l) v^(k+l)`` for ``|k+l| <= K``, including the ``t1`` row.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    table = VariableTable([Variable("t1", "t")]
                          + [Variable(f"q{k}", "q", kappa=k, orbit_index=k) for k in range(1, K + 1)]
                          + [Variable(f"p{k}", "p", kappa=k, orbit_index=k) for k in range(1, K + 1)])
    names = s1_sft_names(K)
    entries = {}
    for a in range(-K, K + 1):
        for b in range(-K, K + 1):
            s = a + b
            if s != 0 and abs(s) <= K:
                entries[(names[a], names[b])] = table.var(names[s]) * s
    omega = Bivector(table, entries, "symmetric")
    return Model(table, TruncationWindow(K), omega=omega, ring=s1_ring())


def build_so3_pencil() -> Model:
    """``P2`` = so(3) Lie-Poisson, ``P1`` constant with ``{x,y} = 1``."""
    table = VariableTable([Variable(n, "t") for n in "xyz"])
    x, y, z = (table.var(n) for n in "xyz")
    P2 = Bivector.from_upper(table, {("x", "y"): z, ("y", "z"): x, ("z", "x"): y})
    P1 = Bivector.from_upper(table, {("x", "y"): table.one()})
    return Model(table, pencil=PoissonPencil(P1, P2))


_BUILTIN = re.compile(r"^s1_(ch|sft)_K(\d+)$")


def builtin_model(name: str) -> Model:
    """Resolve ``s1_ch_K<k>``, ``s1_sft_K<k>`` or ``so3_const``."""
    if name == "so3_const":
        return build_so3_pencil()
    m = _BUILTIN.match(name)
    if not m:
        raise KeyError(f"unknown builtin model {name!r}")
    K = int(m.group(2))
    return build_s1_ch_model(K) if m.group(1) == "ch" else build_s1_sft_model(K)


def is_builtin(name: str) -> bool:
    return name == "so3_const" or bool(_BUILTIN.match(name))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def s1_ch_field_component(n: int, l: int, table: VariableTable, literal: bool = False) -> Polynomial:
    """Closed form of ``X_{1,n}`` at ``q^l`` with ``q^0 = t1``.

    The recursion gives ``l/(n+1)! * sum over (n+1)-tuples k_i >= 0 with
    sum l`` of ``q^k_0 ... q^k_n``.  With ``literal=True`` the n-tuple form
    ``l/(n-1)! * sum over n-tuples`` is returned instead (it disagrees with
    the recursion, kept for comparison).
    """
    parts, norm = (n, factorial(n - 1)) if literal else (n + 1, factorial(n + 1))
    if literal and n < 1:
        raise ValueError("the n-tuple form needs n >= 1")
    name = lambda k: "t1" if k == 0 else f"q{k}"  # noqa: E731
    items = []
    for combo in compositions(l, parts, range(0, l + 1)):
        coeff = Fraction(l * multiset_orderings(combo), norm)
        items.append((coeff, [(name(k), 1) for k in combo]))
    return Polynomial.from_terms(table, items)


def s1_sft_hamiltonian(n: int, table: VariableTable, W: int, with_t: bool = False) -> Polynomial:
    """``1/(n+2)! * sum over (n+2)-tuples of orbit labels in [-W, W] summing to 0``.

    Labels are taken from ``Z \\ {0}``, or from ``Z`` with ``v^0 = t1`` when
    ``with_t`` is set.
    """
    names = s1_sft_names(W)
    labels = [k for k in range(-W, W + 1) if with_t or k != 0]
    items = []
    for combo in compositions(0, n + 2, labels):
        coeff = Fraction(multiset_orderings(combo), factorial(n + 2))
        items.append((coeff, [(names[k], 1) for k in combo]))
    return Polynomial.from_terms(table, items)


def s1_closed_forms(kind: str, n: int, component: int | None = None, window: int = 8,
                    table: VariableTable | None = None, **options) -> Polynomial:
    """Closed-form oracle values for the S^1 towers.

    ``kind="ch_field"``: component ``q^component`` of ``X_{1,n}``;
    ``kind="sft_hamiltonian"``: ``h_{1,n}`` on orbit labels ``|k| <= window``.
    """
    if kind == "ch_field":
        if component is None or not 1 <= component <= window:
            raise ValueError(f"component must lie in 1..{window}")
        table = table or build_s1_ch_model(window).table
        return s1_ch_field_component(n, component, table, **options)
    if kind == "sft_hamiltonian":
        table = table or build_s1_sft_model(window).table
        if f"p{window}" not in table:
            raise ValueError(f"window {window} exceeds the table")
        return s1_sft_hamiltonian(n, table, window, **options)
    raise ValueError(f"unknown closed form kind {kind!r}")


def s1_pure_t_normalization(model: Model):
    """Normalization rule giving ``h_{1,n}`` the pure-t part ``t1^(n+2)/(n+2)!``."""
    t1 = model.table.var("t1")
    return lambda n, cls: t1 ** (n + 2) / factorial(n + 2)


# ---------------------------------------------------------------------------
# document format
# ---------------------------------------------------------------------------

TOP_KEYS = ("variables", "window", "endomorphism", "bivector", "primaries", "ring", "pencil", "flags")
_VAR_KEYS = {"name", "kind", "parity", "zgrade", "kappa", "orbit_index", "cz"}


def _expect(cond, path, message):
    if not cond:
        raise ModelError(path, message)


def _keys(obj, allowed, required, path):
    _expect(isinstance(obj, dict), path, "expected an object")
    for k in obj:
        _expect(k in allowed, f"{path}.{k}" if path else k, "unknown key")
    for k in required:
        _expect(k in obj, path, f"missing key {k!r}")


def _int(v, path, minimum=None):
    _expect(isinstance(v, int) and not isinstance(v, bool), path, "expected an integer")
    if minimum is not None:
        _expect(v >= minimum, path, f"must be >= {minimum}")
    return v


def _rational(v, path) -> Fraction:
    if isinstance(v, bool):
        raise ModelError(path, "expected a rational")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            pass
    raise ModelError(path, "expected an integer or a rational string like '3/2'")


def _expr(text, table, path) -> Polynomial:
    _expect(isinstance(text, str), path, "expected an expression string")
    try:
        return parse_expression(text, table)
    except ParseError as exc:
        raise ModelError(path, str(exc)) from None


def _name(v, table, path):
    _expect(isinstance(v, str), path, "expected a variable name")
    _expect(v in table, path, f"unknown variable {v!r}")
    return v


def _load_bivector(obj, table, path, symmetry=None) -> Bivector:
    _keys(obj, {"symmetry", "entries"}, ["entries"], path)
    sym = obj.get("symmetry", symmetry or "antisymmetric")
    _expect(sym in ("symmetric", "antisymmetric"), f"{path}.symmetry", "must be symmetric or antisymmetric")
    _expect(isinstance(obj["entries"], list), f"{path}.entries", "expected a list")
    entries = {}
    for i, e in enumerate(obj["entries"]):
        p = f"{path}.entries[{i}]"
        _keys(e, {"a", "b", "expr"}, ["a", "b", "expr"], p)
        key = (_name(e["a"], table, f"{p}.a"), _name(e["b"], table, f"{p}.b"))
        _expect(key not in entries, p, "duplicate entry")
        entries[key] = _expr(e["expr"], table, f"{p}.expr")
    try:
        return Bivector(table, entries, sym)
    except TensorError as exc:
        raise ModelError(path, str(exc)) from None


def _load_ring(obj, path) -> CohomologyRing:
    _keys(obj, {"basis", "degrees", "parities", "products", "integral", "eta", "variables"},
          ["basis", "degrees", "parities", "products", "integral", "eta", "variables"], path)
    basis = obj["basis"]
    _expect(isinstance(basis, list) and all(isinstance(b, str) for b in basis),
            f"{path}.basis", "expected a list of class names")
    degrees = [_int(d, f"{path}.degrees[{i}]") for i, d in enumerate(obj["degrees"])]
    parities = []
    for i, p in enumerate(obj["parities"]):
        _expect(p in ("even", "odd"), f"{path}.parities[{i}]", "expected 'even' or 'odd'")
        parities.append(1 if p == "odd" else 0)
    products = {}
    _expect(isinstance(obj["products"], list), f"{path}.products", "expected a list")
    for i, e in enumerate(obj["products"]):
        p = f"{path}.products[{i}]"
        _keys(e, {"a", "b", "c", "coeff"}, ["a", "b", "c", "coeff"], p)
        res = products.setdefault((e["a"], e["b"]), {})
        res[e["c"]] = res.get(e["c"], 0) + _rational(e["coeff"], f"{p}.coeff")
    _expect(isinstance(obj["integral"], dict), f"{path}.integral", "expected an object")
    integral = {c: _rational(v, f"{path}.integral.{c}") for c, v in obj["integral"].items()}
    _expect(isinstance(obj["eta"], list), f"{path}.eta", "expected a matrix")
    eta = [[_rational(v, f"{path}.eta[{i}][{j}]") for j, v in enumerate(row)]
           for i, row in enumerate(obj["eta"])]
    try:
        return CohomologyRing(tuple(basis), tuple(degrees), tuple(parities), products, integral,
                              tuple(tuple(r) for r in eta), tuple(obj["variables"]))
    except (RingError, GradedAlgebraError, ValueError) as exc:
        raise ModelError(path, str(exc)) from None


def load_model(document) -> Model:
    """Validate a model document (JSON text, path or parsed object) into a Model."""
    if isinstance(document, Path):
        document = document.read_text()
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ModelError("", f"invalid JSON: {exc}") from None
    _keys(document, set(TOP_KEYS), ["variables"], "")
    variables = []
    _expect(isinstance(document["variables"], list), "variables", "expected a list")
    for i, v in enumerate(document["variables"]):
        p = f"variables[{i}]"
        _keys(v, _VAR_KEYS, ["name", "kind", "parity"], p)
        _expect(v["kind"] in KINDS, f"{p}.kind", f"must be one of {KINDS}")
        _expect(v["parity"] in ("even", "odd"), f"{p}.parity", "expected 'even' or 'odd'")
        kw = {k: _int(v[k], f"{p}.{k}", 1 if k == "kappa" else None)
              for k in ("zgrade", "kappa", "orbit_index", "cz") if k in v}
        try:
            variables.append(Variable(v["name"], v["kind"], v["parity"], **kw))
        except ValueError as exc:
            raise ModelError(p, str(exc)) from None
    try:
        table = VariableTable(variables)
    except ValueError as exc:
        raise ModelError("variables", str(exc)) from None
    for v in table.of_kind("p"):
        partners = [w for w in table.of_kind("q")
                    if w.orbit_index == v.orbit_index and w.kappa == v.kappa]
        _expect(len(partners) == 1, "variables", f"unpaired p-variable {v.name!r}")

    window = None
    if "window" in document:
        w = document["window"]
        _keys(w, {"max_orbit", "max_degree"}, ["max_orbit"], "window")
        window = TruncationWindow(_int(w["max_orbit"], "window.max_orbit", 1),
                                  _int(w["max_degree"], "window.max_degree", 1)
                                  if w.get("max_degree") is not None else None)
    N = None
    if "endomorphism" in document:
        _expect(isinstance(document["endomorphism"], list), "endomorphism", "expected a list")
        entries = {}
        for i, e in enumerate(document["endomorphism"]):
            p = f"endomorphism[{i}]"
            _keys(e, {"lower", "upper", "expr"}, ["lower", "upper", "expr"], p)
            key = (_name(e["lower"], table, f"{p}.lower"), _name(e["upper"], table, f"{p}.upper"))
            _expect(key not in entries, p, "duplicate entry")
            entries[key] = _expr(e["expr"], table, f"{p}.expr")
        N = Endomorphism11(table, entries)
    omega = _load_bivector(document["bivector"], table, "bivector") if "bivector" in document else None
    primaries = {}
    if "primaries" in document:
        _expect(isinstance(document["primaries"], dict), "primaries", "expected an object")
        for cls, comps in document["primaries"].items():
            p = f"primaries.{cls}"
            _expect(isinstance(comps, list), p, "expected a list")
            data = {}
            for i, e in enumerate(comps):
                _keys(e, {"var", "expr"}, ["var", "expr"], f"{p}[{i}]")
                data[_name(e["var"], table, f"{p}[{i}].var")] = _expr(e["expr"], table, f"{p}[{i}].expr")
            primaries[cls] = VectorField(table, data)
    ring = _load_ring(document["ring"], "ring") if "ring" in document else None
    if ring is not None:
        for cls in primaries:
            _expect(cls in ring.basis, f"primaries.{cls}", "class not in the ring basis")
    pencil = None
    if "pencil" in document:
        pc = document["pencil"]
        _keys(pc, {"P1", "P2"}, ["P1", "P2"], "pencil")
        P1 = _load_bivector(pc["P1"], table, "pencil.P1", "antisymmetric")
        P2 = _load_bivector(pc["P2"], table, "pencil.P2", "antisymmetric")
        try:
            pencil = PoissonPencil(P1, P2)
        except (ValueError, TensorError) as exc:
            raise ModelError("pencil", str(exc)) from None
    flags = document.get("flags", {})
    _keys(flags, {"grading_checks"}, [], "flags")
    gc = flags.get("grading_checks", False)
    _expect(isinstance(gc, bool), "flags.grading_checks", "expected true or false")
    try:
        return Model(table, window, N, omega, primaries, ring, pencil, gc)
    except ValueError as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError("", str(exc)) from None


def _entries_sorted(table, entries: dict):
    return sorted(entries.items(), key=lambda kv: tuple(table.index(k) for k in kv[0]))


def _dump_bivector(B: Bivector, with_symmetry=True) -> dict:
    out = {"entries": [{"a": a, "b": b, "expr": format_polynomial(f)}
                       for (a, b), f in _entries_sorted(B.table, B.entries)]}
    if with_symmetry:
        out = {"symmetry": B.symmetry, **out}
    return out


def _frac(v: Fraction):
    return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def dump_model(model: Model) -> dict:
    """Serialize to the document format (canonical key and entry order)."""
    t = model.table
    doc: dict = {"variables": []}
    for v in t:
        d = {"name": v.name, "kind": v.kind, "parity": "odd" if v.parity else "even"}
        if v.zgrade:
            d["zgrade"] = v.zgrade
        if v.kind in ("p", "q"):
            d["kappa"] = v.kappa
        if v.orbit_index is not None:
            d["orbit_index"] = v.orbit_index
        if v.cz is not None:
            d["cz"] = v.cz
        doc["variables"].append(d)
    if model.window is not None:
        doc["window"] = {"max_orbit": model.window.max_orbit}
        if model.window.max_degree is not None:
            doc["window"]["max_degree"] = model.window.max_degree
    if model.N is not None:
        doc["endomorphism"] = [{"lower": lo, "upper": up, "expr": format_polynomial(f)}
                               for (lo, up), f in _entries_sorted(t, model.N.entries)]
    if model.omega is not None:
        doc["bivector"] = _dump_bivector(model.omega)
    if model.primaries:
        doc["primaries"] = {
            cls: [{"var": a, "expr": format_polynomial(X[a])} for a in X]
            for cls, X in sorted(model.primaries.items())
        }
    if model.ring is not None:
        r = model.ring
        doc["ring"] = {
            "basis": list(r.basis),
            "degrees": list(r.degrees),
            "parities": ["odd" if p else "even" for p in r.parities],
            "variables": list(r.variables),
            "products": [{"a": a, "b": b, "c": c, "coeff": _frac(v)}
                         for (a, b), res in sorted(r.products.items(),
                                                   key=lambda kv: (r.basis.index(kv[0][0]),
                                                                   r.basis.index(kv[0][1])))
                         for c, v in sorted(res.items(), key=lambda kv: r.basis.index(kv[0]))],
            "integral": {c: _frac(v) for c, v in sorted(r.integral.items(),
                                                        key=lambda kv: r.basis.index(kv[0]))},
            "eta": [[_frac(v) for v in row] for row in r.eta],
        }
    if model.pencil is not None:
        doc["pencil"] = {"P1": _dump_bivector(model.pencil.P1, False),
                         "P2": _dump_bivector(model.pencil.P2, False)}
    doc["flags"] = {"grading_checks": model.grading_checks}
    return doc


def canonical_json(model: Model) -> str:
    return json.dumps(dump_model(model), sort_keys=True, separators=(",", ":"))


def fingerprint(model: Model) -> str:
    """SHA-256 of the canonical serialization."""
    return hashlib.sha256(canonical_json(model).encode()).hexdigest()


def resolve_model(spec: str) -> Model:
    """A builtin name or a path to a model document."""
    if is_builtin(spec):
        return builtin_model(spec)
    path = Path(spec)
    if not path.exists():
        raise FileNotFoundError(f"no such model file or builtin: {spec!r}")
    return load_model(path)
