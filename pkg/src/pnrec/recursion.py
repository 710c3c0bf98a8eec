"""Descendant recursions: C-coefficients from a cohomology ring, the
contact-homology N-recursion, the rational-SFT omega-recursion, the Euler
operator and commutativity checks on truncated towers."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable, Mapping

from . import linalg
from .graded import Polynomial, TruncationWindow, Variable, VariableTable, partial_derivative
from .poisson import StructuralPoisson, integrate_hamiltonian, poisson_bracket
from .tensors import (
    Bivector,
    Endomorphism11,
    VectorField,
    apply_endomorphism,
    contract_bivector,
    differential,
    lie_bracket,
)


class RingError(ValueError):
    pass


class MissingPrimary(KeyError):
    pass


class WindowTooSmall(Exception):
    def __init__(self, required: int, available: int):
        super().__init__(f"window too small: need max_orbit >= {required}, have {available}")
        self.required = required
        self.available = available


# ---------------------------------------------------------------------------
# cohomology ring and C-coefficients
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CohomologyRing:
    """Finite graded ring with integration and pairing.

    ``products[(a, b)]`` maps result classes to rationals,
    ``integral[c]`` is the integral of class ``c`` and ``eta[i][j]`` the
    pairing of basis classes ``i`` and ``j``.  ``variables`` names the formal
    coordinate attached to each class (even classes get kind ``t``, odd
    classes kind ``tau``).
    """

    basis: tuple
    degrees: tuple
    parities: tuple
    products: dict
    integral: dict
    eta: tuple
    variables: tuple

    def __post_init__(self):
        self.basis = tuple(self.basis)
        self.degrees = tuple(int(d) for d in self.degrees)
        self.parities = tuple(int(p) for p in self.parities)
        self.variables = tuple(self.variables)
        n = len(self.basis)
        if len(set(self.basis)) != n:
            raise RingError("duplicate class names")
        for name, seq in (("degrees", self.degrees), ("parities", self.parities),
                          ("variables", self.variables), ("eta", self.eta)):
            if len(seq) != n:
                raise RingError(f"{name} has length {len(seq)}, expected {n}")
        if any(p not in (0, 1) for p in self.parities):
            raise RingError("parities must be 0 or 1")
        products = {}
        for (a, b), res in self.products.items():
            for c in (a, b, *res):
                if c not in self.basis:
                    raise RingError(f"unknown class {c!r} in products")
            clean = {c: Fraction(v) for c, v in res.items() if Fraction(v)}
            if clean:
                products[(a, b)] = clean
        self.products = products
        self.integral = {c: Fraction(v) for c, v in self.integral.items() if Fraction(v)}
        self.eta = tuple(tuple(Fraction(v) for v in row) for row in self.eta)
        self._validate()
        self.table = VariableTable(
            Variable(v, "tau" if p else "t", p, 2 - d)
            for v, p, d in zip(self.variables, self.parities, self.degrees)
        )
        self.eta_inverse = tuple(tuple(row) for row in linalg.invert([list(r) for r in self.eta]))

    def __eq__(self, other):
        if not isinstance(other, CohomologyRing):
            return NotImplemented
        return (self.basis, self.degrees, self.parities, self.products, self.integral,
                self.eta, self.variables) == (other.basis, other.degrees, other.parities,
                                              other.products, other.integral, other.eta,
                                              other.variables)

    def _deg(self, c):
        return self.degrees[self.basis.index(c)]

    def _par(self, c):
        return self.parities[self.basis.index(c)]

    def product(self, a, b) -> dict:
        return self.products.get((a, b), {})

    def _mul_classes(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, v in self.product(a, b).items():
                    out[c] = out.get(c, 0) + ca * cb * v
        return {c: v for c, v in out.items() if v}

    def _validate(self):
        for c in self.integral:
            if c not in self.basis:
                raise RingError(f"unknown class {c!r} in integral")
        top = max(self.degrees, default=0)
        for c in self.integral:
            if self._deg(c) != top:
                raise RingError(f"integral of {c!r} must vanish off top degree {top}")
        for (a, b), res in self.products.items():
            for c in res:
                if self._deg(c) != self._deg(a) + self._deg(b):
                    raise RingError(f"product {a}*{b} has a term {c!r} of the wrong degree")
            s = -1 if self._par(a) * self._par(b) else 1
            swapped = self.product(b, a)
            if swapped != {c: s * v for c, v in res.items()}:
                raise RingError(f"product of {a!r} and {b!r} is not graded-commutative")
        for (a, b, c) in ((a, b, c) for a in self.basis for b in self.basis for c in self.basis):
            left = self._mul_classes(self._mul_classes({a: 1}, {b: 1}), {c: 1})
            right = self._mul_classes({a: 1}, self._mul_classes({b: 1}, {c: 1}))
            if left != right:
                raise RingError(f"product is not associative on ({a}, {b}, {c})")
        for i, a in enumerate(self.basis):
            for j, b in enumerate(self.basis):
                pairing = sum((self.integral.get(c, 0) * v for c, v in self.product(a, b).items()),
                              Fraction(0))
                if pairing != self.eta[i][j]:
                    raise RingError(f"eta[{a}][{b}] = {self.eta[i][j]} but the integral gives {pairing}")
        try:
            linalg.invert([list(r) for r in self.eta])
        except ValueError:
            raise RingError("degenerate pairing eta") from None

    def variable(self, cls: str) -> str:
        return self.variables[self.basis.index(cls)]

    # elements of ring (x) polynomials are dicts class -> Polynomial
    def _mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, f in x.items():
            odd_a = self._par(a)
            for b, g in y.items():
                prod = self.product(a, b)
                if not prod:
                    continue
                if odd_a:
                    ge, go = g.parity_parts()
                    g = ge - go
                fg = f * g
                for c, v in prod.items():
                    term = fg * v
                    out[c] = out[c] + term if c in out else term
        return {c: f for c, f in out.items() if f.terms}

    def generic_class(self) -> dict:
        """``t = sum_alpha t^alpha theta_alpha``."""
        return {c: self.table.var(v) for c, v in zip(self.basis, self.variables)}

    def potential(self, m: int) -> Polynomial:
        """``integral of t^m / m!`` as a polynomial in the ring coordinates."""
        t = self.generic_class()
        power = t
        for _ in range(m - 1):
            power = self._mul(power, t)
        total = self.table.zero()
        for c, v in self.integral.items():
            if c in power:
                total = total + power[c] * v
        return total / factorial(m)


def c_coefficients(ring: CohomologyRing, n: int, alpha: str) -> dict[str, Polynomial]:
    """``C^mu_{alpha,n} = d_alpha d_nu (integral t^(n+3)/(n+3)!) eta^{nu mu}``.

    Returns the nonzero entries keyed by class name, as polynomials in the
    ring's coordinate table.
    """
    if n < -1:
        raise ValueError("n must be >= -1")
    if alpha not in ring.basis:
        raise RingError(f"unknown class {alpha!r}")
    F = ring.potential(n + 3)
    a_var = ring.variable(alpha)
    out = {}
    for j, mu in enumerate(ring.basis):
        total = ring.table.zero()
        for i, nu in enumerate(ring.basis):
            e = ring.eta_inverse[i][j]
            if e:
                total = total + partial_derivative(partial_derivative(F, ring.variable(nu)), a_var) * e
        if total.terms:
            out[mu] = total
    return out


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

@dataclass
class DescendantTower:
    """Levels ``start, start+1, ...`` of per-class fields or Hamiltonians.

    ``certified[i]`` is the orbit bound on which level ``start + i`` is known
    to be exact (``None`` when the level is exact on the whole window).
    """

    kind: str
    start: int
    levels: list[dict]
    window: TruncationWindow | None = None
    certified: list = field(default_factory=list)
    step: Callable | None = field(default=None, repr=False, compare=False)

    @property
    def stop(self) -> int:
        return self.start + len(self.levels) - 1

    def level(self, n: int) -> dict:
        if not self.start <= n <= self.stop:
            raise IndexError(f"level {n} not in [{self.start}, {self.stop}]")
        return self.levels[n - self.start]

    def entry(self, n: int, cls: str):
        return self.level(n)[cls]

    def labelled(self):
        """``((n, cls), value)`` pairs in level order."""
        for i, lev in enumerate(self.levels):
            for cls in sorted(lev):
                yield (self.start + i, cls), lev[cls]

    def recheck(self) -> list:
        """Levels ``n`` whose stored value disagrees with one recursion step from ``n - 1``."""
        bad = []
        if self.step is None:
            return bad
        for n in range(self.start + 1, self.stop + 1):
            for cls, value in self.level(n).items():
                again = self.step(n, cls, self.level(n - 1)[cls])
                W = self.certified[n - self.start] if self.certified else None
                if self.kind == "sft" and W is not None:
                    w = TruncationWindow(W)
                    if (again - value).truncate(w).terms:
                        bad.append((n, cls))
                elif again != value:
                    bad.append((n, cls))
        return bad


def ch_step(N: Endomorphism11, X_prev: VectorField, C: Mapping[str, Polynomial],
            primaries: Mapping[str, VectorField]) -> VectorField:
    """``X_{alpha,n} = N(X_{alpha,n-1}) + C^mu_{alpha,n-1} X_{mu,0}``."""
    out = apply_endomorphism(N, X_prev)
    for mu, c in C.items():
        if not c.terms:
            continue
        if mu not in primaries:
            raise MissingPrimary(f"no primary field for class {mu!r}")
        out = out + primaries[mu].scale(c)
    return out


def ch_closed_form(N: Endomorphism11, primaries: Mapping[str, VectorField],
                   c_table: Callable[[int], Mapping[str, Polynomial]], n: int) -> VectorField:
    """``X_{alpha,n} = sum_{k=0}^{n} C^mu_{alpha,n-k-1} N^k(X_{mu,0})``.

    ``c_table(m)`` returns the coefficients ``C^mu_{alpha,m}`` for the class
    ``alpha`` of interest.
    """
    table = N.table
    out = VectorField(table)
    powers = {mu: X for mu, X in primaries.items()}
    for k in range(n + 1):
        for mu, c in c_table(n - k - 1).items():
            if not c.terms:
                continue
            if mu not in powers:
                raise MissingPrimary(f"no primary field for class {mu!r}")
            out = out + powers[mu].scale(c)
        powers = {mu: apply_endomorphism(N, X) for mu, X in powers.items()}
    return out


def ch_tower(N: Endomorphism11, primaries: Mapping[str, VectorField],
             c_table: Callable[[int, str], Mapping[str, Polynomial]], levels: int,
             classes=None, window: TruncationWindow | None = None) -> DescendantTower:
    """Levels ``0..levels`` of the N-recursion seeded by the primaries."""
    classes = sorted(primaries) if classes is None else list(classes)

    def step(n, cls, prev):
        return ch_step(N, prev, c_table(n - 1, cls), primaries)

    out = [{cls: primaries[cls] for cls in classes}]
    for n in range(1, levels + 1):
        out.append({cls: step(n, cls, out[-1][cls]) for cls in classes})
    return DescendantTower("ch", 0, out, window, [None] * len(out), step)


def _pq_factors(h: Polynomial) -> int:
    return max((h.pq_degree(m) for m in h.terms), default=0)


def sft_step(P: StructuralPoisson, omega: Bivector, h_prev: Polynomial,
             normalization: Polynomial | None = None,
             window: TruncationWindow | None = None) -> Polynomial:
    """One omega-recursion step: solve ``Pi(., dh) = omega(., dh_prev)`` for ``h``.

    Components of ``omega(., dh_prev)`` along non-p/q coordinates are not part
    of the Hamiltonian equation and are dropped.  On a truncated model
    (``window`` given) the contraction is exact only on a sub-window, so the
    integrability conditions are checked on ``max_orbit // F`` where ``F`` is
    the number of p/q factors of the result.
    """
    Y = contract_bivector(omega, differential(h_prev))
    pq = set(P.coordinates)
    Y = VectorField(P.table, {a: f for a, f in Y.components.items() if a in pq})
    certified = None
    if window is not None:
        F = max((Y[a].pq_degree(m) for a in Y for m in Y[a].terms), default=0) + 1
        certified = TruncationWindow(max(1, window.max_orbit // F))
    return integrate_hamiltonian(P, Y, normalization, certified)


def sft_tower(P: StructuralPoisson, omega: Bivector, seeds: Mapping[str, Polynomial], levels: int,
              normalization: Callable[[int, str], Polynomial | None] | None = None,
              window: TruncationWindow | None = None) -> DescendantTower:
    """Levels ``-1..levels`` of the omega-recursion from the Casimir seeds."""

    def step(n, cls, prev):
        norm = normalization(n, cls) if normalization is not None else None
        return sft_step(P, omega, prev, norm, window)

    def cert(level):
        if window is None:
            return None
        F = max((_pq_factors(h) for h in level.values()), default=0)
        return window.max_orbit if F <= 2 else max(1, window.max_orbit // F)

    out = [dict(seeds)]
    for n in range(0, levels + 1):
        out.append({cls: step(n, cls, out[-1][cls]) for cls in sorted(seeds)})
    return DescendantTower("sft", -1, out, window, [cert(lev) for lev in out], step)


def euler_operator(f: Polynomial) -> Polynomial:
    """``(2 - sum p d_p - sum q d_q - sum t d_t) f``; tau-variables count as t-type."""
    vs = f.table.variables
    terms = {}
    for mono, c in f.terms.items():
        d = sum(e for v, e in mono if vs[v].kind in ("p", "q", "t", "tau"))
        if d != 2:
            terms[mono] = c * (2 - d)
    return Polynomial(f.table, terms)


# ---------------------------------------------------------------------------
# commutativity
# ---------------------------------------------------------------------------

@dataclass
class CommutingReport:
    kind: str
    window: int | None
    pairs: list  # (label_i, label_j, residual)

    @property
    def ok(self) -> bool:
        return all(not r.terms if isinstance(r, Polynomial) else not r for _, _, r in self.pairs)

    @property
    def failures(self) -> list:
        return [(a, b, r) for a, b, r in self.pairs if r]


def verify_commuting(P: StructuralPoisson | None, tower: DescendantTower,
                     window: int | None = None) -> CommutingReport:
    """Pairwise brackets of all tower entries.

    CH towers are compared with Lie brackets, exactly on the model window.
    SFT towers use the Poisson bracket restricted to the orbit bound ``W``;
    the truncated tower is exact there only when ``max_orbit >= F * W`` with
    ``F`` the largest number of p/q factors of a Hamiltonian, otherwise
    :class:`WindowTooSmall` is raised.  ``W`` defaults to the largest
    certified value.
    """
    items = list(tower.labelled())
    pairs = []
    if tower.kind == "ch":
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                (la, X), (lb, Y) = items[i], items[j]
                pairs.append((la, lb, lie_bracket(X, Y, (0, 0))))
        W = tower.window.max_orbit if tower.window is not None else None
        return CommutingReport("ch", W, pairs)
    if P is None:
        raise ValueError("a Poisson structure is required for Hamiltonian towers")
    F = max((_pq_factors(h) for _, h in items), default=0)
    K = tower.window.max_orbit if tower.window is not None else None
    if K is None:
        W = window
        trunc = None if W is None else TruncationWindow(W)
    else:
        W = window if window is not None else max(1, K // max(F, 1))
        if F * W > K:
            raise WindowTooSmall(F * W, K)
        trunc = TruncationWindow(W)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (la, f), (lb, g) = items[i], items[j]
            pairs.append((la, lb, poisson_bracket(P, f, g, trunc)))
    return CommutingReport("sft", W, pairs)


def telescoping_residual(P: StructuralPoisson, tower: DescendantTower, cls: str, i: int, j: int,
                         window: int) -> Polynomial:
    """``{h_i, h_j} + {h_{i+1}, h_{j-1}}`` restricted to the orbit bound ``window``."""
    w = TruncationWindow(window)
    h = lambda n: tower.entry(n, cls)  # noqa: E731
    return (poisson_bracket(P, h(i), h(j), w) + poisson_bracket(P, h(i + 1), h(j - 1), w))


def multiset_orderings(parts) -> int:
    """Number of distinct orderings of a multiset."""
    counts: dict = {}
    for p in parts:
        counts[p] = counts.get(p, 0) + 1
    total = factorial(len(parts))
    for c in counts.values():
        total //= factorial(c)
    return total


def compositions(total: int, parts: int, values):
    """Multisets of ``parts`` elements of ``values`` summing to ``total``."""
    for combo in combinations_with_replacement(sorted(values), parts):
        if sum(combo) == total:
            yield combo
