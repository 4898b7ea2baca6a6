"""Coefficient algebra with one free derivation per planar tree.

The coefficients form a free commutative algebra over Q on "aroma"
generators.  A generator is a base symbol together with the ordered
sequence of trees whose derivations have been applied to it, innermost
first; deriving a generator just appends another tree.  Nothing ever
cancels between distinct generators, which is exactly what "free
differential algebra" means here.

Rational scalars are the degenerate case: with no generators in sight
every derivation is identically zero.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .trees import PlanarTree

Scalar = Union[Fraction, int]


@dataclass(frozen=True, eq=False)
class AromaGenerator:
    """A generator ``base^(t1,...,tk)`` of the coefficient algebra.

    ``applied`` lists the trees whose derivations have hit the base
    symbol, innermost first.  ``base_degree`` feeds the grading (default
    0) but is deliberately excluded from equality: identity is the pair
    (base, applied).
    """

    base: str
    applied: tuple[PlanarTree, ...] = ()
    base_degree: int = field(default=0, compare=False)

    @property
    def degree(self) -> int:
        return self.base_degree + sum(t.size for t in self.applied)

    @functools.cached_property
    def sort_key(self):
        return (self.base, tuple(t.sort_key for t in self.applied))

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, AromaGenerator):
            return NotImplemented
        return self.base == other.base and self.applied == other.applied

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.base, self.applied))
            self.__dict__["_hash"] = h
        return h

    def derive(self, tau: PlanarTree) -> "AromaGenerator":
        return _derived_generator(self, tau)

    def __str__(self) -> str:
        if not self.applied:
            return self.base
        return self.base + "^(" + ",".join(t.encoding for t in self.applied) + ")"


@functools.lru_cache(maxsize=None)
def _derived_generator(gen: AromaGenerator, tau: PlanarTree) -> AromaGenerator:
    # Interned so repeated derivations reuse one object and its cached hash.
    return AromaGenerator(gen.base, gen.applied + (tau,), gen.base_degree)


#: A monomial is a multiset of generators, stored as a sorted tuple.
Monomial = tuple[AromaGenerator, ...]

_ONE_MONOMIAL: Monomial = ()


def _sorted_monomial(gens) -> Monomial:
    return tuple(sorted(gens, key=lambda g: g.sort_key))


def monomial_degree(m: Monomial) -> int:
    return sum(g.degree for g in m)


def _format_monomial(m: Monomial) -> str:
    return "*".join(str(g) for g in m)


class CoeffPoly:
    """Sparse polynomial: monomial -> Fraction, zeros dropped."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
            clean = {m: c for m, c in clean.items() if c}
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction]) -> "CoeffPoly":
        """Internal: terms already canonical (sorted keys, Fraction values,
        no zeros).  Takes ownership of the dict."""
        out = object.__new__(cls)
        out.terms = terms
        out._hash = None
        return out

    # -- constructors

    @staticmethod
    def zero() -> "CoeffPoly":
        return CoeffPoly()

    @staticmethod
    def scalar(c: Scalar) -> "CoeffPoly":
        return CoeffPoly({_ONE_MONOMIAL: Fraction(c)})

    @staticmethod
    def one() -> "CoeffPoly":
        return CoeffPoly.scalar(1)

    @staticmethod
    def generator(gen: AromaGenerator | str, base_degree: int = 0) -> "CoeffPoly":
        if isinstance(gen, str):
            gen = AromaGenerator(gen, (), base_degree)
        return CoeffPoly({(gen,): Fraction(1)})

    # -- predicates

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == _ONE_MONOMIAL for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial has non-constant terms")
        return self.terms.get(_ONE_MONOMIAL, Fraction(0))

    def degree(self) -> int:
        """Max monomial degree; zero polynomial reports 0."""
        if not self.terms:
            return 0
        return max(monomial_degree(m) for m in self.terms)

    def is_homogeneous(self, d: int) -> bool:
        return all(monomial_degree(m) == d for m in self.terms)

    # -- ring operations

    def __add__(self, other: "CoeffPoly") -> "CoeffPoly":
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        acc = dict(self.terms)
        for m, c in other.terms.items():
            v = acc.get(m)
            if v is None:
                acc[m] = c
            else:
                v = v + c
                if v:
                    acc[m] = v
                else:
                    del acc[m]
        return CoeffPoly._raw(acc)

    def __sub__(self, other: "CoeffPoly") -> "CoeffPoly":
        return self + (-other)

    def __neg__(self) -> "CoeffPoly":
        return CoeffPoly._raw({m: -c for m, c in self.terms.items()})

    def __mul__(self, other) -> "CoeffPoly":
        if isinstance(other, CoeffPoly):
            acc: dict[Monomial, Fraction] = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = _sorted_monomial(m1 + m2) if m1 and m2 else m1 + m2
                    v = acc.get(m)
                    acc[m] = c1 * c2 if v is None else v + c1 * c2
            return CoeffPoly._raw({m: c for m, c in acc.items() if c})
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "CoeffPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c: Scalar) -> "CoeffPoly":
        if c == 1:
            return self
        c = Fraction(c)
        if not c:
            return CoeffPoly()
        return CoeffPoly._raw({m: c * v for m, v in self.terms.items()})

    def derive(self, tau: PlanarTree) -> "CoeffPoly":
        """Free derivation attached to tau, by the Leibniz rule.

        Each generator in a monomial is hit in turn; constants vanish.
        """
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            for i, gen in enumerate(mono):
                m = _sorted_monomial(mono[:i] + (gen.derive(tau),) + mono[i + 1:])
                v = acc.get(m)
                acc[m] = c if v is None else v + c
        return CoeffPoly._raw({m: c for m, c in acc.items() if c})

    # -- equality, hashing, display

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(
            self.terms.items(),
            key=lambda kv: (monomial_degree(kv[0]), tuple(g.sort_key for g in kv[0])),
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            if mono == _ONE_MONOMIAL:
                body = str(c)
            elif c == 1:
                body = _format_monomial(mono)
            elif c == -1:
                body = "-" + _format_monomial(mono)
            else:
                body = f"{c}*{_format_monomial(mono)}"
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __repr__(self) -> str:
        return f"CoeffPoly({self})"


ZERO = CoeffPoly.zero()
ONE = CoeffPoly.one()


def poly_add(a: CoeffPoly, b: CoeffPoly) -> CoeffPoly:
    return a + b


def poly_mul(a: CoeffPoly, b: CoeffPoly) -> CoeffPoly:
    return a * b


def derive(tau: PlanarTree, f: CoeffPoly) -> CoeffPoly:
    return f.derive(tau)
