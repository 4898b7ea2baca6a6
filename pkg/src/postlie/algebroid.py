"""The forest algebroid: concatenation, grafting action, and both antipodes.

An element is a finite sum  sum_w  c_w . w  where w is an ordered forest
and c_w a coefficient polynomial.  The coefficient algebra sits centrally
inside the non-commutative word algebra, so one coefficient per forest
(and per word pair, for tensors) is a faithful representation.

The structure maps:

* ``concat_mul``    word concatenation, coefficients multiply.
* ``coproduct``     unshuffle: trees are primitive, words split over
                    ordered letter subsets.
* ``counit``        picks the empty-word coefficient.
* ``antipode_concat``  (-1)^n with the word reversed.
* ``triangle``      the grafting action of the word algebra on itself,
                    extended to coefficients so that single trees act as
                    the free derivations of the coefficient algebra.
* ``gl_product``    the Grossman-Larson style product
                    x * y = concat(x1, triangle(x2, y)).
* ``gl_antipode_word``  the antipode of the gl product on pure words,
                    defined by the triangular recursion that makes
                    sum concat-free splittings  x1 * S(x2)  collapse to
                    the counit.
* ``theta``         the gl antipode twisted onto coefficient-carrying
                    elements through the module action.
* ``module_action`` the action of words on bare coefficients (what a
                    forest does to a scalar function, expressed in free
                    derivations).
* ``lu_action``     the same action read off through counit . triangle.

The triangle recursion on a word x X (first letter x, rest X) is

    (x X) > y  =  x > (X > y)  -  (x > X) > y

with single trees acting by  x > (g . v) = derive(x, g) . v + g . (x > v)
and grafting letterwise into v.  Both recursions strictly reduce the
left grade, so they terminate; pure-word cases are memoised.
"""

from __future__ import annotations

import functools
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .coeffs import CoeffPoly, Scalar
from .trees import (
    EMPTY_FOREST,
    CapacityError,
    Forest,
    MAX_OPERATION_GRADE,
    PlanarTree,
    graft_into_forest,
    single,
)

# ---------------------------------------------------------------------------
# Elements


class AlgebroidElement:
    """Finite sum of coefficient-weighted forests."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Forest, CoeffPoly] | None = None):
        clean: dict[Forest, CoeffPoly] = {}
        if terms:
            for w, f in terms.items():
                if not f.is_zero():
                    clean[w] = f
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Forest, CoeffPoly]) -> "AlgebroidElement":
        """Internal: no zero polynomials among the values.  Takes ownership."""
        out = object.__new__(cls)
        out.terms = terms
        out._hash = None
        return out

    @staticmethod
    def zero() -> "AlgebroidElement":
        return AlgebroidElement()

    @staticmethod
    def unit() -> "AlgebroidElement":
        return AlgebroidElement({EMPTY_FOREST: CoeffPoly.one()})

    @staticmethod
    def from_forest(w: Forest, coeff: CoeffPoly | Scalar = 1) -> "AlgebroidElement":
        if not isinstance(coeff, CoeffPoly):
            coeff = CoeffPoly.scalar(coeff)
        return AlgebroidElement({w: coeff})

    @staticmethod
    def from_tree(t: PlanarTree, coeff: CoeffPoly | Scalar = 1) -> "AlgebroidElement":
        return AlgebroidElement.from_forest(single(t), coeff)

    @staticmethod
    def iota(f: CoeffPoly) -> "AlgebroidElement":
        """Embed a coefficient as f . (empty word)."""
        return AlgebroidElement({EMPTY_FOREST: f})

    # -- linear structure

    def __add__(self, other: "AlgebroidElement") -> "AlgebroidElement":
        if not isinstance(other, AlgebroidElement):
            return NotImplemented
        if not self.terms:
            return other
        if not other.terms:
            return self
        acc = dict(self.terms)
        for w, f in other.terms.items():
            g = acc.get(w)
            if g is None:
                acc[w] = f
            else:
                g = g + f
                if g.is_zero():
                    del acc[w]
                else:
                    acc[w] = g
        return AlgebroidElement._raw(acc)

    def __sub__(self, other: "AlgebroidElement") -> "AlgebroidElement":
        return self + (-other)

    def __neg__(self) -> "AlgebroidElement":
        return AlgebroidElement._raw({w: -f for w, f in self.terms.items()})

    def scale(self, c: Union[Scalar, CoeffPoly]) -> "AlgebroidElement":
        """Multiply every coefficient by a scalar or coefficient polynomial."""
        if not isinstance(c, CoeffPoly):
            if c == 1:
                return self
            c = CoeffPoly.scalar(c)
        return AlgebroidElement({w: c * f for w, f in self.terms.items()})

    def __mul__(self, other) -> "AlgebroidElement":
        if isinstance(other, AlgebroidElement):
            return concat_mul(self, other)
        if isinstance(other, (int, Fraction, CoeffPoly)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other) -> "AlgebroidElement":
        if isinstance(other, (int, Fraction, CoeffPoly)):
            return self.scale(other)
        return NotImplemented

    # -- grading

    def is_zero(self) -> bool:
        return not self.terms

    def max_grade(self) -> int:
        """Largest combined grade (word grade + coefficient degree)."""
        if not self.terms:
            return 0
        return max(w.grade + f.degree() for w, f in self.terms.items())

    def is_homogeneous(self, k: int) -> bool:
        return all(
            f.is_homogeneous(k - w.grade) for w, f in self.terms.items()
        )

    def is_pure(self) -> bool:
        """True when every coefficient is a rational constant."""
        return all(f.is_constant() for f in self.terms.values())

    # -- comparison and display

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebroidElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[Forest, CoeffPoly]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0].sort_key)

    def dump(self) -> str:
        """One line per term: ``coeff | forest`` in canonical order."""
        if not self.terms:
            return "0 | 1"
        return "\n".join(f"{f} | {w.encoding}" for w, f in self.sorted_terms())

    def __str__(self) -> str:
        return self.dump().replace("\n", "; ")

    def __repr__(self) -> str:
        return f"AlgebroidElement<{self}>"


ZERO_ELEMENT = AlgebroidElement.zero()


def _accumulate(acc: dict[Forest, CoeffPoly], w: Forest, f: CoeffPoly) -> None:
    g = acc.get(w)
    if g is None:
        acc[w] = f
    else:
        g = g + f
        if g.is_zero():
            del acc[w]
        else:
            acc[w] = g


def _bump(acc: dict[Forest, int], w: Forest, m: int) -> None:
    n = acc.get(w, 0) + m
    if n:
        acc[w] = n
    else:
        acc.pop(w, None)


# ---------------------------------------------------------------------------
# Concatenation Hopf structure


def concat_mul(a: AlgebroidElement, b: AlgebroidElement) -> AlgebroidElement:
    acc: dict[Forest, CoeffPoly] = {}
    for w, f in a.terms.items():
        for v, g in b.terms.items():
            _accumulate(acc, w + v, f * g)
    return AlgebroidElement(acc)


@functools.lru_cache(maxsize=None)
def word_splits(w: Forest) -> tuple[tuple[Forest, Forest, int], ...]:
    """All unshuffle splittings of a word, with multiplicities merged."""
    n = len(w)
    acc: dict[tuple[Forest, Forest], int] = {}
    for mask in range(1 << n):
        left = tuple(t for i, t in enumerate(w.trees) if mask >> i & 1)
        right = tuple(t for i, t in enumerate(w.trees) if not mask >> i & 1)
        key = (Forest(left), Forest(right))
        acc[key] = acc.get(key, 0) + 1
    return tuple((l, r, m) for (l, r), m in sorted(
        acc.items(), key=lambda kv: (kv[0][0].sort_key, kv[0][1].sort_key)))


@functools.lru_cache(maxsize=None)
def word_triples(w: Forest) -> tuple[tuple[Forest, Forest, Forest, int], ...]:
    """All three-way unshuffle splittings (iterated coproduct) of a word."""
    n = len(w)
    acc: dict[tuple[Forest, Forest, Forest], int] = {}
    for colour in range(3 ** n) if n else [0]:
        parts: list[list[PlanarTree]] = [[], [], []]
        c = colour
        for t in w.trees:
            parts[c % 3].append(t)
            c //= 3
        key = (Forest(tuple(parts[0])), Forest(tuple(parts[1])), Forest(tuple(parts[2])))
        acc[key] = acc.get(key, 0) + 1
    return tuple((a, b, c, m) for (a, b, c), m in sorted(
        acc.items(), key=lambda kv: tuple(f.sort_key for f in kv[0])))


def counit(a: AlgebroidElement) -> CoeffPoly:
    return a.terms.get(EMPTY_FOREST, CoeffPoly.zero())


def antipode_concat(a: AlgebroidElement) -> AlgebroidElement:
    acc: dict[Forest, CoeffPoly] = {}
    for w, f in a.terms.items():
        rev = Forest(tuple(reversed(w.trees)))
        _accumulate(acc, rev, f if len(w) % 2 == 0 else -f)
    return AlgebroidElement(acc)


# ---------------------------------------------------------------------------
# Tensors (over the coefficient algebra, which is central: one coefficient
# per word pair)


class TensorElement:
    """Finite sum of coefficient-weighted word pairs."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[Forest, Forest], CoeffPoly] | None = None):
        clean: dict[tuple[Forest, Forest], CoeffPoly] = {}
        if terms:
            for pair, f in terms.items():
                if not f.is_zero():
                    clean[pair] = f
        self.terms = clean
        self._hash = None

    @staticmethod
    def zero() -> "TensorElement":
        return TensorElement()

    @staticmethod
    def of(a: AlgebroidElement, b: AlgebroidElement) -> "TensorElement":
        acc: dict[tuple[Forest, Forest], CoeffPoly] = {}
        for w, f in a.terms.items():
            for v, g in b.terms.items():
                key = (w, v)
                h = acc.get(key)
                p = f * g
                acc[key] = p if h is None else h + p
        return TensorElement(acc)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        if not isinstance(other, TensorElement):
            return NotImplemented
        acc = dict(self.terms)
        for pair, f in other.terms.items():
            g = acc.get(pair)
            acc[pair] = f if g is None else g + f
        return TensorElement(acc)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def __neg__(self) -> "TensorElement":
        return TensorElement({p: -f for p, f in self.terms.items()})

    def scale(self, c: Union[Scalar, CoeffPoly]) -> "TensorElement":
        if not isinstance(c, CoeffPoly):
            c = CoeffPoly.scalar(c)
        return TensorElement({p: c * f for p, f in self.terms.items()})

    def swap(self) -> "TensorElement":
        return TensorElement({(v, w): f for (w, v), f in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sorted_terms(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (kv[0][0].sort_key, kv[0][1].sort_key))

    def dump(self) -> str:
        if not self.terms:
            return "0 | 1 | 1"
        return "\n".join(
            f"{f} | {w.encoding} | {v.encoding}" for (w, v), f in self.sorted_terms())

    def __str__(self) -> str:
        return self.dump().replace("\n", "; ")

    def __repr__(self) -> str:
        return f"TensorElement<{self}>"


def coproduct(a: AlgebroidElement) -> TensorElement:
    """Unshuffle coproduct; coefficients ride on the left leg (centrally)."""
    acc: dict[tuple[Forest, Forest], CoeffPoly] = {}
    for w, f in a.terms.items():
        for left, right, mult in word_splits(w):
            key = (left, right)
            p = f.scale(mult)
            g = acc.get(key)
            acc[key] = p if g is None else g + p
    return TensorElement(acc)


# ---------------------------------------------------------------------------
# Triangle action


def _guard(total: int) -> None:
    if total > MAX_OPERATION_GRADE:
        raise CapacityError(
            f"operation grade {total} exceeds bound {MAX_OPERATION_GRADE}")


@functools.lru_cache(maxsize=None)
def _triangle_words(w: Forest, v: Forest) -> dict[Forest, int]:
    """w > v on pure words, as an integer combination.

    The returned dict is cached and shared; callers must not mutate it.
    """
    if not w.trees:
        return {v: 1}
    if len(w) == 1:
        return graft_into_forest(w.trees[0], v)
    x = single(w.trees[0])
    rest = Forest(w.trees[1:])
    acc: dict[Forest, int] = {}
    for u, m in _triangle_words(rest, v).items():
        for z, k in _triangle_words(x, u).items():
            _bump(acc, z, m * k)
    for u, m in graft_into_forest(w.trees[0], rest).items():
        for z, k in _triangle_words(u, v).items():
            _bump(acc, z, -m * k)
    return acc


@functools.lru_cache(maxsize=None)
def _triangle_term(w: Forest, v: Forest, g: CoeffPoly) -> AlgebroidElement:
    """w > (g . v) for a pure word w."""
    if g.is_constant():
        c = g.constant_value()
        if not c:
            return ZERO_ELEMENT
        return AlgebroidElement._raw(
            {u: CoeffPoly.scalar(m * c)
             for u, m in _triangle_words(w, v).items()})
    if not w.trees:
        return AlgebroidElement({v: g})
    if len(w) == 1:
        x = w.trees[0]
        acc: dict[Forest, CoeffPoly] = {}
        dg = g.derive(x)
        if not dg.is_zero():
            acc[v] = dg
        for u, m in graft_into_forest(x, v).items():
            _accumulate(acc, u, g.scale(m))
        return AlgebroidElement(acc)
    x = single(w.trees[0])
    rest = Forest(w.trees[1:])
    acc: dict[Forest, CoeffPoly] = {}
    for u, h in _triangle_term(rest, v, g).terms.items():
        for z, p in _triangle_term(x, u, h).terms.items():
            _accumulate(acc, z, p)
    for u, m in graft_into_forest(w.trees[0], rest).items():
        for z, p in _triangle_term(u, v, g).terms.items():
            _accumulate(acc, z, p.scale(-m))
    return AlgebroidElement._raw(acc)


def triangle(a: AlgebroidElement, b: AlgebroidElement) -> AlgebroidElement:
    """The grafting action a > b.

    Left coefficients factor out; the pure word then acts on each term of
    b by grafting into letters and deriving the coefficient.
    """
    acc: dict[Forest, CoeffPoly] = {}
    for w, f in a.terms.items():
        for v, g in b.terms.items():
            _guard(w.grade + v.grade + g.degree())
            for u, p in _triangle_term(w, v, g).terms.items():
                q = f * p
                if not q.is_zero():
                    _accumulate(acc, u, q)
    return AlgebroidElement._raw(acc)


# ---------------------------------------------------------------------------
# Grossman-Larson product and antipodes


@functools.lru_cache(maxsize=None)
def _gl_words(w: Forest, v: Forest) -> dict[Forest, int]:
    """Pure-word gl product  w * v = sum concat(w1, w2 > v).

    The returned dict is cached and shared; callers must not mutate it.
    """
    acc: dict[Forest, int] = {}
    for w1, w2, mult in word_splits(w):
        for u, m in _triangle_words(w2, v).items():
            _bump(acc, w1 + u, mult * m)
    return acc


def gl_product(a: AlgebroidElement, b: AlgebroidElement) -> AlgebroidElement:
    """x * y = sum over splittings  concat(x1, triangle(x2, y))."""
    acc: dict[Forest, CoeffPoly] = {}
    b_pure = b.is_pure()
    for w, f in a.terms.items():
        if b_pure and f.is_constant():
            c = f.constant_value()
            for v, g in b.terms.items():
                cg = c * g.constant_value()
                for u, m in _gl_words(w, v).items():
                    _accumulate(acc, u, CoeffPoly.scalar(m * cg))
            continue
        for w1, w2, mult in word_splits(w):
            for v, g in b.terms.items():
                _guard(w2.grade + v.grade + g.degree())
                for u, p in _triangle_term(w2, v, g).terms.items():
                    q = (f * p).scale(mult)
                    if not q.is_zero():
                        _accumulate(acc, w1 + u, q)
    return AlgebroidElement._raw(acc)


@functools.lru_cache(maxsize=None)
def gl_antipode_word(w: Forest) -> dict[Forest, int]:
    """Antipode of the gl product on a pure word, as an integer combination.

    Defined grade by grade so that  sum  w1 * S(w2)  over all splittings
    equals counit(w) . 1; the proper splittings only involve lower grade,
    which makes the recursion triangular.  The returned dict is cached and
    shared; callers must not mutate it.
    """
    if not w.trees:
        return {EMPTY_FOREST: 1}
    acc: dict[Forest, int] = {w: -1}
    for w1, w2, mult in word_splits(w):
        if not w1.trees or not w2.trees:
            continue
        for v, k in gl_antipode_word(w2).items():
            for u, m in _gl_words(w1, v).items():
                _bump(acc, u, -mult * k * m)
    return acc


def gl_antipode(a: AlgebroidElement) -> AlgebroidElement:
    """gl antipode extended linearly over constant coefficients.

    Only correct on pure elements; coefficient-carrying elements go
    through ``theta``.
    """
    acc: dict[Forest, CoeffPoly] = {}
    for w, f in a.terms.items():
        if not f.is_constant():
            raise ValueError("gl_antipode is defined on pure elements; use theta")
        c = f.constant_value()
        for v, m in gl_antipode_word(w).items():
            _accumulate(acc, v, CoeffPoly.scalar(m * c))
    return AlgebroidElement._raw(acc)


# ---------------------------------------------------------------------------
# Module action of words on coefficients


@functools.lru_cache(maxsize=None)
def _kmap(w: Forest) -> tuple[tuple[Fraction, tuple[PlanarTree, ...]], ...]:
    """The action of a pure word on coefficients, as a combination of
    derivation sequences (applied left to right).

    Recursion:  (v X) -> f  =  v -> (X -> f)  -  (v > X) -> f.
    """
    if not w.trees:
        return ((Fraction(1), ()),)
    v = w.trees[0]
    rest = Forest(w.trees[1:])
    acc: dict[tuple[PlanarTree, ...], Fraction] = {}
    for c, seq in _kmap(rest):
        key = seq + (v,)
        acc[key] = acc.get(key, Fraction(0)) + c
    for u, m in graft_into_forest(v, rest).items():
        for c, seq in _kmap(u):
            acc[seq] = acc.get(seq, Fraction(0)) - m * c
    return tuple(sorted(
        ((c, seq) for seq, c in acc.items() if c),
        key=lambda it: tuple(t.sort_key for t in it[1])))


def _apply_derivation_sequence(f: CoeffPoly, seq: tuple[PlanarTree, ...]) -> CoeffPoly:
    for t in seq:
        f = f.derive(t)
        if f.is_zero():
            break
    return f


def module_action(x: AlgebroidElement, f: CoeffPoly) -> CoeffPoly:
    """x -> f: words act through free derivations, coefficients of x
    multiply the result."""
    total = CoeffPoly.zero()
    for w, g in x.terms.items():
        acc = CoeffPoly.zero()
        for c, seq in _kmap(w):
            h = _apply_derivation_sequence(f, seq)
            if not h.is_zero():
                acc = acc + h.scale(c)
        if not acc.is_zero():
            total = total + g * acc
    return total


def _word_dict_action(d: dict[Forest, int], f: CoeffPoly) -> CoeffPoly:
    """Action of an integer combination of pure words on a coefficient."""
    total = CoeffPoly.zero()
    for w, k in d.items():
        for c, seq in _kmap(w):
            h = _apply_derivation_sequence(f, seq)
            if not h.is_zero():
                total = total + h.scale(c * k)
    return total


def lu_action(x: AlgebroidElement, f: CoeffPoly) -> CoeffPoly:
    """The induced action on coefficients, read off as counit(x > iota(f))."""
    return counit(triangle(x, AlgebroidElement.iota(f)))


# ---------------------------------------------------------------------------
# Theta


def theta(a: AlgebroidElement) -> AlgebroidElement:
    """The gl antipode twisted to coefficient-carrying elements:

        theta(f . w)  =  sum  (S(w1) -> f) . S(w2)

    over unshuffle splittings of w, with S the pure-word gl antipode.
    On pure elements this collapses to the gl antipode itself.
    """
    acc: dict[Forest, CoeffPoly] = {}
    for w, f in a.terms.items():
        for w1, w2, mult in word_splits(w):
            coeff = _word_dict_action(gl_antipode_word(w1), f)
            if coeff.is_zero():
                continue
            coeff = coeff.scale(mult)
            for v, m in gl_antipode_word(w2).items():
                _accumulate(acc, v, coeff.scale(m))
    return AlgebroidElement._raw(acc)


# ---------------------------------------------------------------------------
# Convenience used by several test suites


def elements_equal(a: AlgebroidElement, b: AlgebroidElement) -> bool:
    return a == b


def parse_element(text: str) -> AlgebroidElement:
    """Parse ``forest`` or ``coeff forest`` sums separated by '+'.

    Intentionally small: rational coefficient, optional '*', then a
    forest.  Used by the command line front end.
    """
    from .trees import parse_forest

    out = AlgebroidElement.zero()
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            raise ValueError("empty summand")
        coeff = Fraction(1)
        body = chunk
        head = chunk.split(None, 1)
        if head and _looks_rational(head[0]):
            coeff = Fraction(head[0])
            body = head[1] if len(head) > 1 else "1"
        body = body.replace("*", " ").strip()
        out = out + AlgebroidElement.from_forest(parse_forest(body), coeff)
    return out


def _looks_rational(tok: str) -> bool:
    try:
        Fraction(tok)
        return True
    except (ValueError, ZeroDivisionError):
        return False
