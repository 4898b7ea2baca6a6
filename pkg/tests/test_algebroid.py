"""Grafting, Grossman-Larson structure, antipodes, coefficient actions."""

from __future__ import annotations

from fractions import Fraction

import pytest

from postlie.algebroid import (
    AlgebroidElement,
    antipode_concat,
    concat_mul,
    coproduct,
    counit,
    elements_equal,
    gl_antipode,
    gl_product,
    lu_action,
    module_action,
    parse_element,
    theta,
    triangle,
    word_splits,
    word_triples,
)
from postlie.coeffs import AromaGenerator, CoeffPoly
from postlie.trees import (
    CapacityError,
    EMPTY_FOREST,
    Forest,
    LEAF,
    enumerate_forests,
    parse_forest,
)


def el(text: str) -> AlgebroidElement:
    return parse_element(text)


ONE = AlgebroidElement.from_forest(EMPTY_FOREST)
O = el("o")
G = CoeffPoly.generator("g")


# -- element plumbing


def test_parse_dump_round_trip():
    x = el("2/3 [o] o + -1 o + 5 1")
    assert parse_element(x.dump().replace("\n", " + ").replace(" | ", " ")) == x


def test_zero_and_scale():
    assert el("o").scale(0) == AlgebroidElement.zero()
    assert el("o").scale(Fraction(1, 2)) + el("1/2 o") == el("o")
    assert elements_equal(el("o + o"), el("2 o"))


def test_iota_counit():
    assert counit(AlgebroidElement.iota(G)) == G
    assert counit(el("5/2 1 + o")) == CoeffPoly.scalar(Fraction(5, 2))
    assert counit(O).is_zero()


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_element("o + + o")


# -- concatenation algebra


def test_concat_basic():
    assert concat_mul(el("[o]"), el("o")) == el("[o] o")
    assert concat_mul(el("o"), el("[o]")) == el("o [o]")
    assert concat_mul(ONE, el("o o")) == el("o o")


def test_concat_coefficients_multiply():
    x = AlgebroidElement.from_forest(parse_forest("o"), G)
    y = AlgebroidElement.iota(CoeffPoly.scalar(Fraction(3, 2)))
    got = concat_mul(y, x)
    assert got.terms[parse_forest("o")] == G.scale(Fraction(3, 2))


def test_concat_associative():
    a, b, c = el("o + [o]"), el("o o"), el("2 o + 1")
    assert concat_mul(concat_mul(a, b), c) == concat_mul(a, concat_mul(b, c))


# -- coproduct (unshuffle of letters)


def test_coproduct_counts():
    pairs = word_splits(parse_forest("o o"))
    assert sorted(m for _, _, m in pairs) == [1, 1, 2]


def test_coproduct_counit_axiom():
    for w in enumerate_forests(3):
        left = AlgebroidElement.zero()
        for w1, w2, mult in word_splits(w):
            c = counit(AlgebroidElement.from_forest(w1))
            left = left + AlgebroidElement.from_forest(w2, c.scale(mult))
        assert left == AlgebroidElement.from_forest(w)


def test_triples_refine_splits():
    # Unshuffling into three legs agrees with splitting twice.
    for w in enumerate_forests(3):
        twice: dict = {}
        for w1, rest, m in word_splits(w):
            for w2, w3, k in word_splits(rest):
                key = (w1, w2, w3)
                twice[key] = twice.get(key, 0) + m * k
        direct: dict = {}
        for w1, w2, w3, m in word_triples(w):
            direct[(w1, w2, w3)] = direct.get((w1, w2, w3), 0) + m
        assert twice == direct


def test_coproduct_is_cocommutative_on_words():
    for w in enumerate_forests(3):
        flipped: dict = {}
        for w1, w2, m in word_splits(w):
            flipped[(w2, w1)] = flipped.get((w2, w1), 0) + m
        straight = {}
        for w1, w2, m in word_splits(w):
            straight[(w1, w2)] = straight.get((w1, w2), 0) + m
        assert flipped == straight


# -- grafting product


def test_triangle_small_values():
    assert triangle(O, O) == el("[o]")
    assert triangle(O, el("[o]")) == el("[oo] + [[o]]")
    assert triangle(O, el("o o")) == el("[o] o + o [o]")
    assert triangle(ONE, el("o o")) == el("o o")
    assert triangle(O, ONE) == AlgebroidElement.zero()


def test_triangle_bilinear():
    a, b = el("o + 2 [o]"), el("o o + -1 o")
    split = triangle(el("o"), b) + triangle(el("2 [o]"), b)
    assert triangle(a, b) == split


def test_triangle_grade_capacity():
    big = AlgebroidElement.from_forest(Forest((LEAF,) * 40))
    with pytest.raises(CapacityError):
        triangle(big, big)


# -- Grossman-Larson product


def test_gl_small_values():
    assert gl_product(O, O) == el("[o] + o o")
    assert gl_product(ONE, el("o o")) == el("o o")
    assert gl_product(el("o o"), ONE) == el("o o")


def test_gl_triangle_factorisation():
    # x * y keeps the ungrafted letters on the left at each split.
    got = gl_product(el("o o"), O)
    want = el("[oo] + 2 o [o] + o o o")
    # Independent expansion: sum over splits of (x1 concat (x2 > y)).
    acc = AlgebroidElement.zero()
    for w1, w2, m in word_splits(parse_forest("o o")):
        a1 = AlgebroidElement.from_forest(w1)
        a2 = AlgebroidElement.from_forest(w2)
        acc = acc + concat_mul(a1, triangle(a2, O)).scale(m)
    assert got == acc == want


def test_gl_associative_spot():
    a, b, c = el("o + [o]"), el("o o"), el("o + 2 1")
    assert gl_product(gl_product(a, b), c) == gl_product(a, gl_product(b, c))


# -- antipodes


def test_antipode_values():
    assert gl_antipode(O) == el("-1 o")
    assert gl_antipode(el("[o]")) == el("-1 [o]")
    assert gl_antipode(el("o o")) == el("2 [o] + o o")
    assert antipode_concat(O) == el("-1 o")
    assert antipode_concat(el("o o")) == el("o o")


@pytest.mark.parametrize("product,antipode", [
    (gl_product, gl_antipode),
    (concat_mul, antipode_concat),
])
def test_antipode_convolution_identity(product, antipode):
    # m (S x id) delta = iota o counit, on every word of grade <= 3.
    for w in enumerate_forests(3):
        x = AlgebroidElement.from_forest(w)
        acc = AlgebroidElement.zero()
        for w1, w2, mult in word_splits(w):
            acc = acc + product(
                antipode(AlgebroidElement.from_forest(w1)),
                AlgebroidElement.from_forest(w2),
            ).scale(mult)
        assert acc == AlgebroidElement.iota(counit(x))


def test_gl_antipode_is_involutive_small():
    for w in enumerate_forests(3):
        x = AlgebroidElement.from_forest(w)
        assert gl_antipode(gl_antipode(x)) == x


# -- coefficient actions


def test_module_action_values():
    assert module_action(O, G) == CoeffPoly.generator(AromaGenerator("g", (LEAF,)))
    t = parse_forest("[o]").trees[0]
    assert module_action(AlgebroidElement.from_tree(t), G) == CoeffPoly.generator(
        AromaGenerator("g", (t,))
    )
    # Two-letter words pick up a correction from the grafted bracket.
    got = module_action(el("o o"), G)
    want = CoeffPoly.generator(AromaGenerator("g", (LEAF, LEAF))) - CoeffPoly.generator(
        AromaGenerator("g", (t,))
    )
    assert got == want


def test_module_action_matches_lu_action():
    for w in enumerate_forests(3):
        x = AlgebroidElement.from_forest(w)
        assert module_action(x, G) == lu_action(x, G)


def test_module_action_leibniz_over_gl():
    h = CoeffPoly.generator("h")
    for w in enumerate_forests(2):
        for v in enumerate_forests(2):
            x = AlgebroidElement.from_forest(w)
            y = AlgebroidElement.from_forest(v)
            assert module_action(gl_product(x, y), G * h) == module_action(
                x, module_action(y, G * h)
            )


# -- theta


def test_theta_values():
    assert theta(O) == el("-1 o")
    carrying = AlgebroidElement.from_forest(parse_forest("o"), G)
    got = theta(carrying)
    dg = CoeffPoly.generator(AromaGenerator("g", (LEAF,)))
    want = AlgebroidElement.iota(-dg) + AlgebroidElement.from_forest(
        parse_forest("o"), -G
    )
    assert got == want


def test_theta_involution():
    x = AlgebroidElement.from_forest(parse_forest("[o] o"), G) + el("2 [[o]]")
    assert theta(theta(x)) == x


def test_theta_antihomomorphism_spot():
    x, y = el("o + [o]"), el("o o + -2 o")
    assert theta(gl_product(x, y)) == gl_product(theta(y), theta(x))
