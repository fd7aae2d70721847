import random
from fractions import Fraction

import pytest

from helpers import random_poly
from qrealize import (
    Algebra,
    Scalar,
    adjoint,
    commutator,
    normal_order,
    render,
    wirtinger_gradient,
)
from qrealize.algebra import CommutationMatrix


@pytest.fixture
def one_mode():
    return Algebra(1)


@pytest.fixture
def two_modes():
    return Algebra(2)


# -- normal ordering ----------------------------------------------------------

def test_single_forced_rewrite(one_mode):
    got = normal_order(one_mode, [(1, False), (1, True)])
    expected = one_mode.creator(1) * one_mode.annihilator(1) + 1
    assert got == expected


def test_double_rewrite(one_mode):
    word = [(1, False), (1, True), (1, False), (1, True)]
    a, ad = one_mode.annihilator(1), one_mode.creator(1)
    assert normal_order(one_mode, word) == ad**2 * a**2 + 3 * ad * a + 1


def test_already_ordered_word_unchanged(two_modes):
    got = normal_order(two_modes, [(2, True), (1, False)])
    assert got == two_modes.creator(2) * two_modes.annihilator(1)


def test_mode_index_out_of_range(two_modes):
    with pytest.raises(ValueError):
        normal_order(two_modes, [(3, False)])


def test_confluence_on_random_words(two_modes):
    rng = random.Random(7)
    for _ in range(60):
        word = [
            (rng.randint(1, 2), rng.random() < 0.5) for _ in range(rng.randint(1, 6))
        ]
        left = normal_order(two_modes, word, strategy="leftmost")
        right = normal_order(two_modes, word, strategy="rightmost")
        assert left.terms == right.terms


def test_normal_order_respects_theta():
    alg = Algebra(2, CommutationMatrix([[2, Scalar(0, 1)], [Scalar(0, -1), 3]]))
    got = normal_order(alg, [(1, False), (2, True)])
    assert got == alg.creator(2) * alg.annihilator(1) + alg.scalar(Scalar(0, 1))


# -- products, adjoints, commutators ------------------------------------------

def test_multiply_identity(one_mode):
    p = one_mode.creator(1) * one_mode.annihilator(1) + 2
    assert one_mode.one() * p == p


def test_multiply_no_rewrite_needed(one_mode):
    assert one_mode.creator(1) * one_mode.annihilator(1) == one_mode.monomial((1,), (1,))


def test_multiply_cross_mode(two_modes):
    lhs = two_modes.creator(1) * two_modes.annihilator(2) ** 2
    got = lhs * two_modes.creator(2)
    expected = (
        two_modes.monomial((1, 1), (0, 2))
        + two_modes.monomial((1, 0), (0, 1), Scalar(2))
    )
    assert got == expected


def test_multiply_rejects_mode_mismatch(one_mode, two_modes):
    with pytest.raises(ValueError):
        one_mode.annihilator(1) * two_modes.annihilator(1)


def test_adjoint_rules(two_modes):
    p = two_modes.creator(1) * two_modes.annihilator(2) ** 2
    assert adjoint(p) == two_modes.creator(2) ** 2 * two_modes.annihilator(1)
    q = two_modes.annihilator(1).scale(Scalar(0, 1))
    assert adjoint(q) == two_modes.creator(1).scale(Scalar(0, -1))
    number = two_modes.creator(1) * two_modes.annihilator(1)
    assert adjoint(number) == number


def test_commutator_ccr(one_mode):
    assert commutator(one_mode.annihilator(1), one_mode.creator(1)) == one_mode.one()


def test_commutator_self_is_zero(two_modes):
    p = random_poly(random.Random(3), two_modes)
    assert commutator(p, p).is_zero


def test_commutator_creator_squared(one_mode):
    got = commutator(one_mode.creator(1) ** 2, one_mode.annihilator(1))
    assert got == one_mode.creator(1).scale(Scalar(-2))


# -- algebraic law property suites --------------------------------------------

def test_ring_laws_random(two_modes):
    rng = random.Random(11)
    for _ in range(40):
        p = random_poly(rng, two_modes)
        q = random_poly(rng, two_modes)
        r = random_poly(rng, two_modes)
        assert ((p * q) * r - p * (q * r)).is_zero
        assert (p * (q + r) - (p * q + p * r)).is_zero
        assert (two_modes.one() * p - p).is_zero


def test_commutator_laws_random(two_modes):
    rng = random.Random(13)
    for _ in range(25):
        p = random_poly(rng, two_modes)
        q = random_poly(rng, two_modes)
        r = random_poly(rng, two_modes)
        assert (commutator(p, q) + commutator(q, p)).is_zero
        leibniz = commutator(p * q, r) - (p * commutator(q, r) + commutator(p, r) * q)
        assert leibniz.is_zero
        jacobi = (
            commutator(p, commutator(q, r))
            + commutator(q, commutator(r, p))
            + commutator(r, commutator(p, q))
        )
        assert jacobi.is_zero


def test_adjoint_laws_random(two_modes):
    rng = random.Random(17)
    for _ in range(30):
        p = random_poly(rng, two_modes)
        q = random_poly(rng, two_modes)
        assert (adjoint(p * q) - adjoint(q) * adjoint(p)).is_zero
        assert (adjoint(commutator(p, q)) - commutator(adjoint(q), adjoint(p))).is_zero
        assert (adjoint(adjoint(p)) - p).is_zero


# -- gradients ----------------------------------------------------------------

def test_gradient_of_number_form(two_modes):
    phi = (
        two_modes.creator(1) * two_modes.annihilator(1)
        + two_modes.creator(2) * two_modes.annihilator(2)
    ).scale(Scalar(2))
    grad = wirtinger_gradient(phi)
    expected = [
        two_modes.annihilator(1).scale(Scalar(2)),
        two_modes.annihilator(2).scale(Scalar(2)),
        two_modes.creator(1).scale(Scalar(2)),
        two_modes.creator(2).scale(Scalar(2)),
    ]
    assert all((g - e).is_zero for g, e in zip(grad, expected))


def test_gradient_of_constant_is_zero(two_modes):
    grad = wirtinger_gradient(two_modes.scalar(5))
    assert all(g.is_zero for g in grad)


def test_gradient_degree_rule(one_mode):
    phi = one_mode.creator(1) ** 2 * one_mode.annihilator(1)
    grad = wirtinger_gradient(phi)
    assert grad[0] == (one_mode.creator(1) * one_mode.annihilator(1)).scale(Scalar(2))
    assert grad[1] == one_mode.creator(1) ** 2


# -- rendering ----------------------------------------------------------------

def test_render_golden_order(two_modes):
    h = two_modes.monomial((2, 0), (0, 2), Scalar(0, 1)) + two_modes.monomial(
        (0, 2), (2, 0), Scalar(0, -1)
    )
    assert render(h) == "(0+1i)*a1'^2*a2^2 + (0-1i)*a2'^2*a1^2"


def test_render_constant_and_zero(one_mode):
    assert render(one_mode.zero()) == "0"
    assert render(one_mode.scalar(Scalar(Fraction(1, 2), -1))) == "(1/2-1i)"


def test_render_degree_ordering(one_mode):
    p = one_mode.creator(1) + one_mode.one() + one_mode.creator(1) ** 2
    assert render(p) == "(1+0i) + (1+0i)*a1' + (1+0i)*a1'^2"
