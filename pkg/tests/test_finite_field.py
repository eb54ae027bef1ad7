import random

import numpy as np
import pytest
from sympy import primerange

from eclift.errors import CharTooSmall, DivisionByZero, FieldTooLarge, NonPrime
from eclift.finite_field import (
    element_table, encode, fq_arith, frobenius, is_square, make_field, primitive_element, vec_mul,
)


def test_prime_field_arithmetic():
    ctx = make_field(7)
    assert ctx.q == 7
    three, five = ctx.element(3), ctx.element(5)
    assert ctx.to_int(ctx.add(three, five)) == 1
    assert ctx.to_int(ctx.sub(three, five)) == 5
    assert ctx.to_int(ctx.mul(three, five)) == 1
    assert ctx.mul(three, ctx.inv(three)) == ctx.one


def test_modulus_is_smallest_irreducible():
    # x^2 + 2 is the first monic irreducible quadratic over F_5 in the scan order
    assert make_field(5, 2).modulus == (2, 0, 1)
    assert make_field(7, 2).modulus == (1, 0, 1)


def test_extension_field_inverse_and_pow():
    ctx = make_field(5, 2)
    for e in list(ctx.elements())[1:]:
        assert ctx.mul(e, ctx.inv(e)) == ctx.one
        assert ctx.pow(e, ctx.q - 1) == ctx.one
    x = ctx.element([0, 1])
    assert ctx.pow(x, -1) == ctx.inv(x)


def test_fq_arith_dispatch():
    ctx = make_field(11)
    a, b = ctx.element(4), ctx.element(9)
    assert fq_arith(ctx, "add", (a, b)) == ctx.element(2)
    assert fq_arith(ctx, "pow", (a, 5)) == ctx.element(pow(4, 5, 11))
    with pytest.raises(ValueError):
        fq_arith(ctx, "div", (a, b))


@pytest.mark.parametrize("p, n, error", [
    (9, 1, NonPrime),
    (2, 1, CharTooSmall),
    (3, 2, CharTooSmall),
    (5, 14, FieldTooLarge),
])
def test_make_field_errors(p, n, error):
    with pytest.raises(error):
        make_field(p, n)


def test_char3_only_on_request():
    assert make_field(3, 2, allow_char3=True).q == 9


def test_inverse_of_zero():
    ctx = make_field(5, 3)
    with pytest.raises(DivisionByZero):
        ctx.inv(ctx.zero)


def test_squares_and_frobenius():
    ctx = make_field(7, 2)
    squares = [e for e in ctx.elements() if is_square(ctx, e)]
    assert len(squares) == (ctx.q - 1) // 2 + 1
    # Frobenius fixes exactly the prime field
    fixed = [e for e in ctx.elements() if frobenius(ctx, e) == e]
    assert len(fixed) == 7


def test_primitive_element_generates():
    ctx = make_field(5, 2)
    g = primitive_element(ctx)
    powers = {ctx.pow(g, k) for k in range(ctx.q - 1)}
    assert len(powers) == ctx.q - 1


def test_vec_mul_matches_scalar_mul():
    ctx = make_field(5, 3)
    table = element_table(ctx)
    shifted = table[(7 * np.arange(ctx.q) + 3) % ctx.q]
    codes = encode(ctx, vec_mul(ctx, table, shifted))
    for k in range(0, ctx.q, 11):
        a = ctx.from_int(k)
        b = ctx.from_int((7 * k + 3) % ctx.q)
        assert ctx.from_int(int(codes[k])) == ctx.mul(a, b)


SMALL_FIELDS = [(p, n) for p in primerange(5, 10 ** 4) for n in range(1, 6) if p ** n <= 10 ** 4]


def test_frobenius_is_a_field_automorphism():
    for p, n in SMALL_FIELDS:
        ctx = make_field(p, n)
        rng = random.Random(ctx.q)
        for _ in range(20):
            a, b = ctx.from_int(rng.randrange(ctx.q)), ctx.from_int(rng.randrange(ctx.q))
            assert frobenius(ctx, ctx.add(a, b)) == ctx.add(frobenius(ctx, a), frobenius(ctx, b)), (p, n)
            assert frobenius(ctx, ctx.mul(a, b)) == ctx.mul(frobenius(ctx, a), frobenius(ctx, b)), (p, n)


@pytest.mark.parametrize("p, n", [(5, 1), (11, 1), (101, 1), (5, 2), (7, 2), (5, 3), (11, 2), (5, 4)])
def test_half_of_the_units_are_squares(p, n):
    ctx = make_field(p, n)
    squares = sum(is_square(ctx, e) for e in ctx.elements() if not e.is_zero())
    assert squares == (ctx.q - 1) // 2


@pytest.mark.parametrize("p, n", [(3, 2), (5, 2), (7, 2), (5, 3)])
def test_frobenius_has_order_n(p, n):
    ctx = make_field(p, n, allow_char3=True)
    for e in ctx.elements():
        image = e
        for _ in range(n):
            image = frobenius(ctx, image)
        assert image == e
    # and no smaller power is the identity on a primitive element
    g = primitive_element(ctx)
    image = g
    for _ in range(n - 1):
        image = frobenius(ctx, image)
        assert image != g
