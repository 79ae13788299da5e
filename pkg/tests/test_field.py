import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsdcodes.errors import FieldTooLarge, NoRoot, NotPrime, ZeroInput
from hsdcodes.field import FieldCtx, alpha_for_minus_one, field_from_order, field_new, norm_root

from oracles import PolyField

ORDERS = [4, 9, 16, 25, 49, 64, 81, 121]


def poly_of(F, code):
    return 0 if code == F.zero_code else int(F.exp_table[code])


@pytest.mark.parametrize("p,m,order", [(3, 1, 9), (2, 2, 16), (11, 1, 121), (2, 1, 4)])
def test_field_new_orders(p, m, order):
    F = field_new(p, m)
    assert F.order == order and F.q == p**m
    w = F.omega
    assert (w ** (order - 1)) == F.one
    # omega is primitive: no proper divisor of the order kills it
    for d in range(1, order - 1):
        if (order - 1) % d == 0:
            assert w**d != F.one


def test_rejects_bad_inputs():
    with pytest.raises(NotPrime):
        field_new(6, 1)
    with pytest.raises(ValueError):
        field_from_order(10)
    with pytest.raises(ValueError):
        field_from_order(27)  # odd power, no quadratic structure
    with pytest.raises(FieldTooLarge):
        FieldCtx(2, 14)


def test_small_identities():
    F9 = field_new(3, 1)
    w = F9.omega
    assert w**4 + F9.one == F9.zero
    assert w.conj() == w**3
    assert F9.zero.conj() == F9.zero and F9.one.conj() == F9.one
    F4 = field_new(2, 1)
    w4 = F4.omega
    assert w4 + w4**2 == F4.one
    assert w4.conj() == w4**2


@pytest.mark.parametrize("order", ORDERS)
def test_tables_agree_with_polynomial_oracle(order):
    F = field_from_order(order)
    P = PolyField(F.p, F.modulus)
    rng = np.random.default_rng(order)
    codes = rng.integers(0, F.order, size=(60, 2))
    for a, b in codes:
        assert poly_of(F, F.add(int(a), int(b))) == P.add(poly_of(F, a), poly_of(F, b))
        assert poly_of(F, F.mul(int(a), int(b))) == P.mul(poly_of(F, a), poly_of(F, b))
    # the exp table really is successive powers of x
    for k in range(min(F.order - 1, 50)):
        assert int(F.exp_table[k]) == P.pow(F.p, k)  # x is the integer p


@pytest.mark.parametrize("order", [9, 16, 25, 49])
def test_inverse_and_frobenius(order):
    F = field_from_order(order)
    for x in F.elements():
        if not x.is_zero():
            assert x * x.inv() == F.one
        assert x.conj().conj() == x
        assert x ** F.q == x.conj()
        assert x.norm().in_subfield()


def _elements(order):
    F = field_from_order(order)
    return st.integers(0, F.order - 1).map(F.elem)


@pytest.mark.parametrize("order", [9, 16, 49])
def test_field_axioms_property(order):
    F = field_from_order(order)

    @given(_elements(order), _elements(order), _elements(order))
    def check(a, b, c):
        assert a + b == b + a and a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == F.zero
        assert (a + b).conj() == a.conj() + b.conj()
        assert (a * b).conj() == a.conj() * b.conj()

    check()


def test_norm_root_and_alpha():
    F = field_from_order(9)
    q = F.q
    minus_one = -F.one
    theta = norm_root(minus_one)
    assert theta ** (q + 1) == minus_one
    # oracle: every theta with theta^4 = w^4
    roots = [x for x in F.elements() if not x.is_zero() and x**4 == F.omega**4]
    assert theta in roots and theta.log() == min(r.log() for r in roots)
    assert norm_root(F.one) ** (q + 1) == F.one
    with pytest.raises(ZeroInput):
        norm_root(F.zero)
    with pytest.raises(NoRoot):
        norm_root(F.omega)
    assert alpha_for_minus_one(field_from_order(4)) == field_from_order(4).one


@pytest.mark.parametrize("order", ORDERS)
def test_alpha_norm_is_minus_one(order):
    F = field_from_order(order)
    a = alpha_for_minus_one(F)
    assert a ** (F.q + 1) + F.one == F.zero
    assert all(norm_root(x) ** (F.q + 1) == x for x in F.elements() if x.in_subfield() and not x.is_zero())


def test_parse_format_roundtrip():
    F = field_from_order(121)
    for code in range(F.order):
        assert F.parse(F.format(code)) == code
    assert F.elem(F.parse("2")) == F(2)
    assert F.elem(F.parse("w")) == F.omega
