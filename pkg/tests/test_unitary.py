import itertools

import pytest

from hsdcodes.errors import CapExceeded, SizeTooSmall
from hsdcodes.field import field_from_order
from hsdcodes.linalg import diag, identity, is_unitary, matrix_power
from hsdcodes.unitary import (
    PowerFamily,
    algorithm1,
    check_transvection,
    generating_transvection,
    group_closure_order,
    group_elements,
    group_order,
    make_generators,
    solve_transvection,
    transvection_solutions,
)

F9 = field_from_order(9)


def brute_solutions(F):
    """Every (a, b) with a^(q+1) + b^(q+1) = 1 and conj(a)(-b) + conj(b) a = 0."""
    out = []
    for a, b in itertools.product(F.elements(), repeat=2):
        if a.norm() + b.norm() == F.one and a.conj() * (-b) + b.conj() * a == F.zero:
            out.append((a, b))
    return out


def test_solve_transvection_matches_brute_force():
    sols = solve_transvection(F9, deterministic_pick=False)
    assert {(s[0], s[1]) for s in sols} == set(brute_solutions(F9))
    assert (F9(-1), F9.zero) in {(s[0], s[1]) for s in sols}
    assert (F9.one, F9.zero, F9.zero, F9.one) in sols
    pick = solve_transvection(F9)
    assert not (pick[0] == F9.one and pick[1].is_zero())
    for s in sols:
        assert check_transvection(*s)


@pytest.mark.parametrize("order", [4, 9, 16])
def test_general_solutions(order):
    F = field_from_order(order)
    sols = transvection_solutions(F)
    brute = [
        s
        for s in itertools.product(F.elements(), repeat=4)
        if check_transvection(*s) and s != (F.one, F.zero, F.zero, F.one)
    ]
    assert sorted(map(lambda t: tuple(x.code for x in t), sols)) == sorted(
        map(lambda t: tuple(x.code for x in t), brute)
    )


def test_generators_are_unitary():
    for n in (2, 3, 4, 6):
        g = make_generators(F9, n)
        for M in g.group_generators():
            assert is_unitary(M)
        assert matrix_power(g.T1, n) == identity(F9, n)
    with pytest.raises(SizeTooSmall):
        make_generators(F9, 1)


def test_tabcd_minus_one():
    m1 = F9(-1)
    g = make_generators(F9, 5, abcd=(m1, F9.zero, F9.zero, m1))
    assert g.Tabcd == diag(F9, [m1, m1, F9.one, F9.one, F9.one])


def test_algorithm1_outputs_unitary():
    g = make_generators(F9, 4)
    out = list(algorithm1(g, 4, 1))
    assert len(out) == 16
    assert out[0][1] == identity(F9, 4)
    assert all(is_unitary(L) for _, L in out)
    fam = PowerFamily(g, 4)
    assert fam.matrix((1, 1, 0, 1)) == out[0b1101][1]


@pytest.mark.parametrize("wo", ["printed", "reversed"])
@pytest.mark.parametrize("act", ["row", "column"])
def test_conventions_stay_unitary(wo, act):
    F = field_from_order(16)
    g = make_generators(F, 5, action=act)
    fam = PowerFamily(g, 5, wo)
    assert is_unitary(fam.matrix((1, 2, 0, 1)))


def test_group_order_formula():
    assert group_order(3, 3) == 24192
    assert group_order(4, 3) == 52254720
    for q in (2, 3, 4, 5, 7):
        assert group_order(1, q) == q + 1


def test_closure_small_groups():
    assert group_closure_order([identity(F9, 3)]) == 1
    g = make_generators(F9, 5)
    assert group_closure_order([g.T1]) == 5
    with pytest.raises(CapExceeded):
        group_closure_order(make_generators(F9, 3).group_generators(), cap=100)


def test_group_elements_bfs():
    gens = make_generators(field_from_order(4), 2).group_generators()
    elems = list(group_elements(gens))
    assert elems[0] == identity(field_from_order(4), 2)
    assert len({e.a.tobytes() for e in elems}) == len(elems) == group_closure_order(gens)


def test_generating_transvection_gf9():
    abcd = generating_transvection(F9, 3)
    assert abcd is not None
    gens = make_generators(F9, 3, abcd=abcd).group_generators()
    assert group_closure_order(gens) == group_order(3, 3)
