import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsdcodes.code import LinearCode, load_code
from hsdcodes.construct import (
    CASES,
    BorderedParams,
    ConstructionSpec,
    ExtensionSpec,
    bordered_residuals,
    build_code,
    build_up,
    check_bordered,
    construct_bordered,
    construct_eq5,
    construct_eq6,
    construct_eq7,
    construct_eq8,
    construct_eq17_18,
    construct_extended,
    embed_lengthen,
    find_extension_vectors,
    solve_bordered_params,
)
from hsdcodes.errors import (
    BadAlpha,
    CongruenceViolated,
    GuardViolated,
    NotUnitary,
    PreconditionFailed,
    SpecViolated,
    SystemViolated,
)
from hsdcodes.field import alpha_for_minus_one, field_from_order
from hsdcodes.linalg import Matrix, echelon_form, hermitian_inner, identity

from helpers import random_alpha, random_unitary

F4, F9, F16 = (field_from_order(q) for q in (4, 9, 16))


def example(name):
    return json.loads((resources.files("hsdcodes") / "data" / "examples" / name).read_text())


def test_eq5_eq6_identity():
    for F in (F9, F16):
        a = alpha_for_minus_one(F)
        for build in (construct_eq5, construct_eq6):
            C = build(identity(F, 4), a)
            assert C.is_self_dual_h() and C.min_distance() == 2


def test_eq5_rejects_bad_inputs():
    with pytest.raises(BadAlpha):
        construct_eq5(identity(F9, 3), F9.one)
    bad = identity(F9, 3) * F9.omega
    with pytest.raises(NotUnitary):
        construct_eq5(bad, alpha_for_minus_one(F9))


@given(st.sampled_from([4, 9, 16, 25]), st.integers(2, 6), st.integers(0, 10**6))
def test_unitary_builders_self_dual(order, n, seed):
    F = field_from_order(order)
    L = random_unitary(F, n, seed)
    a = random_alpha(F, seed)
    for build in (construct_eq5, construct_eq6):
        C = build(L, a)
        assert C.is_self_dual_h() and (C.n, C.k) == (2 * n, n)
    if (n - 2) % F.p == 0:
        assert construct_eq7(L, a).is_self_dual_h()
    else:
        with pytest.raises(CongruenceViolated):
            construct_eq7(L, a)
    if (n + 2) % F.p == 0:
        assert construct_eq8(L, a).is_self_dual_h()


def test_eq7_gf9_n2_identity():
    a = alpha_for_minus_one(F9)
    C = construct_eq7(identity(F9, 2), a)
    want = Matrix.parse(F9, [["0", "1", str(a), "0"], ["1", "0", "0", str(a)]])
    assert C.generator == want and C.is_self_dual_h()


def test_bordered_table_row_gf9():
    p = BorderedParams.parse(F9, ["0", "w", "w^3", "1", "w", "w", "0"])
    check_bordered(p, 3, "minus")
    C = construct_bordered(identity(F9, 3), p, "minus")
    assert (C.n, C.k) == (8, 4) and C.min_distance() == 4


def test_bordered_rejects_wrong_system():
    p = BorderedParams.parse(F9, ["0", "w", "w^3", "1", "w", "w", "0"])
    with pytest.raises(SystemViolated):
        check_bordered(p, 4, "minus")


def test_solver_matches_tabulated_gf121():
    F = field_from_order(121)
    p = solve_bordered_params("minus", 0, 2, 4, F)
    assert p.to_strings() == ["0", "w^2", "w^68", "w^75", "w^6", "w^5", "w^5"]
    C = construct_bordered(random_unitary(F, 4, 3), p, "minus")
    assert C.is_self_dual_h() and (C.n, C.k) == (10, 5)


@pytest.mark.parametrize("family,dcase", sorted(CASES))
def test_solver_cases_satisfy_system(family, dcase):
    hits = 0
    for order in (9, 25, 49, 121, 4, 16):
        F = field_from_order(order)
        for n in range(3, 3 + 2 * F.p + 2):
            for case in CASES[(family, dcase)]:
                try:
                    p = solve_bordered_params(family, dcase, case, n, F)
                except GuardViolated:
                    continue
                assert all(r.is_zero() for r in bordered_residuals(p, n, family))
                assert p.delta.is_zero() == (dcase == 0)
                hits += 1
    assert hits > 0


def test_char2_families_coincide():
    for F in (F4, F16):
        for n in range(3, 10):
            for dcase in (0, 1):
                for case in CASES[("minus", dcase)]:
                    try:
                        p = solve_bordered_params("minus", dcase, case, n, F)
                    except GuardViolated:
                        continue
                    check_bordered(p, n, "plus")
                    L = random_unitary(F, n, n + case)
                    Gm = construct_bordered(L, p, "minus").generator
                    Gp = construct_bordered(L, p, "plus").generator
                    assert np.array_equal(Gm.a, Gp.a)


def test_example_extensions_reproduce_printed_codes():
    for name, d in (("mds_gf64_12.json", 7), ("mds_gf121_14.json", 8)):
        obj = example(name)
        spec = {k: v for k, v in obj["extension"].items() if k != "tabulated_ijkl"}
        C = build_code(ConstructionSpec.from_json(spec))
        printed = load_code(obj)
        assert C.same_code(printed)
        assert C.is_self_dual_h() and C.is_mds() and C.n - C.k + 1 == d


def test_algorithm2_finds_printed_vector():
    obj = example("mds_gf64_12.json")["extension"]
    F = field_from_order(64)
    L = Matrix.from_json(obj["L"])
    lam = [F.elem(F.parse(v)) for v in obj["lambdas"]]
    a = F.elem(F.parse(obj["a"]))
    found = find_extension_vectors(L, lam, a)
    x = np.array([F.parse(v) for v in obj["x"]])
    assert any(np.array_equal(f, x) for f in found)
    x0 = np.full(L.rows + 2, F.zero_code)
    x0[-2], x0[-1] = a.code, 0
    assert any(np.array_equal(f, x0) for f in found)
    assert all(not np.all(f == F.zero_code) for f in found)


@given(st.sampled_from([9, 25, 16]), st.integers(2, 5), st.integers(0, 10**6))
def test_extension_with_trivial_vector(order, n, seed):
    F = field_from_order(order)
    L = random_unitary(F, n, seed)
    a = random_alpha(F, seed)
    rng = np.random.default_rng(seed)
    lam = [F.elem(int(c)) for c in rng.integers(0, F.order, n)]
    x = [F.zero] * n + [a, F.one]
    C = construct_extended(L, ExtensionSpec(tuple(lam), tuple(x), a))
    assert C.is_self_dual_h() and C.min_distance() <= 2 + (n == 1)
    with pytest.raises(SpecViolated):
        construct_extended(L, ExtensionSpec(tuple(lam), tuple([F.one] * (n + 2)), a))


def test_eq17_gf9_n4():
    a = alpha_for_minus_one(F9)
    L = random_unitary(F9, 4, 1)
    C = construct_eq17_18(L, a)
    assert C.is_self_dual_h() and (C.n, C.k) == (10, 5)
    assert 1 <= C.min_distance() <= 6
    for D in construct_eq17_18(L, a, "search"):
        assert D.is_self_dual_h()
    with pytest.raises(CongruenceViolated):
        construct_eq17_18(random_unitary(F9, 5, 1), a)


def test_build_up_gf9():
    a = alpha_for_minus_one(F9)
    seed = LinearCode(Matrix(F9, np.array([[0, a.code]])))
    minus_one = (-F9.one).code
    hits = []
    for u in range(F9.order):
        for v in range(F9.order):
            x = np.array([u, v])
            if hermitian_inner(F9, x, x) == minus_one:
                C = build_up(seed, x, a)
                assert C.is_self_dual_h() and (C.n, C.k) == (4, 2)
                hits.append(C.min_distance())
    assert hits and max(hits) <= 3
    with pytest.raises(PreconditionFailed):
        build_up(seed, [F9.one, F9.zero], a)


@given(st.sampled_from([4, 9, 16]), st.integers(2, 5), st.integers(0, 10**6))
def test_embed_round_trip(order, n, seed):
    F = field_from_order(order)
    C = construct_eq5(random_unitary(F, n, seed), random_alpha(F, seed))
    short = LinearCode(Matrix(F, C.generator.a[:-1]))
    D = embed_lengthen(short)
    assert D.is_self_dual_h() and D.k == n
    # odd length: shorten C at its last coordinate, then embed pads it back
    G = C.generator.a[:, ::-1]
    E, r, piv = echelon_form(Matrix(F, G))
    if piv[0] == 0:
        shortened = Matrix(F, E.a[1:r, 1:][:, ::-1])
        D2 = embed_lengthen(LinearCode(shortened))
        assert D2.is_self_dual_h() and (D2.n, D2.k) == (2 * n, n)


def test_spec_roundtrip_and_dispatch():
    spec = ConstructionSpec("eq5", 9, 5, (1, 0, 2, 1), 5, abcd=["1", "0", "0", "w^2"])
    again = ConstructionSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert again == spec
    C = build_code(again)
    assert C.is_self_dual_h() and C.min_distance() == 6
    b = ConstructionSpec("bordered_minus", 9, 4, (0, 1, 0, 0), 4, {"delta_case": 0, "case": 1})
    assert build_code(b).is_self_dual_h()
