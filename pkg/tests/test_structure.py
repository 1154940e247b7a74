import itertools

import numpy as np
import pytest

from triperm.errors import ActionError
from triperm.funcspace import enumerate_poly_functions, enumerate_unit_valued
from triperm.ring import build_ring
from triperm.structure import (PermGroup, TableMonoid, additive_monoid, commutator, derived_series,
                               group_props, is_nilpotent, is_normal, is_perfect, is_solvable,
                               lower_central_series, ml_subgroup, multiplicative_monoid,
                               nonabelian_witness_f2, normality_report, perm_inverse,
                               permutation_group_of, semidirect, units_of, semidirect_unit_instances,
                               validate_action, verify_decomposition, verify_semidirect_units)


def _sym(n):
    return PermGroup.from_generators(np.array([np.roll(np.arange(n), 1), [1, 0] + list(range(2, n))]))


def test_symmetric_group_series():
    S4 = _sym(4)
    assert S4.order == 24
    assert [g.order for g in derived_series(S4)] == [24, 12, 4, 1]
    assert is_solvable(S4) and not is_nilpotent(S4)
    S5 = _sym(5)
    ds = derived_series(S5)
    assert [g.order for g in ds] == [120, 60]
    assert is_perfect(ds[-1]) and not is_solvable(S5)
    D4 = PermGroup.from_generators(np.array([[1, 2, 3, 0], [3, 2, 1, 0]]))
    assert D4.order == 8 and is_nilpotent(D4) and not D4.is_abelian()
    assert [g.order for g in lower_central_series(D4)] == [8, 2, 1]


def test_group_helpers():
    p = np.array([2, 0, 1, 3])
    assert np.array_equal(p[perm_inverse(p)], np.arange(4))
    q = np.array([1, 0, 2, 3])
    c = commutator(p, q)
    assert np.array_equal(c, perm_inverse(p)[perm_inverse(q)][p][q])
    with pytest.raises(ValueError):
        PermGroup.from_elements(np.array([[0, 1, 2], [1, 2, 0]]))


def test_is_normal_examples():
    S4 = _sym(4)
    V4 = PermGroup.from_generators(np.array([[1, 0, 3, 2], [2, 3, 0, 1]]))
    assert is_normal(V4, S4)[0]
    H = PermGroup.from_generators(np.array([[1, 0, 2, 3]]))
    ok, wit = is_normal(H, S4)
    assert not ok
    g, h, conj = wit
    assert np.array_equal(conj, g[h][perm_inverse(g)]) and conj not in H
    trivial = PermGroup.from_generators(np.arange(4)[None, :])
    assert is_normal(trivial, S4)[0]


def test_series_invariants_on_induced_groups():
    for spec in ("F2", "F3"):
        G = group_props(build_ring(spec), 2)
        if G["nilpotent"]:
            assert G["solvable"]
    R = build_ring("F3")
    H = ml_subgroup(R, 2, 2)
    ds = derived_series(H)
    assert is_perfect(ds[-1])


def test_group_props():
    f2 = group_props(build_ring("F2"), 2)
    assert f2["order"] == 8 and f2["nilpotent"] and f2["solvable"] and not f2["abelian"] and f2["p_group"]
    f3 = group_props(build_ring("F3"), 2)
    assert f3["order"] == 1296 and f3["solvable"] and not f3["nilpotent"] and not f3["abelian"]
    z4 = group_props(build_ring("Z4"), 2)
    assert z4["order"] == 8192 and z4["nilpotent"] and z4["p_group"]


def test_p_f5_not_solvable():
    P = permutation_group_of(build_ring("F5"))
    assert [g.order for g in derived_series(P)] == [120, 60]


def test_nonabelian_witness():
    w = nonabelian_witness_f2()
    assert not w["commute"] and w["ab"] != w["ba"]


# -- monoids and semidirect products -------------------------------------------

def test_trivial_semidirect():
    T = TableMonoid(np.zeros((1, 1), dtype=np.int64), 0, "1")
    S = semidirect(T, T, np.zeros((1, 1), dtype=np.int64))
    assert S.monoid.size == 1


def test_function_semidirect_f2():
    R = build_ring("F2")
    F = enumerate_poly_functions(R, 1)
    U = enumerate_unit_valued(F)
    B = additive_monoid(F)
    A = multiplicative_monoid(F).restrict(F.index_of(U.tables))
    act = multiplicative_monoid(F).table[F.index_of(U.tables)]
    S = semidirect(B, A, act)
    assert S.monoid.size == 4 * 1


def test_level_model_matches_composition():
    """(u,f)(v,g) = (uv, f+ug) on F2 function tables equals composition of single-level factors."""
    from triperm.poly import lagrange_interpolate
    from triperm.trimonoid import compose_tri, induced_perm, level_factor
    R = build_ring("F2")
    F = enumerate_poly_functions(R, 1)
    B, A = additive_monoid(F), multiplicative_monoid(F)
    S = semidirect(B, A, A.table.copy())
    tables = F.tables
    units = [i for i in range(len(F)) if (tables[i] == 1).all()]
    for (u, f), (v, g) in itertools.product(itertools.product(units, range(len(F))), repeat=2):
        prod = S.monoid.table[S.pair(u, f), S.pair(v, g)]
        pu, pf = S.split(prod)
        lf = lambda ui, fi: level_factor(R, 2, 2, lagrange_interpolate(tables[ui], R),
                                         lagrange_interpolate(tables[fi], R))
        lhs = induced_perm(compose_tri(lf(u, f), lf(v, g)))
        assert np.array_equal(lhs, induced_perm(lf(pu, pf)))


def test_units_of_examples():
    R = build_ring("Z4")
    F = enumerate_poly_functions(R, 1)
    M = multiplicative_monoid(F)
    U, idx, inv = units_of(M)
    assert {tuple(F.tables[i]) for i in idx} == {tuple(r) for r in enumerate_unit_valued(F).tables}
    assert np.array_equal(M.table[idx, inv], np.full(len(idx), M.identity))
    G = additive_monoid(F)
    UG, gidx, _ = units_of(G)
    assert UG.size == G.size


def test_bad_actions_rejected():
    R = build_ring("F3")
    F = enumerate_poly_functions(R, 1)
    B, A = additive_monoid(F), multiplicative_monoid(F)
    with pytest.raises(ActionError):
        validate_action(B, A, np.zeros((A.size, B.size), dtype=np.int64))
    const = np.tile(np.arange(B.size), (A.size, 1))
    const[A.identity] = np.arange(B.size)
    validate_action(B, A, const)                           # trivial action is fine
    swap = const.copy()
    swap[A.identity] = np.roll(np.arange(B.size), 1)
    with pytest.raises(ActionError):
        validate_action(B, A, swap)


def test_semidirect_unit_instances():
    inst = semidirect_unit_instances()
    assert len(inst) >= 3
    for name, B, A, act in inst:
        rep = verify_semidirect_units(B, A, act, name)
        assert rep["map_bijective"] and rep["map_homomorphic"] and rep["restricted_action_automorphic"]
        assert rep["lhs_order"] == rep["rhs_order"]


# -- decompositions and normality --------------------------------------------

@pytest.mark.parametrize("spec,orders", [("F2", (8, 4, 2)), ("F3", (1296, 216, 6)), ("Z4", (8192, 1024, 8))])
def test_induced_decomposition(spec, orders):
    rep = verify_decomposition(build_ring(spec), 2, "induced")
    assert rep["lhs_order"] == rep["rhs_order"] == orders[0]
    assert rep["factor_orders"]["ML"] == orders[1] and rep["factor_orders"]["MT_prev"] == orders[2]
    assert rep["map_bijective"] and rep["map_homomorphic"] and rep["split"] and rep["kernel_normal"]


@pytest.mark.parametrize("level", ["monoid", "group"])
def test_polynomial_level_decomposition(level):
    for spec, n in (("Z4", 2), ("F3", 3)):
        rep = verify_decomposition(build_ring(spec), n, level, samples=30, seed=1)
        assert rep["map_bijective"] and rep["map_homomorphic"], rep


def test_normality():
    R = build_ring("F2")
    rep = normality_report(R, 2, 2)
    assert rep["normal"]
    rep = normality_report(R, 3, 2)
    assert not rep["normal"]
    explicit = rep["witnesses"][-1]
    assert explicit["in_G"] and not explicit["in_H"]
    assert normality_report(build_ring("F3"), 2, 2)["normal"]
