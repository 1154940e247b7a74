"""Acceptance suite: one group of tests per criterion.

Run ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from triperm.dualnum import (DualPoly, all_coeff_rows, dual_function_rows, dual_ring, embed_psi,
                             equiv_dual, equiv_dual_brute, equiv_signature, is_perm_dual,
                             phi_injectivity)
from triperm.funcspace import (enumerate_poly_functions, enumerate_poly_permutations, enumerate_unit_valued,
                               induced_group_mt, induced_group_tr, jiang_report, naive_closure, tr_vs_mt,
                               verify_order_formula, verify_ratio_theorems)
from triperm.poly import (MultiPoly, automorphism_inverse, func_values, is_automorphism, is_bijective_brute,
                          newton_inverse, noebauer_criterion, substitute)
from triperm.ring import build_ring
from triperm.structure import (PermGroup, derived_series, group_props, nonabelian_witness_f2,
                               normality_report, permutation_group_of, perm_inverse, semidirect_unit_instances,
                               verify_decomposition, verify_semidirect_units)
from triperm.trimonoid import (apply_tri, compose_tri, identity_tri, induced_perm, invert_tri, level_factor,
                               random_mt, random_tr, solve_preimage)


def criterion(num, title):
    return pytest.mark.criterion(num, title)


def _polys(R, deg):
    return [MultiPoly.univariate(R, r.tolist()) for r in all_coeff_rows(R, deg)]


# -- 1 ----------------------------------------------------------------------

C1 = criterion(1, "counting formulas by closure enumeration")


@C1
@pytest.mark.parametrize("q,k", [(2, 1), (2, 2), (3, 1)])
def test_c1_field_counts(q, k):
    t0 = time.perf_counter()
    F = enumerate_poly_functions(build_ring(f"F{q}"), k)
    FU = enumerate_unit_valued(F)
    assert len(F) == q ** (q ** k)
    assert len(FU) == (q - 1) ** (q ** k)
    assert time.perf_counter() - t0 < 10


@C1
def test_c1_z4_counts():
    t0 = time.perf_counter()
    R = build_ring("Z4")
    F = enumerate_poly_functions(R, 1)
    assert (len(F), len(enumerate_unit_valued(F)), len(enumerate_poly_permutations(R, space=F))) == (64, 16, 8)
    assert np.array_equal(F.tables, naive_closure(R, 1))
    assert time.perf_counter() - t0 < 10


# -- 2 ----------------------------------------------------------------------

@criterion(2, "unit-valued ratio equals (q-1)^(q^k) / q^(q^k)")
@pytest.mark.parametrize("spec,k", [("Z4", 1), ("F2[t]/t^2", 1), ("Z9", 1), ("Z4", 2)])
def test_c2_unit_ratio(spec, k):
    R = build_ring(spec)
    rep = verify_ratio_theorems(R, k)
    q = R.residue_size
    observed = Fraction(rep["counts"]["FU"], rep["counts"]["F"])
    assert observed == Fraction((q - 1) ** (q ** k), q ** (q ** k))
    assert rep["match"]


# -- 3 ----------------------------------------------------------------------

@criterion(3, "materialized |pi_2(MT_2)| equals the product formula")
@pytest.mark.parametrize("spec,order", [("F2", 8), ("F3", 1296), ("Z4", 8192)])
def test_c3_induced_order(spec, order):
    t0 = time.perf_counter()
    R = build_ring(spec)
    rep = verify_order_formula(R, 2)
    assert rep["match"] and rep["formula"]["value"] == order == rep["counts"]["materialized"]
    G = induced_group_mt(R, 2)
    assert PermGroup.from_elements(G.perms).order == order        # closed under composition
    assert time.perf_counter() - t0 < 60


# -- 4 ----------------------------------------------------------------------

@criterion(4, "pi_2(TR_2) versus pi_2(MT_2)")
def test_c4_tr_vs_mt():
    rep = tr_vs_mt(build_ring("F2"))
    assert rep["equal"]
    for spec, name in (("Z4", "(2:(x^q-x)+1;0)"), ("F3", "(2:lagrange;0)")):
        R = build_ring(spec)
        rep = tr_vs_mt(R)
        assert rep["subset"] and not rep["equal"]
        wit = {w["element"]: w for w in rep["witnesses"]}
        assert wit[name]["in_MT"] and not wit[name]["in_TR"]
        # rebuild the witness independently and locate its induced permutation
        u = MultiPoly.univariate(R, [1, R.neg(1), 1]) if spec == "Z4" else _lagrange_unit(R)
        perm = induced_perm(level_factor(R, 2, 2, u, MultiPoly.zero(R, 1)))
        assert perm.tobytes() in {p.tobytes() for p in induced_group_mt(R, 2).perms}
        assert perm.tobytes() not in {p.tobytes() for p in induced_group_tr(R, 2).perms}


def _lagrange_unit(R):
    from triperm.poly import lagrange_interpolate
    vals = [1] * R.size
    vals[-1] = R.neg(1)
    return lagrange_interpolate(vals, R)


# -- 5 ----------------------------------------------------------------------

C5 = criterion(5, "solvable / nilpotent properties of induced groups")


@C5
def test_c5_group_props():
    for spec in ("F2", "Z4"):
        rep = group_props(build_ring(spec), 2)
        assert rep["nilpotent"] and rep["p_group"] and math.log2(rep["order"]).is_integer()
    rep = group_props(build_ring("F3"), 2)
    assert rep["solvable"] and not rep["nilpotent"]


@C5
def test_c5_p_f5_not_solvable():
    P = permutation_group_of(build_ring("F5"))
    assert [g.order for g in derived_series(P)] == [120, 60]


@C5
def test_c5_nonabelian_witness():
    w = nonabelian_witness_f2()
    a, b = np.array(w["a"]), np.array(w["b"])
    assert not np.array_equal(a[b], b[a])
    G = induced_group_mt(build_ring("F2"), 2)
    members = {p.tobytes() for p in G.perms}
    assert a.tobytes() in members and b.tobytes() in members


# -- 6 ----------------------------------------------------------------------

C6 = criterion(6, "inverse and preimage round-trips")


@C6
def test_c6_invert_tr3():
    R = build_ring("Z4")
    rng = np.random.default_rng(2024)
    ident = identity_tri(R, 3)
    for _ in range(1000):
        t = random_tr(R, 3, 3, rng)
        inv = invert_tri(t)
        assert compose_tri(t, inv) == ident and compose_tri(inv, t) == ident


@C6
def test_c6_solve_apply_mt3():
    R = build_ring("Z4")
    rng = np.random.default_rng(2025)
    for _ in range(1000):
        m = random_mt(R, 3, 3, rng)
        for p in rng.integers(0, R.size, size=(100, 3)).tolist():
            assert solve_preimage(m, apply_tri(m, p)) == tuple(p)


# -- 7 ----------------------------------------------------------------------

C7 = criterion(7, "split-extension decomposition and normality")


@C7
@pytest.mark.parametrize("spec", ["F2", "F3", "Z4"])
def test_c7_decomposition(spec):
    rep = verify_decomposition(build_ring(spec), 2, "induced")
    assert rep["map_bijective"] and rep["map_homomorphic"] and rep["split"] and rep["kernel_normal"]
    assert rep["lhs_order"] == rep["rhs_order"]


@C7
def test_c7_normality():
    R = build_ring("F2")
    assert normality_report(R, 2, 2)["normal"]
    rep = normality_report(R, 3, 2)
    assert not rep["normal"]
    g, h, conj = (np.array(rep["witnesses"][0][k]) for k in ("g", "h", "g h g^-1"))
    assert np.array_equal(conj, g[h][perm_inverse(g)])
    explicit = rep["witnesses"][-1]
    assert explicit["in_G"] and not explicit["in_H"]


# -- 8 ----------------------------------------------------------------------

@criterion(8, "units of a semidirect product")
def test_c8_semidirect_units():
    inst = semidirect_unit_instances()
    assert len(inst) >= 3
    for name, B, A, act in inst:
        rep = verify_semidirect_units(B, A, act, name)
        assert rep["map_bijective"] and rep["map_homomorphic"] and rep["lhs_order"] == rep["rhs_order"]


# -- 9 ----------------------------------------------------------------------

C9 = criterion(9, "dual-number criteria, psi homomorphism, phi injectivity")


@C9
@pytest.mark.parametrize("spec", ["F2", "F3", "Z4"])
def test_c9_criteria_exhaustive(spec):
    R = build_ring(spec)
    D = dual_ring(R, 1)
    rows = all_coeff_rows(R, 3)
    polys = _polys(R, 3)
    a, b = np.divmod(np.arange(len(rows) ** 2), len(rows))
    # brute force: the value table of f0 + f1*a1 on every element of R_1
    tables = dual_function_rows(D, rows[a], rows[b])
    bijective = (np.sort(tables, axis=1) == np.arange(D.size)).all(axis=1)
    _, brute_class = np.unique(tables, axis=0, return_inverse=True)
    sig_class: dict = {}
    labels = np.empty(len(a), dtype=np.int64)
    for idx, (i, j) in enumerate(zip(a.tolist(), b.tolist())):
        f = DualPoly(R, 1, (polys[i], polys[j]))
        assert is_perm_dual(f) == bijective[idx]
        labels[idx] = sig_class.setdefault(equiv_signature(f), len(sig_class))
    # equiv_dual is equality of signatures: the two partitions must coincide
    pairs = np.unique(np.stack([labels, brute_class.ravel()], axis=1), axis=0)
    assert len(pairs) == len(sig_class) == len(np.unique(brute_class))
    rng = np.random.default_rng(9)
    for _ in range(300):
        i, j = rng.integers(0, len(a), 2)
        f = DualPoly(R, 1, (polys[a[i]], polys[b[i]]))
        g = DualPoly(R, 1, (polys[a[j]], polys[b[j]]))
        assert equiv_dual(f, g) == equiv_dual_brute(f, g)


@C9
def test_c9_psi_homomorphism():
    rng = np.random.default_rng(500)
    rings = [build_ring(s) for s in ("F2", "F3", "Z4")]
    pools = {}
    for R in rings:
        ps = _polys(R, 3)
        pools[R.name] = (ps, [p for p in ps if is_perm_dual(DualPoly(R, 1, (p, MultiPoly.zero(R, 1))))])
    for k in range(500):
        R = rings[k % 3]
        ps, perms = pools[R.name]
        f, g = (DualPoly(R, 1, (perms[rng.integers(len(perms))], ps[rng.integers(len(ps))])) for _ in range(2))
        assert embed_psi(f @ g) == compose_tri(embed_psi(f), embed_psi(g))


@C9
@pytest.mark.parametrize("spec", ["F2", "Z4"])
def test_c9_phi_injective(spec):
    rep = phi_injectivity(build_ring(spec))
    assert rep["saturated"] and rep["well_defined"] and rep["injective"]
    assert rep["phi_images"] == rep["P_R1_by_closure"]


# -- 10 ---------------------------------------------------------------------

C10 = criterion(10, "Noebauer and Gilmer criteria against brute force")


@C10
@pytest.mark.parametrize("spec", ["Z4", "Z8", "Z9", "F2[t]/t^2"])
def test_c10_noebauer_exhaustive(spec):
    R = build_ring(spec)
    for f in _polys(R, 4):
        assert noebauer_criterion(f) == is_bijective_brute(f)


@C10
def test_c10_gilmer_vs_newton():
    R = build_ring("Z4")
    x = MultiPoly.var(R, 1, 1)
    for f in _polys(R, 3):
        g = newton_inverse(f)
        assert is_automorphism(f) == (g is not None)
        if g is not None:
            assert substitute(f, [g]) == x == substitute(g, [f])
            assert automorphism_inverse(f) == g


# -- 11 ---------------------------------------------------------------------

@criterion(11, "Jiang ratio report with orientation flag")
@pytest.mark.parametrize("spec", ["Z4", "F2[t]/t^2"])
def test_c11_jiang(spec):
    R = build_ring(spec)
    rep = jiang_report(R)
    q = R.residue_size
    expected = Fraction(math.factorial(q) * (q - 1) ** q, q ** (2 * q))
    # brute force: distinct value tables of every polynomial of degree <= 5
    tables = {tuple(func_values(f).tolist()) for f in _polys(R, 5)}
    n_perm = sum(len(set(t)) == R.size for t in tables)
    F = enumerate_poly_functions(R, 1)
    assert len(tables) == len(F) and n_perm == len(enumerate_poly_permutations(R, space=F))
    assert Fraction(n_perm, len(tables)) == expected == Fraction(rep["P_over_F"])
    assert rep["P_over_F_matches"] and not rep["printed_F_over_P_matches"] and rep["flag"]
