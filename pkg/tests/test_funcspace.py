import itertools
from fractions import Fraction

import numpy as np
import pytest

from triperm._rows import unique_rows
from triperm.errors import CapExceeded, RingError
from triperm.funcspace import (enumerate_automorphism_induced, enumerate_poly_functions,
                               enumerate_poly_permutations, enumerate_unit_induced,
                               enumerate_unit_valued, induced_group_mt, induced_group_tr,
                               jiang_report, naive_closure, nounitrep_check, order_formula,
                               p_group_check, tr_vs_mt, verify_order_formula, verify_ratio_theorems)
from triperm.poly import MultiPoly, func_values, is_automorphism, is_unit_poly
from triperm.ring import build_ring
from triperm.structure import PermGroup
from triperm.trimonoid import compose_tri, induced_perm, random_mt


def _congruence_preserving(R):
    """Maps f: Z/4 -> Z/4 with a = b mod 2 => f(a) = f(b) mod 2 (an independent oracle)."""
    vals = range(R.size)
    return {f for f in itertools.product(vals, repeat=R.size)
            if all((f[a] - f[b]) % 2 == 0 for a in vals for b in vals if (a - b) % 2 == 0)}


@pytest.mark.parametrize("spec,F,FU,P", [("F2", 4, 1, 2), ("F3", 27, 8, 6), ("Z4", 64, 16, 8)])
def test_counts_k1(spec, F, FU, P):
    R = build_ring(spec)
    space = enumerate_poly_functions(R, 1)
    assert len(space) == F
    assert len(enumerate_unit_valued(space)) == FU
    assert len(enumerate_poly_permutations(R)) == P
    assert np.array_equal(space.tables, naive_closure(R, 1))


def test_z4_oracles():
    Z4 = build_ring("Z4")
    F = enumerate_poly_functions(Z4, 1)
    assert len(F) == 4 * 4 * 2 * 2
    assert {tuple(r) for r in F.tables.tolist()} == _congruence_preserving(Z4)
    perms = enumerate_poly_permutations(Z4)
    bij = [t for t in F.tables if len(set(t.tolist())) == 4]
    assert len(bij) == len(perms) == 8


@pytest.mark.parametrize("q,k", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_field_formulas(q, k):
    R = build_ring(f"F{q}")
    F = enumerate_poly_functions(R, k)
    assert len(F) == q ** (q ** k)
    assert len(enumerate_unit_valued(F)) == (q - 1) ** (q ** k)


def test_closure_is_order_independent():
    for spec, k in (("Z4", 1), ("F3", 2), ("Z8", 1)):
        R = build_ring(spec)
        a = enumerate_poly_functions(R, k, seed=1).tables
        b = enumerate_poly_functions(R, k, seed=2).tables
        assert np.array_equal(a, b)


def test_closure_matches_naive_oracle_k2():
    R = build_ring("F2")
    assert np.array_equal(enumerate_poly_functions(R, 2).tables, naive_closure(R, 2))


def test_caps():
    with pytest.raises(CapExceeded):
        enumerate_poly_functions(build_ring("Z9"), 3)
    with pytest.raises(CapExceeded):
        enumerate_poly_functions(build_ring("Z9"), 2)


def test_unit_and_automorphism_induced():
    for spec, nu, na in (("F2", 1, 2), ("F3", 2, 6), ("Z4", 4, 8)):
        R = build_ring(spec)
        assert len(enumerate_unit_induced(R, 1)) == nu
        assert len(enumerate_automorphism_induced(R)) == na
    # cross-check against the polynomials themselves at low degree
    R = build_ring("Z4")
    unit_funcs, auto_funcs = set(), set()
    for coeffs in itertools.product(range(4), repeat=4):
        f = MultiPoly.univariate(R, list(coeffs))
        if is_unit_poly(f):
            unit_funcs.add(tuple(func_values(f).tolist()))
        if is_automorphism(f):
            auto_funcs.add(tuple(func_values(f).tolist()))
    assert unit_funcs == {tuple(r) for r in enumerate_unit_induced(R, 1).tables.tolist()}
    assert auto_funcs == {tuple(r) for r in enumerate_automorphism_induced(R).tables.tolist()}


@pytest.mark.parametrize("spec,order", [("F2", 8), ("F3", 1296), ("Z4", 8192)])
def test_induced_group_order(spec, order):
    R = build_ring(spec)
    rep = verify_order_formula(R, 2)
    assert rep["match"] and rep["formula"]["value"] == order
    assert rep["counts"]["materialized"] == order


def test_induced_group_is_a_group():
    for spec in ("F2", "F3", "Z4"):
        R = build_ring(spec)
        G = induced_group_mt(R, 2)
        rows = unique_rows(G.perms)
        assert PermGroup.from_elements(rows).order == len(rows)
        ident = np.arange(rows.shape[1])
        assert any((r == ident).all() for r in rows)


def test_order_only_mode_for_larger_fields():
    for q, P in ((4, 24), (5, 120)):
        spec = "F2^2:t^2+t+1" if q == 4 else "F5"
        rep = order_formula(build_ring(spec), 2)
        assert rep["counts"] == {"P": P, "F1": q ** q, "FU1": (q - 1) ** q}
        assert rep["value"] == P * q ** q * (q - 1) ** q


def test_pi_composition_random():
    rng = np.random.default_rng(0)
    R = build_ring("F3")
    G = induced_group_mt(R, 2)
    members = {r.tobytes() for r in G.perms}
    for _ in range(10):
        g, f = random_mt(R, 2, 3, rng), random_mt(R, 2, 3, rng)
        pg = induced_perm(compose_tri(g, f))
        assert np.array_equal(pg, induced_perm(g)[induced_perm(f)])
        assert pg.tobytes() in members


def test_tr_vs_mt():
    rep = tr_vs_mt(build_ring("F2"))
    assert rep["equal"] and rep["counts"]["MT"] == rep["counts"]["TR"] == 8
    for spec in ("Z4", "F3"):
        rep = tr_vs_mt(build_ring(spec))
        assert rep["subset"] and not rep["equal"]
        assert rep["witnesses"] and all(w["in_MT"] and not w["in_TR"] for w in rep["witnesses"])
    assert induced_group_tr(build_ring("Z4"), 2).order < 8192


@pytest.mark.parametrize("spec,k", [("Z4", 1), ("F2[t]/t^2", 1), ("Z9", 1), ("Z4", 2)])
def test_unit_ratio(spec, k):
    rep = verify_ratio_theorems(build_ring(spec), k)
    assert rep["match"]


def test_ratio_examples():
    rep = verify_ratio_theorems(build_ring("Z4"), 1)
    assert rep["counts"] == {"F": 64, "FU": 16, "P": 8}
    assert rep["formula"]["observed_unit_ratio"] == "1/4"
    rep = verify_ratio_theorems(build_ring("F2[t]/t^2"), 1)
    assert Fraction(rep["formula"]["observed_unit_ratio"]) == Fraction(1, 4)
    with pytest.raises(RingError):
        verify_ratio_theorems(build_ring("Z6"), 1)


def test_jiang_orientation():
    for spec in ("Z4", "F2[t]/t^2"):
        rep = jiang_report(build_ring(spec))
        assert rep["P_over_F"] == "1/8" == rep["jiang_value"]
        assert rep["P_over_F_matches"] and not rep["printed_F_over_P_matches"]
    rep = jiang_report(build_ring("Z9"))
    assert Fraction(rep["P_over_F"]) == Fraction(1296, 19683) and rep["P_over_F_matches"]


def test_p_group_check():
    Z4 = build_ring("Z4")
    F = enumerate_poly_functions(Z4, 1)
    assert p_group_check(F) and p_group_check(enumerate_unit_valued(F))
    assert p_group_check(enumerate_poly_functions(build_ring("F3"), 1))
    assert not p_group_check(enumerate_unit_valued(enumerate_poly_functions(build_ring("F3"), 1)))
    assert p_group_check(induced_group_mt(Z4, 2))


def test_nounitrep():
    for spec in ("Z4", "Z9", "F2[t]/t^2"):
        assert nounitrep_check(build_ring(spec))
    with pytest.raises(RingError):
        nounitrep_check(build_ring("F3"))
