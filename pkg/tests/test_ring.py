import itertools

import numpy as np
import pytest

from triperm.errors import ParseError, RingError
from triperm.ring import build_ring, crt_split, parse_spec, ring_arith, unit_inverse

SMALL = ["Z2", "Z4", "Z6", "Z8", "Z9", "F3", "F5", "F2^2:t^2+t+1", "F2[t]/t^2", "F3[t]/t^2",
         "Z4[a1..a1]dual", "F2[a1..a2]dual", "Z4xF3", "F2xF2"]


def _brute_units(R):
    return sorted(a for a in range(R.size) if any(R.mul(a, b) == 1 for b in range(R.size)))


def _brute_nilpotents(R):
    return sorted(a for a in range(R.size) if R.power(a, R.size) == 0)


@pytest.mark.parametrize("spec", SMALL)
def test_ring_axioms_exhaustive(spec):
    R = build_ring(spec)
    assert R.size <= 64
    e = np.arange(R.size)
    a, b, c = np.meshgrid(e, e, e, indexing="ij")
    assert np.array_equal(R.add(a, b), R.add(b, a))
    assert np.array_equal(R.mul(a, b), R.mul(b, a))
    assert np.array_equal(R.add(R.add(a, b), c), R.add(a, R.add(b, c)))
    assert np.array_equal(R.mul(R.mul(a, b), c), R.mul(a, R.mul(b, c)))
    assert np.array_equal(R.mul(a, R.add(b, c)), R.add(R.mul(a, b), R.mul(a, c)))
    assert (R.add(e, 0) == e).all() and (R.mul(e, 1) == e).all()
    assert (R.add(e, R.neg(e)) == 0).all()


@pytest.mark.parametrize("spec", SMALL)
def test_classification_matches_definition(spec):
    R = build_ring(spec)
    assert R.units.tolist() == _brute_units(R)
    assert R.nilpotents.tolist() == _brute_nilpotents(R)
    if R.is_local:
        nonunits = [a for a in range(R.size) if not R.unit_mask[a]]
        assert R.maximal_ideal.tolist() == nonunits
        # M is an ideal and units are exactly the elements with nonzero residue
        for m, r in itertools.product(nonunits, range(R.size)):
            assert not R.unit_mask[R.mul(m, r)]
        zero_class = R.residue[0]
        assert all(R.unit_mask[a] == (R.residue[a] != zero_class) for a in range(R.size))
        q = R.residue_size
        assert q == R.size // len(nonunits)
        p = R.residue_characteristic
        while q % p == 0:
            q //= p
        assert q == 1


def test_z4_example():
    R = build_ring("Z4")
    assert R.size == 4
    assert R.units.tolist() == [1, 3]
    assert R.nilpotents.tolist() == [0, 2]
    assert R.is_local and R.maximal_ideal.tolist() == [0, 2] and R.residue_size == 2


def test_f2_and_product():
    F2 = build_ring("F2")
    assert F2.is_field and F2.residue_size == 2 and F2.units.tolist() == [1]
    P = build_ring("Z4xF3")
    assert P.size == 12 and not P.is_local


def test_arith_examples():
    Z4 = build_ring("Z4")
    two, three = Z4.elem(2), Z4.elem(3)
    assert (two + two).index == 0
    assert (three * three).index == 1
    assert ring_arith(two, three, "sub").index == 3
    F4 = build_ring("F2^2:t^2+t+1")
    t = F4.elem(F4.generator("t"))
    assert str(t * t) == "(1+t)"
    assert (t * t).index == F4.add(F4.generator("t"), 1)


def test_unit_inverse_examples():
    assert unit_inverse(build_ring("Z4").elem(3)).index == 3
    assert unit_inverse(build_ring("F3").elem(2)).index == 2
    assert unit_inverse(build_ring("Z9").elem(2)).index == 5
    with pytest.raises(RingError):
        unit_inverse(build_ring("Z4").elem(2))


def test_mixing_rings_rejected():
    with pytest.raises(RingError):
        build_ring("Z4").elem(1) + build_ring("F3").elem(1)


def test_crt_split():
    names = lambda R: [f.name for f in crt_split(R).factors]
    assert names(build_ring("Z12")) == ["Z4", "Z3"]
    assert names(build_ring("Z4")) == ["Z4"]
    assert names(build_ring("Z4xF3")) == ["Z4", "F3"]
    for spec in ["Z12", "Z4xF3", "Z36", "F2xZ9"]:
        R = build_ring(spec)
        s = crt_split(R)
        for a in range(R.size):
            assert s.join(s.split(a)) == a
        # the split map is a ring homomorphism
        for a, b in itertools.product(range(R.size), repeat=2):
            pa, pb = s.split(a), s.split(b)
            assert s.split(R.add(a, b)) == tuple(F.add(x, y) for F, x, y in zip(s.factors, pa, pb))
            assert s.split(R.mul(a, b)) == tuple(F.mul(x, y) for F, x, y in zip(s.factors, pa, pb))


@pytest.mark.parametrize("bad", ["Z1", "F4", "F2^2:t^2+1", "Z4[t]/t^1", "Q3", "", "Z4[a1..a0]dual"])
def test_bad_specs(bad):
    with pytest.raises((ParseError, RingError)):
        build_ring(bad)


def test_spec_roundtrip():
    for spec in SMALL:
        assert str(parse_spec(spec)) == spec
        assert build_ring(spec).name == spec


def test_dual_ring_structure():
    D = build_ring("F2[a1..a1]dual")
    assert D.size == 4 and D.is_local and D.residue_size == 2
    a = D.generator("a1")
    assert sorted(D.maximal_ideal.tolist()) == sorted([0, a])
    D2 = build_ring("F3[a1..a2]dual")
    a1, a2 = D2.generator("a1"), D2.generator("a2")
    assert D2.mul(a1, a2) == 0 and D2.mul(a1, a1) == 0
    # (r0 + r1 a)(s0 + s1 a) = r0 s0 + (r0 s1 + r1 s0) a
    D1 = build_ring("Z4[a1..a1]dual")
    for r, s in itertools.product(range(D1.size), repeat=2):
        (r0, r1), (s0, s1) = D1.coords(r), D1.coords(s)
        assert D1.coords(D1.mul(r, s)) == ((r0 * s0) % 4, (r0 * s1 + r1 * s0) % 4)


def test_size_cap():
    from triperm.errors import CapExceeded
    with pytest.raises(CapExceeded):
        build_ring("Z5000")
    assert build_ring("Z5000", cap=10000).size == 5000
