"""Triangular vector-permutation polynomials in factored form.

An element of MT_n is stored as ``(1:f1) (2:u2;f2) ... (n:un;fn)``, i.e. the
vector-polynomial ``(f1(x1), f2 + x2*u2, ..., fn + xn*un)`` where level i
polynomials ``fi, ui`` use only ``x1..x(i-1)``.  Composition follows
``(g o f)_i = g_i(f_1, ..., f_n)``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MembershipViolation, NotAUnit, NotTriangular, RingError
from .parse import parse_poly
from .poly import (
    MultiPoly,
    automorphism_inverse,
    func_values,
    is_automorphism,
    is_permutation_poly,
    is_unit_poly,
    is_unit_valued,
    random_poly,
    unit_poly_inverse,
    SHIFT,
    MASK,
)
from .ring import Elem, Ring, build_ring


@dataclass(frozen=True)
class TriElem:
    ring: Ring
    n: int
    f1: MultiPoly
    levels: tuple            # ((f2, u2), ..., (fn, un)); level i in i-1 variables

    def level(self, i: int) -> tuple[MultiPoly, MultiPoly]:
        """(f_i, u_i) for 2 <= i <= n."""
        return self.levels[i - 2]

    def __matmul__(self, other: "TriElem") -> "TriElem":
        return compose_tri(self, other)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in to_vecpoly(self)) + ")"


def _trusted(ring: Ring, f1: MultiPoly, levels) -> TriElem:
    return TriElem(ring, len(levels) + 1, f1, tuple(levels))


def make_tri(f1: MultiPoly, levels: Sequence[tuple[MultiPoly, MultiPoly]] = (),
             validate: bool = True) -> TriElem:
    """Build (1:f1) prod (i:u_i;f_i); ``levels`` lists (f_i, u_i) for i = 2..n."""
    R = f1.ring
    if f1.nvars != 1:
        raise RingError("f1 must be a polynomial in x1")
    levels = tuple((f, u) for f, u in levels)
    for i, (f, u) in enumerate(levels, start=2):
        for p in (f, u):
            if p.ring is not R:
                raise RingError(f"level {i} is over {p.ring.name}, expected {R.name}")
            if p.nvars != i - 1:
                raise RingError(f"level {i} polynomials must have {i - 1} variables, got {p.nvars}")
    if validate:
        if not is_permutation_poly(f1):
            raise MembershipViolation(1, f"f1 = {f1} is not a permutation polynomial of {R.name}")
        for i, (f, u) in enumerate(levels, start=2):
            if not is_unit_valued(u):
                raise MembershipViolation(i, f"u{i} = {u} is not unit-valued on {R.name}")
    return _trusted(R, f1, levels)


def identity_tri(R: Ring, n: int) -> TriElem:
    x1 = MultiPoly.var(R, 1, 1)
    return _trusted(R, x1, [(MultiPoly.zero(R, i - 1), MultiPoly.const(R, i - 1, 1)) for i in range(2, n + 1)])


def first_factor(f1: MultiPoly, n: int) -> TriElem:
    """(1:f1) = (f1, x2, ..., xn)."""
    t = identity_tri(f1.ring, n)
    return make_tri(f1, t.levels)


def level_factor(R: Ring, n: int, i: int, u: MultiPoly, f: MultiPoly) -> TriElem:
    """(i:u;f) = (x1, ..., f + xi*u, ..., xn)."""
    t = identity_tri(R, n)
    levels = list(t.levels)
    levels[i - 2] = (f, u)
    return make_tri(t.f1, levels)


# ---------------------------------------------------------------------------
# expanded form

def expanded_components(t: TriElem) -> list[MultiPoly]:
    """[F1, ..., Fn] with F_i = f_i + x_i u_i in exactly i variables."""
    R = t.ring
    out = [t.f1]
    for i, (f, u) in enumerate(t.levels, start=2):
        out.append(f.extend(i) + MultiPoly.var(R, i, i) * u.extend(i))
    return out


def to_vecpoly(t: TriElem) -> list[MultiPoly]:
    return [c.extend(t.n) for c in expanded_components(t)]


def from_vecpoly(comps: Sequence[MultiPoly], validate: bool = True) -> TriElem:
    n = len(comps)
    if n == 0:
        raise NotTriangular("empty vector-polynomial")
    R = comps[0].ring
    for c in comps:
        if c.ring is not R or c.nvars != n:
            raise NotTriangular(f"components must be polynomials in {n} variables over {R.name}")
    levels = []
    for i, comp in enumerate(comps, start=1):
        if any(j > i for j in comp.uses()):
            raise NotTriangular(f"component {i} involves a variable beyond x{i}")
        sh = SHIFT * (i - 1)
        f_terms, u_terms = {}, {}
        for k, c in comp._terms.items():
            e = (k >> sh) & MASK
            if i == 1 or e == 0:
                f_terms[k] = c
            elif e == 1:
                u_terms[k - (1 << sh)] = c
            else:
                raise NotTriangular(f"component {i} is not affine in x{i}")
        if i == 1:
            f1 = MultiPoly(R, 1, f_terms)
        else:
            levels.append((MultiPoly(R, i - 1, f_terms), MultiPoly(R, i - 1, u_terms)))
    return make_tri(f1, levels, validate=validate)


# ---------------------------------------------------------------------------
# monoid structure

def _check_pair(a: TriElem, b: TriElem) -> None:
    if a.ring is not b.ring:
        raise RingError(f"cannot mix {a.ring.name} and {b.ring.name}")
    if a.n != b.n:
        raise RingError(f"dimension mismatch: {a.n} vs {b.n}")


def compose_tri(g: TriElem, f: TriElem) -> TriElem:
    """g o f in factored form:
    (1: g1(f1)) prod (i: w_i(v_i) u_i ; g_i(v_i) + w_i(v_i) f_i),
    with v_i the first i-1 expanded components of f and (g_i, w_i) the levels of g."""
    _check_pair(g, f)
    comps = expanded_components(f)
    levels = []
    for i in range(2, g.n + 1):
        gi, wi = g.level(i)
        fi, ui = f.level(i)
        v = [comps[j].extend(i - 1) for j in range(i - 1)]
        w_v = wi.substitute(v)
        levels.append((gi.substitute(v) + w_v * fi, w_v * ui))
    return _trusted(g.ring, g.f1.substitute([f.f1]), levels)


def is_unit_tri(t: TriElem) -> bool:
    return is_automorphism(t.f1) and all(is_unit_poly(u) for _, u in t.levels)


def invert_tri(t: TriElem) -> TriElem:
    """(prod_{i=n..2} (i: u_i^-1; -u_i^-1 f_i)) (1: f1^-1)."""
    if not is_unit_tri(t):
        raise NotAUnit(f"{t} is not a unit of MT_{t.n}")
    R, n = t.ring, t.n
    acc = identity_tri(R, n)
    for i in range(n, 1, -1):
        f, u = t.level(i)
        uinv = unit_poly_inverse(u)
        acc = compose_tri(acc, _trusted_level(R, n, i, uinv, -(uinv * f)))
    first = _trusted(R, automorphism_inverse(t.f1), identity_tri(R, n).levels)
    return compose_tri(acc, first)


def _trusted_level(R: Ring, n: int, i: int, u: MultiPoly, f: MultiPoly) -> TriElem:
    t = identity_tri(R, n)
    levels = list(t.levels)
    levels[i - 2] = (f, u)
    return _trusted(R, t.f1, levels)


# ---------------------------------------------------------------------------
# pointwise behaviour

def _point(R: Ring, point) -> list[int]:
    out = []
    for a in point:
        if isinstance(a, Elem):
            if a.ring is not R:
                raise RingError(f"cannot mix {a.ring.name} and {R.name}")
            out.append(a.index)
        else:
            out.append(int(a))
    return out


def apply_tri(t: TriElem, point: Sequence) -> tuple[int, ...]:
    R = t.ring
    a = _point(R, point)
    if len(a) != t.n:
        raise RingError(f"expected {t.n} coordinates, got {len(a)}")
    out = [t.f1.evaluate(a[:1])]
    for i, (f, u) in enumerate(t.levels, start=2):
        prev = a[: i - 1]
        out.append(R.add(f.evaluate(prev), R.mul(a[i - 1], u.evaluate(prev))))
    return tuple(out)


def solve_preimage(t: TriElem, target: Sequence) -> tuple[int, ...]:
    """The unique a with apply_tri(t, a) = target, by back-substitution."""
    R = t.ring
    c = _point(R, target)
    if len(c) != t.n:
        raise RingError(f"expected {t.n} coordinates, got {len(c)}")
    table = func_values(t.f1)
    hits = np.flatnonzero(table == c[0])
    if len(hits) != 1:
        raise MembershipViolation(1, "f1 does not induce a permutation")
    a = [int(hits[0])]
    for i, (f, u) in enumerate(t.levels, start=2):
        prev = a[: i - 1]
        a.append(R.mul(R.sub(c[i - 1], f.evaluate(prev)), R.inverse(u.evaluate(prev))))
    return tuple(a)


def induced_perm(t: TriElem) -> np.ndarray:
    """pi_n(t) as a permutation of point indices of R^n (row-major, x1 most significant)."""
    R, n = t.ring, t.n
    N = R.size
    img = np.zeros(N ** n, dtype=np.int64)
    for j, comp in enumerate(expanded_components(t), start=1):
        vals = func_values(comp)                        # over R^j
        vals = np.repeat(vals, N ** (n - j))            # ignore trailing coords
        img = img * N + vals
    return img


def equiv_tri(s: TriElem, t: TriElem) -> bool:
    """Componentwise function equality of f1, f_i and u_i."""
    _check_pair(s, t)

    def same(p, q):
        return np.array_equal(func_values(p), func_values(q))

    if not same(s.f1, t.f1):
        return False
    return all(same(fs, ft) and same(us, ut) for (fs, us), (ft, ut) in zip(s.levels, t.levels))


def embed_tri(t: TriElem, k: int) -> TriElem:
    if k <= t.n:
        raise RingError(f"embedding dimension {k} must exceed {t.n}")
    R = t.ring
    extra = [(MultiPoly.zero(R, i - 1), MultiPoly.const(R, i - 1, 1)) for i in range(t.n + 1, k + 1)]
    return _trusted(R, t.f1, list(t.levels) + extra)


# ---------------------------------------------------------------------------
# serialization

def tri_to_json(t: TriElem) -> dict:
    return {
        "ring": t.ring.name,
        "n": t.n,
        "f1": str(t.f1),
        "levels": [{"f": str(f), "u": str(u)} for f, u in t.levels],
    }


def tri_from_json(data: "dict | str", validate: bool = True) -> TriElem:
    if isinstance(data, str):
        data = json.loads(data)
    R = build_ring(data["ring"])
    levels = [(parse_poly(R, lv["f"], i), parse_poly(R, lv["u"], i))
              for i, lv in enumerate(data["levels"], start=1)]
    if len(levels) + 1 != data["n"]:
        raise RingError("level count does not match n")
    return make_tri(parse_poly(R, data["f1"], 1), levels, validate=validate)


def vec_to_json(comps: Sequence[MultiPoly]) -> dict:
    return {"ring": comps[0].ring.name, "n": len(comps), "components": [str(c) for c in comps]}


def vec_from_json(data: "dict | str") -> list[MultiPoly]:
    if isinstance(data, str):
        data = json.loads(data)
    R = build_ring(data["ring"])
    return [parse_poly(R, c, data["n"]) for c in data["components"]]


# ---------------------------------------------------------------------------
# random elements (tests, benchmarks, acceptance bundles)

def random_automorphism(R: Ring, max_deg: int, rng) -> MultiPoly:
    a0 = int(rng.integers(R.size))
    a1 = int(R.units[rng.integers(len(R.units))])
    high = random_poly(R, 1, max_deg, rng, pool=R.nilpotents, min_deg=2)
    return high + MultiPoly.univariate(R, [a0, a1])


def random_unit_poly(R: Ring, nvars: int, max_deg: int, rng) -> MultiPoly:
    a0 = int(R.units[rng.integers(len(R.units))])
    nil = random_poly(R, nvars, max_deg, rng, pool=R.nilpotents, min_deg=1)
    return nil + MultiPoly.const(R, nvars, a0)


def random_perm_poly(R: Ring, max_deg: int, rng, tries: int = 200) -> MultiPoly:
    for _ in range(tries):
        f = random_poly(R, 1, max_deg, rng)
        if is_permutation_poly(f):
            return f
    return random_automorphism(R, max_deg, rng)


def random_unit_valued(R: Ring, nvars: int, max_deg: int, rng, tries: int = 200) -> MultiPoly:
    for _ in range(tries):
        u = random_poly(R, nvars, max_deg, rng)
        if is_unit_valued(u):
            return u
    return random_unit_poly(R, nvars, max_deg, rng)


def random_tr(R: Ring, n: int, max_deg: int, rng) -> TriElem:
    """Random unit of MT_n (automorphism f1, unit polynomials u_i)."""
    levels = [(random_poly(R, i - 1, max_deg, rng), random_unit_poly(R, i - 1, max_deg, rng))
              for i in range(2, n + 1)]
    return _trusted(R, random_automorphism(R, max_deg, rng), levels)


def random_mt(R: Ring, n: int, max_deg: int, rng) -> TriElem:
    """Random element of MT_n, generally not a unit."""
    levels = [(random_poly(R, i - 1, max_deg, rng), random_unit_valued(R, i - 1, max_deg, rng))
              for i in range(2, n + 1)]
    return make_tri(random_perm_poly(R, max_deg, rng), levels)
