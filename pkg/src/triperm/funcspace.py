"""Polynomial function spaces over finite rings and the groups they induce.

Functions R^k -> R are value rows over the row-major grid of R^k (x1 most
significant).  The space of polynomial functions is the closure of the
constants and projections under pointwise + and *; it is computed as the
additive span of ``c * m`` over the (finite) multiplicative monoid of monomial
functions, which is exactly that closure and needs no degree bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._rows import RowSet, dedupe_rows, unique_rows
from .errors import CapExceeded, RingError
from .parse import parse_poly
from .poly import MultiPoly, func_values, lagrange_interpolate
from .ring import Ring

DOMAIN_CAP = 256
GROUP_CAP = 100_000
SPAN_CAP = 1 << 21            # rows held while building an additive span


def grid(R: Ring, k: int) -> np.ndarray:
    """(|R|^k, k) array of points in row-major order."""
    n = R.size
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((n,) * k, dtype=np.int64).reshape(k, -1).T.copy()


def _check_domain(R: Ring, k: int, cap: int) -> None:
    if R.size ** k > cap:
        raise CapExceeded(f"|{R.name}|^{k} = {R.size ** k} domain points exceed cap {cap}")


# ---------------------------------------------------------------------------
# closure enumeration

def monomial_functions(R: Ring, k: int, start: np.ndarray | None = None,
                       factors: np.ndarray | None = None) -> np.ndarray:
    """Closure of ``start`` under pointwise multiplication by ``factors``.

    Defaults: start = {1}, factors = the projections, giving every monomial
    function x^e (including the constant 1).
    """
    pts = grid(R, k)
    if factors is None:
        factors = pts.T.copy()
    if start is None:
        start = np.ones((1, len(pts)), dtype=np.int64)
    seen = RowSet(len(pts))
    frontier = start
    seen.add(start)
    while len(frontier):
        cand = R.mul(frontier[:, None, :], factors[None, :, :]).reshape(-1, len(pts))
        new = seen.add(cand)
        frontier = seen.rows[new]
    return seen.rows.copy()


def _span_guard(span: np.ndarray, multiples: np.ndarray, limit: int) -> None:
    if len(span) * len(multiples) > limit:
        raise CapExceeded(f"function space exceeds {limit} rows during enumeration")


def additive_span(R: Ring, gens: np.ndarray, width: int, base: np.ndarray | None = None,
                  limit: int = SPAN_CAP) -> np.ndarray:
    """Smallest additive subgroup containing base (default {0}) + <c*g : c in R, g in gens>."""
    span = np.zeros((1, width), dtype=np.int64) if base is None else dedupe_rows(base)
    scalars = np.arange(R.size, dtype=np.int64)
    for g in gens:
        multiples = dedupe_rows(R.mul(scalars[:, None], g[None, :]))
        _span_guard(span, multiples, limit)
        span = dedupe_rows(R.add(span[:, None, :], multiples[None, :, :]).reshape(-1, width))
    return unique_rows(span)


def _scaled_span(R: Ring, gens: np.ndarray, width: int, coeffs: np.ndarray) -> np.ndarray:
    """Additive span of {c*g : c in coeffs, g in gens} (coeffs an additive subgroup)."""
    span = np.zeros((1, width), dtype=np.int64)
    for g in gens:
        multiples = dedupe_rows(R.mul(np.asarray(coeffs)[:, None], g[None, :]))
        _span_guard(span, multiples, SPAN_CAP)
        span = dedupe_rows(R.add(span[:, None, :], multiples[None, :, :]).reshape(-1, width))
    return span


@dataclass
class FuncSpace:
    ring: Ring
    arity: int
    tables: np.ndarray            # sorted distinct rows
    _set: RowSet | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def index_of(self, rows) -> np.ndarray:
        if self._set is None:
            self._set = RowSet(self.tables.shape[1], max(len(self.tables), 1))
            self._set.add(self.tables)
        return self._set.lookup(rows)

    def __contains__(self, row) -> bool:
        return bool(self.index_of(np.asarray(row))[0] >= 0)

    def subset(self, mask) -> "FuncSpace":
        return FuncSpace(self.ring, self.arity, self.tables[mask])


def enumerate_poly_functions(R: Ring, k: int, cap: int = DOMAIN_CAP, seed: int | None = None) -> FuncSpace:
    """All polynomial functions R^k -> R.  ``seed`` shuffles the worklist order."""
    _check_domain(R, k, cap)
    monos = monomial_functions(R, k)
    if seed is not None:
        monos = monos[np.random.default_rng(seed).permutation(len(monos))]
    return FuncSpace(R, k, additive_span(R, monos, R.size ** k))


def naive_closure(R: Ring, k: int, cap: int = DOMAIN_CAP) -> np.ndarray:
    """Fixed point of {constants, projections} under pointwise + and * (slow oracle)."""
    _check_domain(R, k, cap)
    pts = grid(R, k)
    consts = np.repeat(np.arange(R.size, dtype=np.int64)[:, None], len(pts), axis=1)
    seen = RowSet(len(pts))
    seen.add(consts)
    seen.add(pts.T)
    frontier = seen.rows.copy()
    while len(frontier):
        allrows = seen.rows.copy()
        if 2 * len(frontier) * len(allrows) > SPAN_CAP:
            raise CapExceeded(f"naive closure exceeds {SPAN_CAP} candidate rows")
        cand = np.concatenate([
            R.add(frontier[:, None, :], allrows[None, :, :]).reshape(-1, len(pts)),
            R.mul(frontier[:, None, :], allrows[None, :, :]).reshape(-1, len(pts)),
        ])
        new = seen.add(cand)
        frontier = seen.rows[new].copy()
    return unique_rows(seen.rows)


def enumerate_unit_valued(space: FuncSpace) -> FuncSpace:
    return space.subset(space.ring.unit_mask[space.tables].all(axis=1))


def enumerate_poly_permutations(R: Ring, cap: int = DOMAIN_CAP, space: FuncSpace | None = None) -> FuncSpace:
    space = space or enumerate_poly_functions(R, 1, cap)
    srt = np.sort(space.tables, axis=1)
    return space.subset((srt == np.arange(R.size)).all(axis=1))


def enumerate_unit_induced(R: Ring, k: int, cap: int = DOMAIN_CAP) -> FuncSpace:
    """Functions of unit polynomials: unit constant + span of nilpotent * (non-constant monomial)."""
    _check_domain(R, k, cap)
    pts = grid(R, k)
    width = len(pts)
    monos = monomial_functions(R, k, start=pts.T.copy())
    nil = _scaled_span(R, monos, width, R.nilpotents)
    consts = np.repeat(R.units[:, None], width, axis=1)
    rows = R.add(consts[:, None, :], nil[None, :, :]).reshape(-1, width)
    return FuncSpace(R, k, unique_rows(rows))


def enumerate_automorphism_induced(R: Ring, cap: int = DOMAIN_CAP) -> FuncSpace:
    """Functions of R-automorphisms a0 + a1 x + sum(nilpotent * x^e, e >= 2)."""
    _check_domain(R, 1, cap)
    x = np.arange(R.size, dtype=np.int64)
    sq = R.mul(x, x)[None, :]
    high = monomial_functions(R, 1, start=sq, factors=x[None, :])
    nil = _scaled_span(R, high, R.size, R.nilpotents)
    affine = R.add(R.mul(R.units[None, :, None], x[None, None, :]),
                   np.arange(R.size)[:, None, None]).reshape(-1, R.size)
    rows = R.add(unique_rows(affine)[:, None, :], nil[None, :, :]).reshape(-1, R.size)
    return FuncSpace(R, 1, unique_rows(rows))


# ---------------------------------------------------------------------------
# induced groups on R^n

@dataclass
class InducedGroup:
    ring: Ring
    n: int
    order: int
    perms: np.ndarray | None               # (order, |R|^n) or None in order-only mode
    components: list                       # [P-rows, (F-rows, U-rows) per level]

    def as_group(self):
        from .structure import PermGroup
        if self.perms is None:
            raise CapExceeded("group was not materialized")
        return PermGroup.from_elements(self.perms)


def assemble(R: Ring, n: int, first: np.ndarray, levels: Sequence[tuple[np.ndarray, np.ndarray]],
             combos: np.ndarray) -> np.ndarray:
    """Permutation tables for component index tuples.

    ``combos[m] = (i1, f2, u2, ..., fn, un)`` indexes ``first`` and the
    per-level (F, U) row arrays; level i rows are functions on R^(i-1).
    """
    N = R.size
    pts = grid(R, n)
    out = first[combos[:, 0]][:, pts[:, 0]]
    for i in range(2, n + 1):
        F, U = levels[i - 2]
        prefix = np.zeros(len(pts), dtype=np.int64)
        for j in range(i - 1):
            prefix = prefix * N + pts[:, j]
        fv = F[combos[:, 2 * i - 3]][:, prefix]
        uv = U[combos[:, 2 * i - 2]][:, prefix]
        comp = R.add(fv, R.mul(pts[None, :, i - 1], uv))
        out = out * N + comp
    return out


def _product_combos(sizes: Sequence[int]) -> np.ndarray:
    return np.indices(tuple(sizes), dtype=np.int64).reshape(len(sizes), -1).T


def _build_group(R: Ring, n: int, first: np.ndarray, levels, cap: int) -> InducedGroup:
    sizes = [len(first)]
    for F, U in levels:
        sizes += [len(F), len(U)]
    order = math.prod(sizes)
    comps = [first] + list(levels)
    if order > cap:
        return InducedGroup(R, n, order, None, comps)
    return InducedGroup(R, n, order, assemble(R, n, first, levels, _product_combos(sizes)), comps)


def induced_group_mt(R: Ring, n: int, cap: int = GROUP_CAP, domain_cap: int = DOMAIN_CAP) -> InducedGroup:
    """pi_n(MT_n) from component tuples F1 in P(R), (F_i, U_i) in F(R^(i-1)) x FU(R^(i-1))."""
    f1 = enumerate_poly_functions(R, 1, domain_cap)
    first = enumerate_poly_permutations(R, space=f1).tables
    levels = []
    for i in range(2, n + 1):
        F = f1 if i == 2 else enumerate_poly_functions(R, i - 1, domain_cap)
        levels.append((F.tables, enumerate_unit_valued(F).tables))
    return _build_group(R, n, first, levels, cap)


def induced_group_tr(R: Ring, n: int, cap: int = GROUP_CAP, domain_cap: int = DOMAIN_CAP) -> InducedGroup:
    """pi_n(TR_n): automorphism-induced F1 and unit-polynomial-induced U_i."""
    first = enumerate_automorphism_induced(R, domain_cap).tables
    levels = []
    for i in range(2, n + 1):
        F = enumerate_poly_functions(R, i - 1, domain_cap)
        levels.append((F.tables, enumerate_unit_induced(R, i - 1, domain_cap).tables))
    return _build_group(R, n, first, levels, cap)


def order_formula(R: Ring, n: int, domain_cap: int = DOMAIN_CAP) -> dict:
    """|P(R)| * prod_{i=1}^{n-1} |F(R^i)| |FU(R^i)| together with its factors."""
    f1 = enumerate_poly_functions(R, 1, domain_cap)
    counts = {"P": len(enumerate_poly_permutations(R, space=f1))}
    value = counts["P"]
    for i in range(1, n):
        F = f1 if i == 1 else enumerate_poly_functions(R, i, domain_cap)
        counts[f"F{i}"] = len(F)
        counts[f"FU{i}"] = len(enumerate_unit_valued(F))
        value *= counts[f"F{i}"] * counts[f"FU{i}"]
    return {"value": value, "counts": counts}


def verify_order_formula(R: Ring, n: int, cap: int = GROUP_CAP) -> dict:
    formula = order_formula(R, n)
    group = induced_group_mt(R, n, cap)
    counts = dict(formula["counts"])
    if group.perms is not None:
        distinct = len(unique_rows(group.perms))
        bijective = bool((np.sort(group.perms, axis=1) == np.arange(group.perms.shape[1])).all())
        closed = group.as_group().order == distinct if distinct else False
        counts.update(materialized=distinct, all_bijective=bijective, closed=closed)
        match = distinct == formula["value"] and bijective and closed
    else:
        counts["materialized"] = None
        match = group.order == formula["value"]
    expr = "|P| * " + " * ".join(f"|F(R^{i})||FU(R^{i})|" for i in range(1, n))
    return {"ring": R.name, "n_or_k": n, "counts": counts,
            "formula": {"expression": expr, "value": formula["value"]}, "match": bool(match)}


# ---------------------------------------------------------------------------
# counting theorems

def _require_local(R: Ring) -> int:
    if not R.is_local:
        raise RingError(f"{R.name} is not local")
    return R.residue_size


def verify_ratio_theorems(R: Ring, k: int = 1, cap: int = DOMAIN_CAP) -> dict:
    q = _require_local(R)
    F = enumerate_poly_functions(R, k, cap)
    FU = enumerate_unit_valued(F)
    ratio = Fraction(len(FU), len(F))
    predicted = Fraction((q - 1) ** (q ** k), q ** (q ** k))
    counts = {"F": len(F), "FU": len(FU)}
    formula = {"unit_ratio": str(predicted), "observed_unit_ratio": str(ratio)}
    match = ratio == predicted
    if k == 1 and not R.is_field:
        formula.update(jiang_report(R, F))
        counts["P"] = formula.pop("P")
    return {"ring": R.name, "n_or_k": k, "counts": counts, "formula": formula, "match": bool(match)}


def jiang_value(q: int) -> Fraction:
    return Fraction(math.factorial(q) * (q - 1) ** q, q ** (2 * q))


def jiang_report(R: Ring, space: FuncSpace | None = None) -> dict:
    """Both orientations of the permutation/function ratio against brute-force counts."""
    q = _require_local(R)
    space = space or enumerate_poly_functions(R, 1)
    nP = len(enumerate_poly_permutations(R, space=space))
    nF = len(space)
    value = jiang_value(q)
    return {
        "P": nP,
        "jiang_value": str(value),
        "P_over_F": str(Fraction(nP, nF)),
        "F_over_P": str(Fraction(nF, nP)),
        "P_over_F_matches": Fraction(nP, nF) == value,
        "printed_F_over_P_matches": Fraction(nF, nP) == value,
        "flag": "printed orientation |F|/|P| does not match; the value equals |P|/|F|"
        if Fraction(nF, nP) != value else "printed orientation matches",
    }


def is_prime_power_of(count: int, p: int) -> bool:
    if count < 1:
        return False
    while count % p == 0:
        count //= p
    return count == 1


def p_group_check(obj, p: int | None = None) -> bool:
    """Is the cardinality of a FuncSpace / InducedGroup / int a power of p?"""
    if isinstance(obj, int):
        size = obj
    elif isinstance(obj, InducedGroup):
        size = obj.order
    else:
        size = len(obj)
    if p is None:
        R = obj.ring
        _require_local(R)
        p = R.residue_characteristic
    return is_prime_power_of(size, p)


def jiang_witness_poly(R: Ring) -> MultiPoly:
    """(x^q - x) + 1."""
    q = _require_local(R)
    return parse_poly(R, f"x1^{q} - x1 + 1", 1)


def nounitrep_check(R: Ring, cap: int = DOMAIN_CAP) -> bool:
    """(x^q - x) + 1 induces no function of a unit polynomial."""
    _require_local(R)
    if R.is_field:
        raise RingError(f"{R.name} is a field")
    row = func_values(jiang_witness_poly(R))
    return row not in enumerate_unit_induced(R, 1, cap)


def lagrange_unit_witness(R: Ring) -> MultiPoly:
    """Non-constant unit-valued polynomial over a field with q > 2: F(a)=a at a=2, else 1."""
    if not R.is_field or R.size < 3:
        raise RingError("needs a field with more than two elements")
    a = 2
    vals = [a if b == a else 1 for b in range(R.size)]
    return lagrange_interpolate(vals, R)


def tr_vs_mt(R: Ring, n: int = 2, cap: int = GROUP_CAP) -> dict:
    """Compare pi_n(TR_n) with pi_n(MT_n); report witnesses of strictness."""
    mt = induced_group_mt(R, n, cap)
    tr = induced_group_tr(R, n, cap)
    report = {"ring": R.name, "n_or_k": n, "counts": {"MT": mt.order, "TR": tr.order}}
    if mt.perms is None or tr.perms is None:
        report["equal"] = mt.order == tr.order
        report["subset"] = None
        return report
    mset = RowSet(mt.perms.shape[1], len(mt.perms))
    mset.add(mt.perms)
    tr_rows = unique_rows(tr.perms)
    subset = bool((mset.lookup(tr_rows) >= 0).all())
    report["counts"]["TR"] = len(tr_rows)
    report["subset"] = subset
    report["equal"] = subset and len(tr_rows) == len(unique_rows(mt.perms))
    tset = RowSet(tr_rows.shape[1], len(tr_rows))
    tset.add(tr_rows)
    witnesses = []
    if R.is_local and not R.is_field:
        witnesses.append(("(2:(x^q-x)+1;0)", jiang_witness_poly(R)))
    elif R.is_field and R.size > 2:
        witnesses.append(("(2:lagrange;0)", lagrange_unit_witness(R)))
    report["witnesses"] = []
    for label, u in witnesses:
        from .trimonoid import identity_tri, induced_perm, make_tri
        base = identity_tri(R, n)
        levels = list(base.levels)
        levels[0] = (MultiPoly.zero(R, 1), u)
        perm = induced_perm(make_tri(base.f1, levels))
        report["witnesses"].append({
            "element": label, "u": str(u),
            "in_MT": bool(mset.lookup(perm)[0] >= 0),
            "in_TR": bool(tset.lookup(perm)[0] >= 0),
        })
    return report
