"""Polynomials over the dual numbers R_n = R[a1..an] (ai*aj = 0) in component form.

A polynomial ``g = g0 + sum gi*ai`` over R_n is stored as its components
``g0..gn`` in R[x].  Elements ``r0 + sum ri*ai`` correspond to points
``(r0, ..., rn)`` of R^(n+1), which is how the embedding into MT_(n+1)(R)
acts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _accel
from .errors import RingError
from .parse import parse_poly
from .poly import MultiPoly, func_values, is_permutation_poly, is_unit_valued
from .ring import Ring, build_ring
from .trimonoid import TriElem, induced_perm, make_tri


@dataclass(frozen=True)
class DualPoly:
    base: Ring
    n: int
    comps: tuple             # (g0, g1, ..., gn), one-variable polys over base

    def __post_init__(self):
        if len(self.comps) != self.n + 1:
            raise RingError(f"need {self.n + 1} components, got {len(self.comps)}")
        for c in self.comps:
            if c.ring is not self.base or c.nvars != 1:
                raise RingError("components must be one-variable polynomials over the base ring")

    def __str__(self) -> str:
        parts = [f"({self.comps[0]})"] + [f"({c})*a{i}" for i, c in enumerate(self.comps[1:], 1) if not c.is_zero()]
        return " + ".join(parts)

    def __matmul__(self, other: "DualPoly") -> "DualPoly":
        return dual_eval(self, other)


def make_dual(base: Ring, comps: Sequence["MultiPoly | str"]) -> DualPoly:
    polys = tuple(parse_poly(base, c, 1) if isinstance(c, str) else c for c in comps)
    return DualPoly(base, len(polys) - 1, polys)


def dual_ring(R: Ring, n: int, cap: int = 4096) -> Ring:
    return build_ring(f"{R.name}[a1..a{n}]dual", cap=cap)


def dual_x(R: Ring, n: int) -> DualPoly:
    zero = MultiPoly.zero(R, 1)
    return DualPoly(R, n, (MultiPoly.var(R, 1, 1),) + (zero,) * n)


def _same(f: DualPoly, g: DualPoly) -> None:
    if f.base is not g.base or f.n != g.n:
        raise RingError("dual polynomials over different rings")


def dual_eval(f: DualPoly, g: DualPoly) -> DualPoly:
    """f(g) = f0(g0) + sum (gi f0'(g0) + fi(g0)) ai."""
    _same(f, g)
    g0 = [g.comps[0]]
    d0 = f.comps[0].derivative(1).substitute(g0)
    comps = [f.comps[0].substitute(g0)]
    for fi, gi in zip(f.comps[1:], g.comps[1:]):
        comps.append(gi * d0 + fi.substitute(g0))
    return DualPoly(f.base, f.n, tuple(comps))


# ---------------------------------------------------------------------------
# conversion to and from polynomials over the dual Ring

def to_ring_poly(f: DualPoly, D: Ring | None = None) -> MultiPoly:
    D = D or dual_ring(f.base, f.n)
    coeffs: dict[int, list[int]] = {}
    for i, c in enumerate(f.comps):
        for k, v in c._terms.items():
            coeffs.setdefault(k, [0] * (f.n + 1))[i] = v
    return MultiPoly(D, 1, {k: D.from_coords(v) for k, v in coeffs.items()})


def from_ring_poly(p: MultiPoly, base: Ring, n: int) -> DualPoly:
    D = p.ring
    comps = [dict() for _ in range(n + 1)]
    for k, c in p._terms.items():
        for i, v in enumerate(D.coords(c)):
            if v:
                comps[i][k] = v
    return DualPoly(base, n, tuple(MultiPoly(base, 1, t) for t in comps))


def dual_eval_generic(f: DualPoly, g: DualPoly) -> DualPoly:
    """f(g) by substitution in R_n[x] (the cross-check route)."""
    _same(f, g)
    D = dual_ring(f.base, f.n)
    return from_ring_poly(to_ring_poly(f, D).substitute([to_ring_poly(g, D)]), f.base, f.n)


def element_to_point(D: Ring, r: int) -> tuple[int, ...]:
    return D.coords(r)


def point_to_element(D: Ring, point: Sequence[int]) -> int:
    return D.from_coords(point)


# ---------------------------------------------------------------------------
# criteria

def is_perm_dual(f: DualPoly) -> bool:
    """f permutes R_n iff f0 permutes R and f0' is unit-valued on R."""
    f0 = f.comps[0]
    return is_permutation_poly(f0) and is_unit_valued(f0.derivative(1))


def is_perm_dual_brute(f: DualPoly) -> bool:
    vals = func_values(to_ring_poly(f))
    return len(np.unique(vals)) == len(vals)


def equiv_signature(f: DualPoly) -> tuple:
    """Function data deciding equivalence on R_n: F1..Fn, F0 and F0'."""
    f0 = f.comps[0]
    parts = [func_values(c) for c in f.comps] + [func_values(f0.derivative(1))]
    return tuple(np.concatenate(parts).tolist())


def equiv_dual(f: DualPoly, g: DualPoly) -> bool:
    """fi == gi as functions on R for all i, and f0' == g0' on R."""
    _same(f, g)
    return equiv_signature(f) == equiv_signature(g)


def equiv_dual_brute(f: DualPoly, g: DualPoly) -> bool:
    _same(f, g)
    D = dual_ring(f.base, f.n)
    return bool(np.array_equal(func_values(to_ring_poly(f, D)), func_values(to_ring_poly(g, D))))


# ---------------------------------------------------------------------------
# embeddings

def embed_psi(f: DualPoly) -> TriElem:
    """(f0(x1), f1(x1) + x2 f0'(x1), ..., fn(x1) + x_(n+1) f0'(x1)), validated."""
    d0 = f.comps[0].derivative(1)
    levels = [(fi.extend(i), d0.extend(i)) for i, fi in enumerate(f.comps[1:], start=1)]
    return make_tri(f.comps[0], levels)


def embed_phi(f: DualPoly) -> np.ndarray:
    """The permutation of R^(n+1) induced by embed_psi(f)."""
    return induced_perm(embed_psi(f))


def dual_perm_as_points(f: DualPoly) -> np.ndarray:
    """The permutation of R_n induced by f, transported to point indices of R^(n+1)."""
    D = dual_ring(f.base, f.n)
    N = f.base.size
    vals = func_values(to_ring_poly(f, D))
    coords = D._coords
    weights = N ** np.arange(f.n, -1, -1)
    to_point = coords @ weights
    out = np.empty(D.size, dtype=np.int64)
    out[to_point] = to_point[vals]
    return out


def dual_to_json(f: DualPoly) -> dict:
    return {"base_ring": f.base.name, "n": f.n, "components": [str(c) for c in f.comps]}


def dual_from_json(data: "dict | str") -> DualPoly:
    if isinstance(data, str):
        data = json.loads(data)
    R = build_ring(data["base_ring"])
    f = make_dual(R, data["components"])
    if f.n != data["n"]:
        raise RingError("component count does not match n")
    return f


# ---------------------------------------------------------------------------
# bulk corpora (all component polynomials up to a degree)

def all_coeff_rows(R: Ring, max_deg: int) -> np.ndarray:
    """Every coefficient vector (lowest degree first) of a polynomial of degree <= max_deg."""
    N = R.size
    return np.indices((N,) * (max_deg + 1)).reshape(max_deg + 1, -1).T.copy()


def derivative_rows(R: Ring, rows: np.ndarray) -> np.ndarray:
    d = rows.shape[1] - 1
    if d == 0:
        return np.zeros_like(rows)
    scal = np.array([R.from_int(e) for e in range(1, d + 1)])
    out = np.zeros_like(rows)
    out[:, :d] = R.mul(scal[None, :], rows[:, 1:])
    return out


def dual_function_rows(D: Ring, rows0: np.ndarray, rows1: np.ndarray) -> np.ndarray:
    """Value tables on R_1 of f0 + f1*a1 for paired coefficient rows."""
    c0, c1 = D._coords[:, 0], D._coords[:, 1]
    lookup = np.full((D.size and int(c0.max()) + 1, int(c1.max()) + 1), -1, dtype=np.int64)
    lookup[c0, c1] = np.arange(D.size)
    coefs = lookup[rows0, rows1]
    add, mul = D._tables_for_kernels
    return _accel.horner_batch(coefs, np.arange(D.size), add, mul)


def phi_injectivity(R: Ring, max_deg: int = 4) -> dict:
    """|phi(P(R_1))| = |P(R_1)|: count distinct R_1-permutations and their images."""
    from ._rows import unique_rows
    from .funcspace import enumerate_poly_permutations
    D = dual_ring(R, 1)
    N = R.size
    add, mul = R._tables_for_kernels
    rows = all_coeff_rows(R, max_deg)
    xs = np.arange(N)
    F0 = _accel.horner_batch(rows, xs, add, mul)
    dF0 = _accel.horner_batch(derivative_rows(R, rows), xs, add, mul)
    perm0 = (np.sort(F0, axis=1) == xs).all(axis=1) & R.unit_mask[dF0].all(axis=1)
    i0 = np.flatnonzero(perm0)
    # pair every admissible f0 with every f1; functions of f1 only matter through F1
    F1u, f1_rep = np.unique(F0, axis=0, return_index=True)
    a, b = np.repeat(i0, len(F1u)), np.tile(np.arange(len(F1u)), len(i0))
    on_dual = dual_function_rows(D, rows[a], rows[f1_rep[b]])
    # phi image: (r0, r1) -> (F0(r0), F1(r0) + r1 F0'(r0)), point index r0*N + r1
    r0, r1 = np.divmod(np.arange(N * N), N)
    img = F0[a][:, r0] * N + R.add(F1u[b][:, r0], R.mul(r1[None, :], dF0[a][:, r0]))
    funcs = unique_rows(on_dual)
    images = unique_rows(img)
    pairs = unique_rows(np.hstack([on_dual, img]))
    closure = enumerate_poly_permutations(D)
    return {
        "ring": R.name,
        "P_R1_by_closure": len(closure),
        "P_R1_from_polys": len(funcs),
        "saturated": len(funcs) == len(closure),
        "phi_images": len(images),
        "well_defined": len(pairs) == len(funcs),
        "injective": len(pairs) == len(images) == len(funcs),
    }
