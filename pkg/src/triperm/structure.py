"""Finite monoids and permutation groups: semidirect products, unit groups,
normality, derived and lower central series, and the decomposition checks.

Permutations are index arrays; ``a o b`` is ``a[b]`` (apply b first).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel
from ._rows import RowSet, unique_rows
from .errors import ActionError, CapExceeded, RingError
from .funcspace import (
    FuncSpace,
    assemble,
    enumerate_poly_functions,
    enumerate_poly_permutations,
    enumerate_unit_valued,
    induced_group_mt,
    GROUP_CAP,
)
from .ring import Ring

ASSOC_EXHAUSTIVE = 512


# ---------------------------------------------------------------------------
# permutation groups

def perm_inverse(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    inv[p] = np.arange(len(p))
    return inv


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a^-1 b^-1 a b."""
    ai, bi = perm_inverse(a), perm_inverse(b)
    return ai[bi[a[b]]]


def _closure(gens: np.ndarray, degree: int, cap: int, start: RowSet | None = None) -> RowSet:
    seen = start if start is not None else RowSet(degree)   # extended in place
    if start is None:
        seen.add(np.arange(degree)[None, :])
    frontier = seen.rows.copy()
    while len(frontier):
        cand = frontier[:, gens].transpose(1, 0, 2).reshape(-1, degree)
        new = seen.add(cand)
        if len(seen) > cap:
            raise CapExceeded(f"group closure exceeds {cap} elements")
        frontier = seen.rows[new].copy()
    return seen


class PermGroup:
    """A permutation group held as its full element set plus generators."""

    def __init__(self, elements: RowSet, gens: np.ndarray):
        self._set = elements
        self.gens = np.asarray(gens, dtype=np.int64).reshape(-1, elements.width)

    @classmethod
    def from_generators(cls, gens, degree: int | None = None, cap: int = GROUP_CAP) -> "PermGroup":
        gens = np.asarray(gens, dtype=np.int64)
        if degree is None:
            degree = gens.shape[-1]
        gens = gens.reshape(-1, degree)
        return cls(_closure(gens, degree, cap), gens)

    @classmethod
    def from_elements(cls, perms, cap: int = GROUP_CAP) -> "PermGroup":
        """Group generated by a set that must itself be closed (verified)."""
        perms = unique_rows(perms)
        degree = perms.shape[1]
        target = RowSet(degree, len(perms))
        target.add(perms)
        gens = np.zeros((0, degree), dtype=np.int64)
        cur = _closure(gens, degree, cap)
        while True:
            missing = np.flatnonzero(cur.lookup(perms) < 0)
            if not len(missing):
                break
            gens = np.vstack([gens, perms[missing[0]]])
            try:
                cur = _closure(gens, degree, max(len(perms), 1), start=cur)
            except CapExceeded:
                raise ValueError("element set is not closed under composition") from None
        if len(cur) != len(perms) or (target.lookup(cur.rows) < 0).any():
            raise ValueError("element set is not closed under composition")
        return cls(cur, gens)

    @property
    def elements(self) -> np.ndarray:
        return self._set.rows

    @property
    def order(self) -> int:
        return len(self._set)

    @property
    def degree(self) -> int:
        return self._set.width

    def __len__(self) -> int:
        return self.order

    def contains(self, perms) -> np.ndarray:
        return self._set.lookup(perms) >= 0

    def __contains__(self, perm) -> bool:
        return bool(self.contains(np.asarray(perm))[0])

    def is_abelian(self) -> bool:
        return self.abelian_witness() is None

    def abelian_witness(self):
        g = self.gens
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                if not np.array_equal(g[i][g[j]], g[j][g[i]]):
                    return g[i], g[j]
        return None

    def subgroup(self, gens) -> "PermGroup":
        return PermGroup.from_generators(gens, self.degree)


def reduce_generators(gens: np.ndarray, degree: int, cap: int = GROUP_CAP) -> PermGroup:
    """Greedy generating set: keep a candidate only if it enlarges the group so far."""
    gens = np.asarray(gens, dtype=np.int64).reshape(-1, degree)
    kept = np.zeros((0, degree), dtype=np.int64)
    cur = _closure(kept, degree, cap)
    for g in gens:
        if cur.lookup(g)[0] < 0:
            kept = np.vstack([kept, g])
            cur = _closure(kept, degree, cap, start=cur)
    return PermGroup(cur, kept)


def normal_closure(gens: np.ndarray, G: PermGroup) -> PermGroup:
    """Smallest normal subgroup of G containing gens."""
    degree = G.degree
    H = reduce_generators(gens, degree)
    while True:
        added = False
        for g in G.gens:
            if not len(H.gens):
                break
            gi = perm_inverse(g)
            conj = gi[H.gens[:, g]]                 # g^-1 h g
            bad = np.flatnonzero(~H.contains(conj))
            if len(bad):
                hgens = np.vstack([H.gens, conj[bad[0]]])
                H = PermGroup(_closure(hgens, degree, GROUP_CAP, start=H._set), hgens)
                added = True
                break
        if not added:
            return H


def commutator_subgroup(A: PermGroup, B: PermGroup, ambient: PermGroup) -> PermGroup:
    """[A, B] for A, B normal in ``ambient`` (normal closure of generator commutators)."""
    comms = [commutator(a, b) for a in A.gens for b in B.gens]
    if not comms:
        comms = [np.arange(ambient.degree)]
    return normal_closure(np.array(comms), ambient)


def derived_series(G: PermGroup) -> list[PermGroup]:
    series = [G]
    while True:
        cur = series[-1]
        nxt = commutator_subgroup(cur, cur, cur)
        if nxt.order == cur.order:
            return series
        series.append(nxt)


def lower_central_series(G: PermGroup) -> list[PermGroup]:
    series = [G]
    while True:
        cur = series[-1]
        nxt = commutator_subgroup(cur, G, G)
        if nxt.order == cur.order:
            return series
        series.append(nxt)


def is_solvable(G: PermGroup) -> bool:
    return derived_series(G)[-1].order == 1


def is_nilpotent(G: PermGroup) -> bool:
    return lower_central_series(G)[-1].order == 1


def is_abelian(G: PermGroup) -> bool:
    return G.is_abelian()


def is_perfect(G: PermGroup) -> bool:
    return commutator_subgroup(G, G, G).order == G.order


def is_normal(H: PermGroup, G: PermGroup):
    """(normal?, witness) where a witness (g, h) has g h g^-1 outside H."""
    if not G.contains(H.elements).all():
        raise ValueError("H is not a subgroup of G")
    for g in G.gens:
        gi = perm_inverse(g)
        conj = g[H.gens[:, gi]] if len(H.gens) else H.gens     # g h g^-1
        bad = np.flatnonzero(~H.contains(conj))
        if len(bad):
            return False, (g, H.gens[bad[0]], conj[bad[0]])
    return True, None


# ---------------------------------------------------------------------------
# monoids given by Cayley tables

@dataclass
class TableMonoid:
    table: np.ndarray
    identity: int
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.table)

    def op(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def check(self, samples: int = 200_000, seed: int = 0) -> None:
        t = self.table
        e = self.identity
        if not (np.array_equal(t[e], np.arange(self.size)) and np.array_equal(t[:, e], np.arange(self.size))):
            raise ActionError(f"{self.name}: identity law fails")
        bad = associativity_violation(t, samples=samples, seed=seed)
        if bad is not None:
            raise ActionError(f"{self.name}: not associative at {bad}")

    def units(self) -> tuple[np.ndarray, np.ndarray]:
        """(unit indices, inverse of each unit as an index into the monoid)."""
        e = self.identity
        right = self.table == e
        two_sided = right & right.T
        has = two_sided.any(axis=1)
        idx = np.flatnonzero(has)
        inv = two_sided[idx].argmax(axis=1)
        return idx, inv

    def restrict(self, idx: np.ndarray, name: str = "") -> "TableMonoid":
        """Sub-monoid on ``idx`` (must be closed and contain the identity)."""
        pos = np.full(self.size, -1, dtype=np.int64)
        pos[idx] = np.arange(len(idx))
        sub = pos[self.table[np.ix_(idx, idx)]]
        if (sub < 0).any():
            raise ValueError("subset is not closed")
        return TableMonoid(sub, int(pos[self.identity]), name or self.name)


def associativity_violation(table: np.ndarray, samples: int = 200_000, seed: int = 0):
    """Exhaustive for at most ASSOC_EXHAUSTIVE elements, random triples above."""
    n = len(table)
    if n <= ASSOC_EXHAUSTIVE:
        return _accel.associativity_violation(table)
    rng = np.random.default_rng(seed)
    a, b, c = rng.integers(n, size=(3, samples))
    bad = np.flatnonzero(table[table[a, b], c] != table[a, table[b, c]])
    return None if not len(bad) else (int(a[bad[0]]), int(b[bad[0]]), int(c[bad[0]]))


def units_of(M: TableMonoid) -> tuple[TableMonoid, np.ndarray, np.ndarray]:
    """(group of units as a monoid, their indices in M, inverse indices in M)."""
    idx, inv = M.units()
    return M.restrict(idx, f"{M.name}^x"), idx, inv


@dataclass
class Semidirect:
    monoid: TableMonoid
    B: TableMonoid
    A: TableMonoid
    action: np.ndarray        # action[a, b] = phi_a(b)

    def pair(self, a: int, b: int) -> int:
        return a * self.B.size + b

    def split(self, p):
        return np.divmod(p, self.B.size)


def validate_action(B: TableMonoid, A: TableMonoid, action: np.ndarray) -> None:
    act = np.asarray(action)
    if act.shape != (A.size, B.size):
        raise ActionError("action table has the wrong shape")
    lhs = act[:, B.table]                                   # phi_a(b1 b2)
    rhs = B.table[act[:, :, None], act[:, None, :]]         # phi_a(b1) phi_a(b2)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        a, b1, b2 = bad[0]
        raise ActionError(f"phi_{a} is not an endomorphism: fails on ({b1}, {b2})")
    if (act[:, B.identity] != B.identity).any():
        raise ActionError("some phi_a does not fix the identity of B")
    comp = act[A.table]                                     # phi_{a1 a2}(b), indexed [a1, a2, b]
    after = act[np.arange(A.size)[:, None, None], act[None, :, :]]   # phi_a1(phi_a2(b))
    bad = np.argwhere(comp != after)
    if len(bad):
        a1, a2, b = bad[0]
        raise ActionError(f"phi is not a homomorphism: fails on ({a1}, {a2}) at {b}")
    if not np.array_equal(act[A.identity], np.arange(B.size)):
        raise ActionError("phi of the identity is not the identity")


def semidirect(B: TableMonoid, A: TableMonoid, action: np.ndarray, check: bool = True) -> Semidirect:
    """Pairs (a, b) with (a,b)(c,d) = (ac, b * phi_a(d)); index a*|B| + b."""
    act = np.asarray(action, dtype=np.int64)
    validate_action(B, A, act)
    nb = B.size
    a = np.repeat(np.arange(A.size), nb)
    b = np.tile(np.arange(nb), A.size)
    first = A.table[a[:, None], a[None, :]]
    second = B.table[b[:, None], act[a[:, None], b[None, :]]]
    table = first * nb + second
    M = TableMonoid(table, A.identity * nb + B.identity, f"{B.name} x| {A.name}")
    if check:
        M.check()
    return Semidirect(M, B, A, act)


def verify_semidirect_units(B: TableMonoid, A: TableMonoid, action: np.ndarray, name: str = "") -> dict:
    """(B x| A)^x versus B^x x| A^x with the restricted action, as sets with operation."""
    S = semidirect(B, A, action)
    _, big_units, _ = units_of(S.monoid)
    UB, ub, _ = units_of(B)
    UA, ua, _ = units_of(A)
    posb = np.full(B.size, -1, dtype=np.int64)
    posb[ub] = np.arange(len(ub))
    restricted = posb[S.action[np.ix_(ua, ub)]]
    automorphic = bool((restricted >= 0).all()) and all(
        len(np.unique(row)) == len(ub) for row in restricted)
    small = semidirect(UB, UA, restricted) if automorphic else None
    witnesses = []
    same_set = same_op = False
    if small is not None:
        ia, ib = np.divmod(np.arange(small.monoid.size), len(ub))
        embed = ua[ia] * B.size + ub[ib]
        same_set = np.array_equal(np.sort(embed), np.sort(big_units))
        same_op = np.array_equal(S.monoid.table[np.ix_(embed, embed)], embed[small.monoid.table])
        if not same_set:
            witnesses.append("unit sets differ")
    else:
        witnesses.append("restricted action is not by automorphisms")
    return {
        "claim": "(B x| A)^x = B^x x| A^x",
        "instance": name,
        "lhs_order": int(len(big_units)),
        "rhs_order": int(len(ub) * len(ua)),
        "map_bijective": bool(same_set),
        "map_homomorphic": bool(same_op),
        "restricted_action_automorphic": automorphic,
        "witnesses": witnesses,
    }


# ---------------------------------------------------------------------------
# monoids of polynomial functions

def _op_table(space: FuncSpace, op) -> np.ndarray:
    T = space.tables
    m, d = T.shape
    rows = op(T[:, None, :], T[None, :, :]).reshape(-1, d)
    idx = space.index_of(rows)
    if (idx < 0).any():
        raise ValueError("function space not closed under the operation")
    return idx.reshape(m, m)


def additive_monoid(space: FuncSpace) -> TableMonoid:
    R = space.ring
    zero = int(space.index_of(np.zeros(space.tables.shape[1], dtype=np.int64))[0])
    return TableMonoid(_op_table(space, R.add), zero, f"(F({R.name}^{space.arity}),+)")


def multiplicative_monoid(space: FuncSpace) -> TableMonoid:
    R = space.ring
    one = int(space.index_of(np.ones(space.tables.shape[1], dtype=np.int64))[0])
    return TableMonoid(_op_table(space, R.mul), one, f"(F({R.name}^{space.arity}),*)")


def scalar_monoid(R: Ring) -> TableMonoid:
    return TableMonoid(R.mul_table.copy(), 1, f"({R.name},*)")


def perm_monoid(perms: np.ndarray, name: str = "") -> TableMonoid:
    """Composition table a o b of a closed set of permutations."""
    s = RowSet(perms.shape[1], len(perms))
    s.add(perms)
    rows = perms[:, perms]                         # rows[a, b] = a[b]
    idx = s.lookup(rows.reshape(-1, perms.shape[1])).reshape(len(perms), len(perms))
    if (idx < 0).any():
        raise ValueError("permutations not closed under composition")
    ident = int(s.lookup(np.arange(perms.shape[1]))[0])
    return TableMonoid(idx, ident, name)


def semidirect_unit_instances() -> list[tuple[str, TableMonoid, TableMonoid, np.ndarray]]:
    """Desk instances of B x| A used to check the unit-group theorem."""
    from .ring import build_ring
    out = []
    for spec in ("F2", "F3"):
        R = build_ring(spec)
        F = enumerate_poly_functions(R, 1)
        B, A = additive_monoid(F), multiplicative_monoid(F)
        out.append((f"(F({spec}),+) x| (F({spec}),*) by multiplication", B, A, A.table.copy()))
    R = build_ring("Z4")
    F = enumerate_poly_functions(R, 1)
    B = additive_monoid(F)
    S = scalar_monoid(R)
    act = F.index_of(R.mul(np.arange(R.size)[:, None, None], F.tables[None, :, :]).reshape(-1, R.size))
    out.append(("(F(Z4),+) x| (Z4,*) by scalars", B, S, act.reshape(R.size, len(F))))
    P = enumerate_poly_permutations(R, space=F).tables
    Pm = perm_monoid(P, "P(Z4)")
    inv = np.array([perm_inverse(p) for p in P])
    act = F.index_of(F.tables[:, inv].transpose(1, 0, 2).reshape(-1, R.size))   # act[s, f] = f o s^-1
    out.append(("(F(Z4),*) x| P(Z4) by F o s^-1", multiplicative_monoid(F), Pm, act.reshape(len(P), len(F))))
    return out


# ---------------------------------------------------------------------------
# induced decompositions

def _compose_index(space_rows: np.ndarray, perms: np.ndarray, lookup) -> np.ndarray:
    """idx[u, l] = index of row u composed with permutation l."""
    rows = space_rows[:, perms]                 # [u, l, point]
    return lookup(rows.reshape(-1, space_rows.shape[1])).reshape(len(space_rows), len(perms))


def _lookup_into(rows: np.ndarray):
    s = RowSet(rows.shape[1], len(rows))
    s.add(rows)

    def look(x):
        idx = s.lookup(x)
        if (idx < 0).any():
            raise ValueError("result left the expected set")
        return idx
    return look


def induced_semidirect(R: Ring, n: int, cap: int = GROUP_CAP) -> dict:
    """Ingredients of pi_n(ML^n_n) x| pi_{n-1}(MT_{n-1}) as index tables."""
    if n < 2:
        raise RingError("decomposition needs n >= 2")
    N = R.size
    if n == 2:
        F1 = enumerate_poly_functions(R, 1)
        Q = enumerate_poly_permutations(R, space=F1).tables
        F = F1
    else:
        qg = induced_group_mt(R, n - 1, cap)
        if qg.perms is None:
            raise CapExceeded("quotient group too large to materialize")
        Q = unique_rows(qg.perms)
        F = enumerate_poly_functions(R, n - 1)
    Frows = F.tables
    Urows = enumerate_unit_valued(F).tables
    nq, nu, nf = len(Q), len(Urows), len(Frows)
    if nq * nu * nf > cap:
        raise CapExceeded(f"semidirect product has {nq * nu * nf} elements, cap {cap}")
    lq, lu, lf = _lookup_into(Q), _lookup_into(Urows), _lookup_into(Frows)
    qmul = lq(Q[:, Q].reshape(-1, Q.shape[1])).reshape(nq, nq)
    uprec = _compose_index(Urows, Q, lu)
    fprec = _compose_index(Frows, Q, lf)
    umul = lu(R.mul(Urows[:, None, :], Urows[None, :, :]).reshape(-1, Frows.shape[1])).reshape(nu, nu)
    ufmul = lf(R.mul(Urows[:, None, :], Frows[None, :, :]).reshape(-1, Frows.shape[1])).reshape(nu, nf)
    fadd = lf(R.add(Frows[:, None, :], Frows[None, :, :]).reshape(-1, Frows.shape[1])).reshape(nf, nf)
    # psi(h, (u, f)) = (h, f + u x_n) as a permutation of R^n; point index = a * N + x_n
    D = N ** (n - 1)
    xn = np.tile(np.arange(N), D)
    a = np.repeat(np.arange(D), N)
    qi, rest = np.divmod(np.arange(nq * nu * nf), nu * nf)
    ui, fi = np.divmod(rest, nf)
    last = R.add(Frows[fi][:, a], R.mul(xn[None, :], Urows[ui][:, a]))
    psi = Q[qi][:, a] * N + last
    return dict(R=R, n=n, Q=Q, U=Urows, F=Frows, psi=psi, qmul=qmul, uprec=uprec, fprec=fprec,
                umul=umul, ufmul=ufmul, fadd=fadd, nq=nq, nu=nu, nf=nf)


def verify_decomposition(R: Ring, n: int = 2, level: str = "induced", samples: int = 200,
                         seed: int = 0, max_deg: int = 2) -> dict:
    if level == "induced":
        return _verify_induced(R, n)
    if level in ("monoid", "group"):
        return _verify_polynomial_level(R, n, level, samples, seed, max_deg)
    raise ValueError(f"unknown level {level!r}")


def _verify_induced(R: Ring, n: int) -> dict:
    d = induced_semidirect(R, n)
    psi = d["psi"]
    nq, nu, nf = d["nq"], d["nu"], d["nf"]
    m = nq * nu * nf
    G = induced_group_mt(R, n)
    if G.perms is None:
        raise CapExceeded("group too large to materialize")
    gset = RowSet(G.perms.shape[1], len(G.perms))
    gset.add(G.perms)
    distinct = len(unique_rows(psi))
    onto = bool((gset.lookup(psi) >= 0).all()) and distinct == len(unique_rows(G.perms))
    bijective = distinct == m and onto
    bad = _accel.semidirect_hom_violation(psi, d["qmul"], d["uprec"], d["fprec"], d["umul"],
                                          d["ufmul"], d["fadd"], nu, nf)
    witnesses = []
    if bad is not None:
        witnesses.append({"homomorphism_fails_on_pair": list(bad)})
    # split: P o j = id with j(h) = psi(h, (1, 0)) and P the projection to the first n-1 coordinates
    N = R.size
    one_u = int(np.flatnonzero((d["U"] == 1).all(axis=1))[0])
    zero_f = int(np.flatnonzero((d["F"] == 0).all(axis=1))[0])
    j = psi[(np.arange(nq) * nu + one_u) * nf + zero_f]
    proj = j[:, ::N] // N
    split = bool(np.array_equal(proj, d["Q"]))
    # kernel of P is the image of the (u, f) part, and it is normal
    ident_q = int(np.flatnonzero((d["Q"] == np.arange(d["Q"].shape[1])).all(axis=1))[0])
    kernel_rows = psi[ident_q * nu * nf: (ident_q + 1) * nu * nf]
    group = PermGroup.from_elements(G.perms)
    kernel = PermGroup.from_elements(kernel_rows)
    normal, wit = is_normal(kernel, group)
    if wit is not None:
        witnesses.append({"conjugate_outside": wit[2].tolist()})
    return {
        "claim": f"pi_{n}(MT_{n}) = pi_{n}(ML^{n}_{n}) x| pi_{n - 1}(MT_{n - 1})",
        "instance": f"{R.name}, n={n}",
        "lhs_order": int(group.order),
        "rhs_order": int(m),
        "factor_orders": {"ML": nu * nf, "MT_prev": nq, "F": nf, "FU": nu},
        "map_bijective": bool(bijective),
        "map_homomorphic": bad is None,
        "split": split,
        "kernel_normal": bool(normal),
        "witnesses": witnesses,
    }


def _verify_polynomial_level(R: Ring, n: int, level: str, samples: int, seed: int, max_deg: int) -> dict:
    """Exact polynomial identities for psi(h, (n:u;f)) = (h_1..h_{n-1}, f + u x_n) on samples."""
    from .poly import random_poly
    from .trimonoid import (TriElem, compose_tri, make_tri, random_mt, random_tr,
                            random_unit_poly, random_unit_valued, is_unit_tri)
    if n < 2:
        raise RingError("decomposition needs n >= 2")
    rng = np.random.default_rng(seed)

    def sample():
        if level == "group":
            h = random_tr(R, n - 1, max_deg, rng)
            u = random_unit_poly(R, n - 1, max_deg, rng)
        else:
            h = random_mt(R, n - 1, max_deg, rng)
            u = random_unit_valued(R, n - 1, max_deg, rng)
        return h, (u, random_poly(R, n - 1, max_deg, rng))

    def psi(h, uf):
        u, f = uf
        return make_tri(h.f1, list(h.levels) + [(f, u)], validate=False)

    def psi_inv(t: TriElem):
        h = make_tri(t.f1, t.levels[:-1], validate=False)
        f, u = t.levels[-1]
        return h, (u, f)

    def product(a, b):
        (h, (u, f)), (l, (v, g)) = a, b
        lv = _expanded(l)
        u_l, f_l = u.substitute(lv), f.substitute(lv)
        return compose_tri(h, l), (u_l * v, f_l + u_l * g)

    hom = bij = True
    units_ok = True
    witnesses = []
    for _ in range(samples):
        a, b = sample(), sample()
        lhs = psi(*product(a, b))
        rhs = compose_tri(psi(*a), psi(*b))
        if lhs != rhs:
            hom = False
            witnesses.append({"a": str(psi(*a)), "b": str(psi(*b))})
        t = psi(*a)
        back = psi_inv(t)
        if psi(*back) != t or back[0] != a[0] or back[1] != a[1]:
            bij = False
        if level == "group" and not is_unit_tri(t):
            units_ok = False
    return {
        "claim": ("TR" if level == "group" else "MT") + f"_{n} = ML^{n}_{n} x| "
                 + ("TR" if level == "group" else "MT") + f"_{n - 1} (sampled polynomial identities)",
        "instance": f"{R.name}, n={n}, samples={samples}",
        "lhs_order": None,
        "rhs_order": None,
        "map_bijective": bool(bij),
        "map_homomorphic": bool(hom and units_ok),
        "witnesses": witnesses[:3],
    }


def _expanded(t):
    from .trimonoid import expanded_components
    return [c.extend(t.n) for c in expanded_components(t)]


def ml_subgroup(R: Ring, n: int, k: int) -> PermGroup:
    """pi_n(ML^n_k): the level-k factors (k:u;f) acting on R^n."""
    F = enumerate_poly_functions(R, k - 1)
    U = enumerate_unit_valued(F).tables
    ident = np.arange(R.size)[None, :]
    levels = []
    sizes = [1]
    for i in range(2, n + 1):
        if i == k:
            levels.append((F.tables, U))
            sizes += [len(F), len(U)]
        else:
            width = R.size ** (i - 1)
            levels.append((np.zeros((1, width), dtype=np.int64), np.ones((1, width), dtype=np.int64)))
            sizes += [1, 1]
    combos = np.indices(tuple(sizes)).reshape(len(sizes), -1).T
    return PermGroup.from_elements(assemble(R, n, ident, levels, combos))


def normality_report(R: Ring, n: int, k: int) -> dict:
    """Is pi_n(ML^n_k) normal in pi_n(MT_n)?  Includes the explicit conjugate for k < n."""
    from .parse import parse_poly
    from .trimonoid import compose_tri, induced_perm, level_factor
    H = ml_subgroup(R, n, k)
    Gi = induced_group_mt(R, n)
    if Gi.perms is None:
        raise CapExceeded("group too large to materialize")
    G = PermGroup.from_elements(Gi.perms)
    normal, wit = is_normal(H, G)
    report = {"ring": R.name, "n": n, "k": k, "H_order": H.order, "G_order": G.order,
              "normal": bool(normal), "witnesses": []}
    if wit is not None:
        report["witnesses"].append({"g": wit[0].tolist(), "h": wit[1].tolist(), "g h g^-1": wit[2].tolist()})
    if k < n:
        one = lambda i: parse_poly(R, "1", i - 1)
        a = level_factor(R, n, k + 1, one(k + 1), parse_poly(R, f"x{k}", k))
        b = level_factor(R, n, k, one(k), parse_poly(R, f"x{k - 1}", k - 1))
        c = level_factor(R, n, k + 1, one(k + 1), parse_poly(R, f"-x{k}", k))
        conj = compose_tri(compose_tri(a, b), c)
        perm = induced_perm(conj)
        report["witnesses"].append({
            "conjugation": f"({k + 1}:1;x{k})({k}:1;x{k - 1})({k + 1}:1;-x{k})",
            "result": str(conj),
            "in_H": bool(perm in H),
            "in_G": bool(perm in G),
        })
    return report


# ---------------------------------------------------------------------------
# group properties of the induced groups

def group_props(R: Ring, n: int = 2) -> dict:
    Gi = induced_group_mt(R, n)
    if Gi.perms is None:
        raise CapExceeded("group too large to materialize")
    G = PermGroup.from_elements(Gi.perms)
    ds = derived_series(G)
    lcs = lower_central_series(G)
    wit = G.abelian_witness()
    out = {
        "ring": R.name, "n": n, "order": G.order,
        "solvable": ds[-1].order == 1,
        "nilpotent": lcs[-1].order == 1,
        "abelian": wit is None,
        "derived_series": [g.order for g in ds],
        "lower_central_series": [g.order for g in lcs],
    }
    if R.is_local:
        out["p_group"] = _is_p_power(G.order, R.residue_characteristic)
    return out


def _is_p_power(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def permutation_group_of(R: Ring) -> PermGroup:
    """P(R) as a permutation group on R."""
    return PermGroup.from_elements(enumerate_poly_permutations(R).tables)


def nonabelian_witness_f2() -> dict:
    """pi_2((x1, x1+x2)) and pi_2((x1+1, x1+x2)) over F2 do not commute."""
    from .parse import parse_vec
    from .ring import build_ring
    from .trimonoid import from_vecpoly, induced_perm
    R = build_ring("F2")
    a = induced_perm(from_vecpoly(parse_vec(R, "(x1, x1+x2)")))
    b = induced_perm(from_vecpoly(parse_vec(R, "(x1+1, x1+x2)")))
    return {"a": a.tolist(), "b": b.tolist(), "ab": a[b].tolist(), "ba": b[a].tolist(),
            "commute": bool(np.array_equal(a[b], b[a]))}
