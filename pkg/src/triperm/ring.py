"""Finite commutative rings with identity, enumerated by canonical indices.

Every element of a :class:`Ring` is an integer in ``range(ring.size)`` with
``0`` the zero and ``1`` the identity.  Arithmetic is computed from a
coordinate representation (residues mod m, coefficient tuples, tuples of base
ring indices) and memoized into full Cayley tables for small rings.

Spec grammar::

    Z<m> | F<p> | F<p>^<r>:<modulus> | <base>[t]/t^<e> | <base>[a1..a<k>]dual | <spec>x<spec>
"""
from __future__ import annotations

import functools
import math
import re
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import CapExceeded, RingError

DEFAULT_CAP = 4096
TABLE_CAP = 256


# ---------------------------------------------------------------------------
# specs

@dataclass(frozen=True)
class RingSpec:
    kind: str                      # Z, F, GF, trunc, dual, prod
    params: tuple = ()
    parts: tuple = ()

    def __str__(self) -> str:
        k = self.kind
        if k == "Z":
            return f"Z{self.params[0]}"
        if k == "F":
            return f"F{self.params[0]}"
        if k == "GF":
            p, r, mod = self.params
            return f"F{p}^{r}:{_format_t_poly(mod)}"
        if k == "trunc":
            return f"{self.parts[0]}[t]/t^{self.params[0]}"
        if k == "dual":
            return f"{self.parts[0]}[a1..a{self.params[0]}]dual"
        return "x".join(str(s) for s in self.parts)

    @property
    def size(self) -> int:
        k = self.kind
        if k in ("Z", "F"):
            return self.params[0]
        if k == "GF":
            return self.params[0] ** self.params[1]
        if k == "trunc":
            return self.parts[0].size ** self.params[0]
        if k == "dual":
            return self.parts[0].size ** (self.params[0] + 1)
        return math.prod(s.size for s in self.parts)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def _format_t_poly(coeffs: Sequence[int]) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        if not mono:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        else:
            terms.append(f"{c}*{mono}")
    return "+".join(terms) or "0"


def _parse_t_poly(text: str, p: int) -> tuple[int, ...]:
    text = text.replace(" ", "").replace("-", "+-")
    coeffs: dict[int, int] = {}
    for term in filter(None, text.split("+")):
        m = re.fullmatch(r"(-?)(\d*)\*?(t(?:\^(\d+))?)?", term)
        if not m or (not m.group(2) and not m.group(3)):
            raise RingError(f"bad modulus term {term!r}")
        c = int(m.group(2)) if m.group(2) else 1
        if m.group(1):
            c = -c
        deg = 0 if not m.group(3) else int(m.group(4) or 1)
        coeffs[deg] = coeffs.get(deg, 0) + c
    deg = max(coeffs)
    return tuple(coeffs.get(i, 0) % p for i in range(deg + 1))


def _poly_divides(d: Sequence[int], f: Sequence[int], p: int) -> bool:
    """Does monic d divide f over F_p?"""
    rem = list(f)
    for top in range(len(rem) - 1, len(d) - 2, -1):
        c = rem[top] % p
        if c:
            shift = top - (len(d) - 1)
            for j, dj in enumerate(d):
                rem[shift + j] = (rem[shift + j] - c * dj) % p
    return not any(x % p for x in rem[: len(d) - 1])


def _is_irreducible(mod: Sequence[int], p: int) -> bool:
    r = len(mod) - 1
    for deg in range(1, r // 2 + 1):
        for tail in product(range(p), repeat=deg):
            if _poly_divides(tail + (1,), mod, p):
                return False
    return True


def parse_spec(text: str) -> RingSpec:
    text = text.strip().replace(" ", "")
    if not text:
        raise RingError("empty ring spec")
    pieces = text.split("x")
    if len(pieces) > 1:
        return RingSpec("prod", parts=tuple(parse_spec(p) for p in pieces))
    m = re.fullmatch(r"(.+)\[a1\.\.a(\d+)\]dual", text)
    if m:
        k = int(m.group(2))
        if k < 1:
            raise RingError("dual extension needs k >= 1")
        return RingSpec("dual", (k,), (parse_spec(m.group(1)),))
    m = re.fullmatch(r"(.+)\[t\]/t\^(\d+)", text)
    if m:
        e = int(m.group(2))
        if e < 2:
            raise RingError("nilpotent extension needs e >= 2")
        return RingSpec("trunc", (e,), (parse_spec(m.group(1)),))
    m = re.fullmatch(r"F(\d+)\^(\d+):(.+)", text)
    if m:
        p, r = int(m.group(1)), int(m.group(2))
        if not _is_prime(p):
            raise RingError(f"F{p}: {p} is not prime")
        mod = _parse_t_poly(m.group(3), p)
        if len(mod) - 1 != r or mod[-1] != 1:
            raise RingError(f"modulus must be monic of degree {r}")
        if not _is_irreducible(mod, p):
            raise RingError(f"modulus {m.group(3)} is reducible over F{p}")
        return RingSpec("GF", (p, r, mod))
    m = re.fullmatch(r"F(\d+)", text)
    if m:
        p = int(m.group(1))
        if not _is_prime(p):
            raise RingError(f"F{p}: {p} is not prime")
        return RingSpec("F", (p,))
    m = re.fullmatch(r"Z(\d+)", text)
    if m:
        mm = int(m.group(1))
        if mm < 2:
            raise RingError("Z<m> needs m >= 2")
        return RingSpec("Z", (mm,))
    raise RingError(f"cannot parse ring spec {text!r}")


# ---------------------------------------------------------------------------
# coordinate arithmetic, one per spec kind

class _Arith:
    """Vectorized add/mul on coordinate arrays of shape (..., d)."""

    radix: tuple
    gens: dict

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError


class _ModArith(_Arith):
    def __init__(self, m):
        self.m = m
        self.radix = (m,)
        self.gens = {}

    def add(self, a, b):
        return (a + b) % self.m

    def mul(self, a, b):
        return (a * b) % self.m


class _GFArith(_Arith):
    def __init__(self, p, r, mod):
        self.p, self.r, self.mod = p, r, np.array(mod, dtype=np.int64)
        self.radix = (p,) * r
        t = [0] * r
        if r == 1:
            t[0] = (-mod[0]) % p
        else:
            t[1] = 1
        self.gens = {"t": tuple(t)}

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        r, p = self.r, self.p
        shape = np.broadcast_shapes(a.shape, b.shape)[:-1]
        c = np.zeros(shape + (2 * r - 1,), dtype=np.int64)
        for i in range(r):
            for j in range(r):
                c[..., i + j] += a[..., i] * b[..., j]
        c %= p
        for k in range(2 * r - 2, r - 1, -1):
            lead = c[..., k].copy()
            for j in range(r + 1):
                c[..., k - r + j] -= lead * self.mod[j]
            c %= p
        return c[..., :r]


class _TruncArith(_Arith):
    """base[t]/(t^e): coordinates are base indices of 1, t, ..., t^(e-1)."""

    def __init__(self, base, e):
        self.base, self.e = base, e
        self.radix = (base.size,) * e
        self.gens = {"t": (0, 1) + (0,) * (e - 2)}

    def add(self, a, b):
        return self.base.add(a, b)

    def mul(self, a, b):
        B, e = self.base, self.e
        shape = np.broadcast_shapes(a.shape, b.shape)
        c = np.zeros(shape, dtype=np.int64)
        for i in range(e):
            for j in range(e - i):
                c[..., i + j] = B.add(c[..., i + j], B.mul(a[..., i], b[..., j]))
        return c


class _DualArith(_Arith):
    """base[a1..ak] with ai*aj = 0: coordinates (r0, r1, ..., rk)."""

    def __init__(self, base, k):
        self.base, self.k = base, k
        self.radix = (base.size,) * (k + 1)
        self.gens = {}
        for i in range(1, k + 1):
            g = [0] * (k + 1)
            g[i] = 1
            self.gens[f"a{i}"] = tuple(g)

    def add(self, a, b):
        return self.base.add(a, b)

    def mul(self, a, b):
        B = self.base
        shape = np.broadcast_shapes(a.shape, b.shape)
        c = np.empty(shape, dtype=np.int64)
        c[..., 0] = B.mul(a[..., 0], b[..., 0])
        for i in range(1, self.k + 1):
            c[..., i] = B.add(B.mul(a[..., 0], b[..., i]), B.mul(a[..., i], b[..., 0]))
        return c


class _ProdArith(_Arith):
    def __init__(self, factors):
        self.factors = factors
        self.radix = tuple(f.size for f in factors)
        self.gens = {}

    def add(self, a, b):
        shape = np.broadcast_shapes(a.shape, b.shape)
        c = np.empty(shape, dtype=np.int64)
        for j, f in enumerate(self.factors):
            c[..., j] = f.add(a[..., j], b[..., j])
        return c

    def mul(self, a, b):
        shape = np.broadcast_shapes(a.shape, b.shape)
        c = np.empty(shape, dtype=np.int64)
        for j, f in enumerate(self.factors):
            c[..., j] = f.mul(a[..., j], b[..., j])
        return c


# ---------------------------------------------------------------------------
# the ring

class Ring:
    """An enumerated finite commutative ring.  Immutable after construction."""

    def __init__(self, spec: RingSpec, arith: _Arith):
        self.spec = spec
        self.name = str(spec)
        self._arith = arith
        radix = np.array(arith.radix, dtype=np.int64)
        self.size = n = int(np.prod(radix))
        self._strides = np.concatenate([[1], np.cumprod(radix)[:-1]]).astype(np.int64)
        natural = (np.arange(n, dtype=np.int64)[:, None] // self._strides) % radix
        one_coords = np.zeros(len(radix), dtype=np.int64)
        one_coords[0] = 1
        if spec.kind == "prod":
            one_coords[:] = 1
        one_nat = int(one_coords @ self._strides)
        perm = np.arange(n, dtype=np.int64)
        perm[[1, one_nat]] = perm[[one_nat, 1]]
        self._nat2can = perm                    # an involution
        self._coords = natural[perm]            # coords of canonical index i

        if n <= TABLE_CAP:
            ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
            self.add_table = self._encode(arith.add(self._coords[ii], self._coords[jj]))
            self.mul_table = self._encode(arith.mul(self._coords[ii], self._coords[jj]))
            self._add_rows = self.add_table.tolist()
            self._mul_rows = self.mul_table.tolist()
        else:
            self.add_table = self.mul_table = None
            self._add_rows = self._mul_rows = None

        everything = np.arange(n, dtype=np.int64)
        zero = np.zeros(n, dtype=np.int64)
        # additive inverses: solve a + b = 0 by scanning multiples of each element
        self.neg_table = np.empty(n, dtype=np.int64)
        for a in range(n):
            b = self.add(everything, a) if self.add_table is None else self.add_table[a]
            self.neg_table[a] = int(np.flatnonzero(np.asarray(b) == 0)[0])

        self.inverse_table = np.full(n, -1, dtype=np.int64)
        for a in range(n):
            row = self.mul_table[a] if self.mul_table is not None else self.mul(np.full(n, a), everything)
            hit = np.flatnonzero(row == 1)
            if hit.size:
                self.inverse_table[a] = hit[0]
        self.unit_mask = self.inverse_table >= 0
        self.units = np.flatnonzero(self.unit_mask)

        # a^(2^j) for 2^j >= |R| vanishes iff a is nilpotent
        pw, e = everything.copy(), 1
        while e < n:
            pw = self.mul(pw, pw)
            e *= 2
        self.nilpotent_mask = pw == zero
        self.nilpotents = np.flatnonzero(self.nilpotent_mask)

        self._detect_local()
        self._char = None

    # -- coordinates -------------------------------------------------------
    def _encode(self, coords: np.ndarray) -> np.ndarray:
        return self._nat2can[coords @ self._strides]

    def coords(self, a: int) -> tuple:
        return tuple(int(c) for c in self._coords[a])

    def from_coords(self, c: Sequence[int]) -> int:
        return int(self._encode(np.asarray(c, dtype=np.int64)))

    # -- arithmetic (ints or integer arrays) -------------------------------
    def add(self, a, b):
        if self.add_table is not None:
            if type(a) is int and type(b) is int:
                return self._add_rows[a][b]
            return self.add_table[a, b]
        r = self._encode(self._arith.add(self._coords[a], self._coords[b]))
        return int(r) if np.ndim(r) == 0 else r

    def mul(self, a, b):
        if self.mul_table is not None:
            if type(a) is int and type(b) is int:
                return self._mul_rows[a][b]
            return self.mul_table[a, b]
        r = self._encode(self._arith.mul(self._coords[a], self._coords[b]))
        return int(r) if np.ndim(r) == 0 else r

    def neg(self, a):
        r = self.neg_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def inverse(self, a: int) -> int:
        inv = int(self.inverse_table[a])
        if inv < 0:
            raise RingError(f"{self.format(a)} is not a unit of {self.name}")
        return inv

    def is_unit(self, a: int) -> bool:
        return bool(self.unit_mask[a])

    def is_nilpotent(self, a: int) -> bool:
        return bool(self.nilpotent_mask[a])

    def power(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    @property
    def characteristic(self) -> int:
        if self._char is None:
            c, x = 1, 1
            while x != 0:
                x = self.add(x, 1)
                c += 1
            self._char = c
        return self._char

    def from_int(self, k: int) -> int:
        """Image of the integer k under Z -> R."""
        k %= self.characteristic
        result, base = 0, 1
        while k:
            if k & 1:
                result = self.add(result, base)
            base = self.add(base, base)
            k >>= 1
        return result

    def generator(self, name: str) -> int:
        try:
            return self.from_coords(self._arith.gens[name])
        except KeyError:
            raise RingError(f"{self.name} has no generator {name!r}") from None

    @functools.cached_property
    def _tables_for_kernels(self):
        if self.add_table is None:
            raise RingError(f"{self.name} is too large for table kernels")
        return np.ascontiguousarray(self.add_table), np.ascontiguousarray(self.mul_table)

    @functools.lru_cache(maxsize=None)
    def power_table(self, max_exp: int) -> np.ndarray:
        """powtab[a, e] = a**e for 0 <= e <= max_exp."""
        n = self.size
        tab = np.empty((n, max_exp + 1), dtype=np.int64)
        tab[:, 0] = 1
        col = np.arange(n, dtype=np.int64)
        for e in range(1, max_exp + 1):
            tab[:, e] = col if e == 1 else self.mul(tab[:, e - 1], col)
        return tab

    # -- local structure ---------------------------------------------------
    def _detect_local(self) -> None:
        nonunits = np.flatnonzero(~self.unit_mask)
        sums = self.add(nonunits[:, None], nonunits[None, :])
        self.is_local = bool((~self.unit_mask[sums]).all())
        if not self.is_local:
            self.maximal_ideal = None
            self.residue_size = None
            self.residue = None
            return
        self.maximal_ideal = nonunits
        q = self.size // len(nonunits)
        residue = np.full(self.size, -1, dtype=np.int64)
        cid = 0
        for a in range(self.size):
            if residue[a] < 0:
                residue[self.add(np.full(len(nonunits), a), nonunits)] = cid
                cid += 1
        if cid != q:
            raise RingError(f"{self.name}: inconsistent residue field")
        self.residue_size = q
        self.residue = residue
        self.residue_reps = np.array([int(np.flatnonzero(residue == c)[0]) for c in range(q)])

    @property
    def is_field(self) -> bool:
        return self.is_local and len(self.maximal_ideal) == 1

    @property
    def residue_characteristic(self) -> int:
        q = self.residue_size
        return min(d for d in range(2, q + 1) if q % d == 0)

    # -- text ----------------------------------------------------------------
    def format(self, a: int) -> str:
        k = self.spec.kind
        if k in ("Z", "F"):
            return str(a)
        if k == "prod":
            return f"[{a}]"
        c = self.coords(a)
        if k == "GF":
            names = ["", "t"] + [f"t^{i}" for i in range(2, len(c))]
            fmt = str
        else:
            base = self.spec.kind in ("trunc", "dual") and self._arith.base
            fmt = base.format
            if k == "trunc":
                names = ["", "t"] + [f"t^{i}" for i in range(2, len(c))]
            else:
                names = [""] + [f"a{i}" for i in range(1, len(c))]
        terms = []
        for ci, nm in zip(c, names):
            if not ci:
                continue
            if not nm:
                terms.append(fmt(ci))
            elif ci == 1:
                terms.append(nm)
            else:
                terms.append(f"{fmt(ci)}*{nm}")
        if not terms:
            return "0"
        if not any(c[1:]):
            return terms[0]
        return "(" + "+".join(terms) + ")"

    def parse_element(self, text: str) -> int:
        from .parse import parse_element
        return parse_element(self, text)

    def elem(self, a) -> "Elem":
        if isinstance(a, str):
            a = self.parse_element(a)
        return Elem(self, int(a))

    def __repr__(self) -> str:
        return f"Ring({self.name!r})"

    def __len__(self) -> int:
        return self.size

    def __reduce__(self):
        return build_ring, (self.name,)


@functools.lru_cache(maxsize=None)
def _build(spec: RingSpec) -> Ring:
    k = spec.kind
    if k in ("Z", "F"):
        arith = _ModArith(spec.params[0])
    elif k == "GF":
        arith = _GFArith(*spec.params)
    elif k == "trunc":
        arith = _TruncArith(_build(spec.parts[0]), spec.params[0])
    elif k == "dual":
        arith = _DualArith(_build(spec.parts[0]), spec.params[0])
    else:
        arith = _ProdArith([_build(p) for p in spec.parts])
    return Ring(spec, arith)


def build_ring(spec: "str | RingSpec", cap: int = DEFAULT_CAP) -> Ring:
    """Construct and classify the ring described by ``spec``."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    if spec.size > cap:
        raise CapExceeded(f"{spec} has {spec.size} elements, cap is {cap}")
    return _build(spec)


# ---------------------------------------------------------------------------
# elements with ring identity

@dataclass(frozen=True)
class Elem:
    ring: Ring = field(repr=False)
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.ring.size:
            raise RingError(f"index {self.index} out of range for {self.ring.name}")

    def _other(self, other) -> int:
        if isinstance(other, Elem):
            if other.ring is not self.ring:
                raise RingError(f"cannot mix {self.ring.name} and {other.ring.name}")
            return other.index
        if isinstance(other, int):
            return self.ring.from_int(other)
        raise TypeError(f"cannot combine Elem with {type(other).__name__}")

    def __add__(self, other):
        return Elem(self.ring, self.ring.add(self.index, self._other(other)))

    __radd__ = __add__

    def __mul__(self, other):
        return Elem(self.ring, self.ring.mul(self.index, self._other(other)))

    __rmul__ = __mul__

    def __sub__(self, other):
        return Elem(self.ring, self.ring.sub(self.index, self._other(other)))

    def __rsub__(self, other):
        return Elem(self.ring, self.ring.sub(self._other(other), self.index))

    def __neg__(self):
        return Elem(self.ring, self.ring.neg(self.index))

    def inverse(self) -> "Elem":
        return Elem(self.ring, self.ring.inverse(self.index))

    def __str__(self) -> str:
        return self.ring.format(self.index)


def ring_arith(a: Elem, b: Elem, op: str) -> Elem:
    if a.ring is not b.ring:
        raise RingError(f"cannot mix {a.ring.name} and {b.ring.name}")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "sub":
        return a - b
    if op == "neg":
        return -a
    raise RingError(f"unknown op {op!r}")


def unit_inverse(a: Elem) -> Elem:
    return a.inverse()


# ---------------------------------------------------------------------------
# Chinese remainder splitting

@dataclass(frozen=True)
class CRTSplit:
    ring: Ring
    factors: tuple
    to_factors: np.ndarray        # (|R|, len(factors)) factor indices
    from_factors: np.ndarray      # shape = factor sizes, R indices

    def split(self, a: int) -> tuple:
        return tuple(int(x) for x in self.to_factors[a])

    def join(self, parts: Sequence[int]) -> int:
        return int(self.from_factors[tuple(parts)])


def _factorize(m: int) -> list[tuple[int, int]]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


def _local_homs(R: Ring) -> list[tuple[Ring, np.ndarray]]:
    """Surjections R -> local factor, as index arrays."""
    spec = R.spec
    if spec.kind == "Z":
        pieces = _factorize(spec.params[0])
        if len(pieces) == 1:
            return [(R, np.arange(R.size))]
        vals = np.arange(R.size)
        return [(build_ring(f"Z{p ** e}"), vals % (p ** e)) for p, e in pieces]
    if spec.kind == "prod":
        out = []
        for j, fspec in enumerate(spec.parts):
            F = _build(fspec)
            proj = R._coords[:, j]
            for G, hom in _local_homs(F):
                out.append((G, hom[proj]))
        return out
    if R.is_local:
        return [(R, np.arange(R.size))]
    raise RingError(f"factorization of {R.name} into local rings unavailable")


def crt_split(R: Ring) -> CRTSplit:
    homs = _local_homs(R)
    factors = tuple(g for g, _ in homs)
    to = np.stack([h for _, h in homs], axis=1).astype(np.int64)
    sizes = tuple(f.size for f in factors)
    if math.prod(sizes) != R.size:
        raise RingError("CRT factors do not multiply to |R|")
    back = np.full(sizes, -1, dtype=np.int64)
    back[tuple(to.T)] = np.arange(R.size)
    if (back < 0).any():
        raise RingError("CRT map is not bijective")
    return CRTSplit(R, factors, to, back)
