"""Sparse multivariate polynomials over a :class:`~triperm.ring.Ring`.

Terms are stored in a dict keyed by a packed exponent vector (16 bits per
variable, variable ``x1`` in the lowest slot), so that multiplying monomials
is integer addition of keys.  Polynomial identity and induced-function
equality are different things here and are never conflated: ``f == g``
compares coefficients, :func:`func_equiv` compares value tables.
"""
from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import CapExceeded, NotAUnit, RingError
from .ring import Elem, Ring, crt_split

SHIFT = 16
MASK = (1 << SHIFT) - 1
MAX_EXP = MASK

FUNC_CAP = 1 << 20

# cross-check fast criteria against brute force (set in the test suite)
CROSSCHECK = os.environ.get("TRIPERM_CROSSCHECK", "0") == "1"


def pack(exps: Sequence[int]) -> int:
    key = 0
    for j, e in enumerate(exps):
        if not 0 <= e <= MAX_EXP:
            raise OverflowError(f"exponent {e} out of range")
        key |= e << (SHIFT * j)
    return key


def unpack(key: int, nvars: int) -> tuple[int, ...]:
    return tuple((key >> (SHIFT * j)) & MASK for j in range(nvars))


class MultiPoly:
    """Immutable polynomial in ``nvars`` variables ``x1..xk`` over ``ring``."""

    __slots__ = ("ring", "nvars", "_terms", "_hash")

    def __init__(self, ring: Ring, nvars: int, terms: dict[int, int] | None = None):
        self.ring = ring
        self.nvars = nvars
        self._terms = {k: c for k, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, ring, nvars, terms):
        p = cls.__new__(cls)
        p.ring, p.nvars, p._terms, p._hash = ring, nvars, terms, None
        return p

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring, nvars: int) -> "MultiPoly":
        return cls._raw(ring, nvars, {})

    @classmethod
    def const(cls, ring: Ring, nvars: int, c) -> "MultiPoly":
        c = _as_index(ring, c)
        return cls._raw(ring, nvars, {0: c} if c else {})

    @classmethod
    def var(cls, ring: Ring, nvars: int, i: int) -> "MultiPoly":
        """The variable x_i (1-based)."""
        if not 1 <= i <= nvars:
            raise RingError(f"x{i} not among {nvars} variables")
        return cls._raw(ring, nvars, {1 << (SHIFT * (i - 1)): 1})

    @classmethod
    def from_terms(cls, ring: Ring, nvars: int, terms) -> "MultiPoly":
        """Build from {exponent tuple: coefficient} (coefficients may repeat keys)."""
        out: dict[int, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for exps, c in items:
            if len(exps) != nvars:
                raise RingError(f"exponent vector {exps} has wrong length for {nvars} variables")
            k = pack(exps)
            out[k] = ring.add(out.get(k, 0), _as_index(ring, c))
        return cls._raw(ring, nvars, {k: c for k, c in out.items() if c})

    @classmethod
    def univariate(cls, ring: Ring, coeffs: Sequence[int], nvars: int = 1) -> "MultiPoly":
        """sum coeffs[i] * x1^i (coefficients given as canonical indices)."""
        return cls._raw(ring, nvars, {i: int(c) for i, c in enumerate(coeffs) if c})

    # -- inspection ---------------------------------------------------------
    def terms(self) -> dict[tuple[int, ...], int]:
        return {unpack(k, self.nvars): c for k, c in self._terms.items()}

    def coefficient(self, exps: Sequence[int]) -> int:
        return self._terms.get(pack(exps), 0)

    @property
    def constant_term(self) -> int:
        return self._terms.get(0, 0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {0}

    def degree(self) -> int:
        if not self._terms:
            return -1
        return max(sum(unpack(k, self.nvars)) for k in self._terms)

    def degrees(self) -> tuple[int, ...]:
        """Per-variable maximum exponent."""
        d = [0] * self.nvars
        for k in self._terms:
            for j in range(self.nvars):
                e = (k >> (SHIFT * j)) & MASK
                if e > d[j]:
                    d[j] = e
        return tuple(d)

    def uses(self) -> set[int]:
        """1-based indices of variables that occur."""
        return {j + 1 for j, e in enumerate(self.degrees()) if e}

    def coeffs_1var(self) -> list[int]:
        """Dense coefficient list for a polynomial in x1 only."""
        if self.uses() - {1}:
            raise RingError("not a polynomial in x1 alone")
        out = [0] * (max(self._terms, default=0) + 1)
        for k, c in self._terms.items():
            out[k] = c
        return out

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "MultiPoly") -> None:
        if other.ring is not self.ring:
            raise RingError(f"cannot mix {self.ring.name} and {other.ring.name}")
        if other.nvars != self.nvars:
            raise RingError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Elem)):
            return MultiPoly.const(self.ring, self.nvars, _as_index(self.ring, other))
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        R = self.ring
        out = dict(self._terms)
        for k, c in other._terms.items():
            s = R.add(out.get(k, 0), c)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return MultiPoly._raw(R, self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        R = self.ring
        return MultiPoly._raw(R, self.nvars, {k: R.neg(c) for k, c in self._terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def scale(self, c) -> "MultiPoly":
        R = self.ring
        c = _as_index(R, c)
        out = {}
        for k, a in self._terms.items():
            v = R.mul(c, a)
            if v:
                out[k] = v
        return MultiPoly._raw(R, self.nvars, out)

    def __mul__(self, other) -> "MultiPoly":
        if isinstance(other, (int, Elem)):
            return self.scale(other)
        other = self._coerce(other)
        if not self._terms or not other._terms:
            return MultiPoly.zero(self.ring, self.nvars)
        if any(a + b > MAX_EXP for a, b in zip(self.degrees(), other.degrees())):
            raise OverflowError("exponent overflow in polynomial product")
        return MultiPoly._raw(self.ring, self.nvars, _mul_terms(self.ring, self._terms, other._terms))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "MultiPoly":
        if e < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.ring, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.ring is other.ring and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring.name, self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- variable bookkeeping -------------------------------------------------
    def extend(self, nvars: int) -> "MultiPoly":
        """Same polynomial viewed in more variables (new ones unused)."""
        if nvars < self.nvars:
            return self.restrict(nvars)
        return MultiPoly._raw(self.ring, nvars, self._terms)

    def restrict(self, nvars: int) -> "MultiPoly":
        """Drop trailing variables, which must not occur."""
        if any(j > nvars for j in self.uses()):
            raise RingError(f"polynomial uses variables beyond x{nvars}")
        return MultiPoly._raw(self.ring, nvars, self._terms)

    # -- calculus / evaluation --------------------------------------------------
    def derivative(self, var: int = 1) -> "MultiPoly":
        """Formal partial derivative in x_var (1-based)."""
        if not 1 <= var <= self.nvars:
            raise RingError(f"x{var} not among {self.nvars} variables")
        R = self.ring
        sh = SHIFT * (var - 1)
        out: dict[int, int] = {}
        for k, c in self._terms.items():
            e = (k >> sh) & MASK
            if e:
                v = R.mul(R.from_int(e), c)
                if v:
                    out[k - (1 << sh)] = v
        return MultiPoly._raw(R, self.nvars, out)

    def __call__(self, *point):
        return self.evaluate(point)

    def evaluate(self, point: Sequence) -> int:
        R = self.ring
        if len(point) != self.nvars:
            raise RingError(f"expected {self.nvars} coordinates, got {len(point)}")
        pt = [_as_index(R, a) for a in point]
        acc = 0
        for k, c in self._terms.items():
            m = c
            for j, a in enumerate(pt):
                e = (k >> (SHIFT * j)) & MASK
                if e:
                    m = R.mul(m, R.power(a, e))
            acc = R.add(acc, m)
        return acc

    def substitute(self, args: Sequence["MultiPoly"]) -> "MultiPoly":
        """f(args[0], ..., args[k-1]); the result lives in the args' variables."""
        if len(args) != self.nvars:
            raise RingError(f"need {self.nvars} arguments, got {len(args)}")
        R = self.ring
        if not args:
            return self
        target = args[0].nvars
        for a in args:
            if a.ring is not R:
                raise RingError(f"cannot substitute {a.ring.name} polynomial into {R.name}")
            if a.nvars != target:
                raise RingError("substituted polynomials must share their arity")
        degs = self.degrees()
        powers = []
        for a, d in zip(args, degs):
            pw = [MultiPoly.const(R, target, 1)]
            for _ in range(d):
                pw.append(pw[-1] * a)
            powers.append(pw)
        acc: dict[int, int] = {}
        for k, c in self._terms.items():
            mono = {0: c}
            for j in range(self.nvars):
                e = (k >> (SHIFT * j)) & MASK
                if e:
                    mono = _mul_terms(R, mono, powers[j][e]._terms)
                    if not mono:
                        break
            for mk, mc in mono.items():
                s = R.add(acc.get(mk, 0), mc)
                if s:
                    acc[mk] = s
                else:
                    acc.pop(mk, None)
        return MultiPoly._raw(R, target, acc)

    def func_of(self, cap: int = FUNC_CAP) -> "FuncTable":
        return FuncTable(self.ring, self.nvars, func_values(self, cap))

    # -- text -----------------------------------------------------------------
    def __str__(self) -> str:
        if not self._terms:
            return "0"
        R = self.ring
        keys = sorted(self._terms, key=lambda k: (-sum(unpack(k, self.nvars)), [-e for e in unpack(k, self.nvars)]))
        out = []
        for k in keys:
            c = self._terms[k]
            exps = unpack(k, self.nvars)
            factors = [f"x{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(exps) if e]
            coeff = R.format(c)
            if not factors:
                out.append(coeff)
            elif c == 1:
                out.append("*".join(factors))
            else:
                out.append(coeff + "*" + "*".join(factors))
        return " + ".join(out)

    def __repr__(self) -> str:
        return f"MultiPoly({self.ring.name}, {self.nvars}, {str(self)!r})"


def _as_index(ring: Ring, c) -> int:
    if isinstance(c, Elem):
        if c.ring is not ring:
            raise RingError(f"cannot mix {c.ring.name} and {ring.name}")
        return c.index
    if isinstance(c, (int, np.integer)):
        c = int(c)
        if not 0 <= c < ring.size:
            raise RingError(f"{c} is not an element index of {ring.name}")
        return c
    raise TypeError(f"not a ring element: {c!r}")


def _mul_terms(R: Ring, a: dict, b: dict) -> dict:
    out: dict[int, int] = {}
    get = out.get
    if R._mul_rows is not None:
        addr, mulr = R._add_rows, R._mul_rows
        for ka, ca in a.items():
            row = mulr[ca]
            for kb, cb in b.items():
                c = row[cb]
                if c:
                    k = ka + kb
                    out[k] = addr[get(k, 0)][c]
    else:
        for ka, ca in a.items():
            for kb, cb in b.items():
                c = R.mul(ca, cb)
                if c:
                    k = ka + kb
                    out[k] = R.add(get(k, 0), c)
    return {k: c for k, c in out.items() if c}


def poly_arith(f: MultiPoly, g, op: str) -> MultiPoly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "scalar_mul":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


def evaluate(f: MultiPoly, point: Sequence) -> int:
    return f.evaluate(point)


def substitute(f: MultiPoly, args: Sequence[MultiPoly]) -> MultiPoly:
    return f.substitute(args)


def formal_derivative(f: MultiPoly, var: int = 1) -> MultiPoly:
    return f.derivative(var)


# ---------------------------------------------------------------------------
# induced functions

class FuncTable:
    """Values of a function R^k -> R over the row-major grid of element indices."""

    __slots__ = ("ring", "arity", "values")

    def __init__(self, ring: Ring, arity: int, values):
        values = np.asarray(values, dtype=np.int64)
        if values.shape != (ring.size ** arity,):
            raise RingError(f"expected {ring.size ** arity} values, got {values.shape}")
        values.setflags(write=False)
        self.ring, self.arity, self.values = ring, arity, values

    def __eq__(self, other) -> bool:
        if not isinstance(other, FuncTable):
            return NotImplemented
        return (self.ring is other.ring and self.arity == other.arity
                and np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.ring.name, self.arity, self.values.tobytes()))

    def __call__(self, *point: int) -> int:
        return int(self.values[point_index(self.ring.size, point)])

    def is_bijective(self) -> bool:
        return self.arity == 1 and np.array_equal(np.sort(self.values), np.arange(self.ring.size))

    def __repr__(self) -> str:
        return f"FuncTable({self.ring.name}, {self.arity}, {self.values.tolist()})"


def point_index(n: int, point: Sequence[int]) -> int:
    idx = 0
    for a in point:
        idx = idx * n + int(a)
    return idx


def func_values(f: MultiPoly, cap: int = FUNC_CAP) -> np.ndarray:
    """Value array of f over R^k by exhaustive evaluation."""
    R, k = f.ring, f.nvars
    if R.size ** k > cap:
        raise CapExceeded(f"|R|^k = {R.size ** k} exceeds cap {cap}")
    if not f._terms:
        return np.zeros(R.size ** k, dtype=np.int64)
    keys = list(f._terms)
    exps = np.array([unpack(key, k) for key in keys], dtype=np.int64).reshape(len(keys), k)
    coefs = np.array([f._terms[key] for key in keys], dtype=np.int64)
    maxe = int(exps.max()) if exps.size else 0
    powtab = R.power_table(max(maxe, 1))
    if R.add_table is not None:
        add, mul = R._tables_for_kernels
        return _accel.eval_grid(exps, coefs, add, mul, powtab, R.size, k)
    n = R.size
    total = n ** k
    grid = np.indices((n,) * k, dtype=np.int64).reshape(k, total) if k else np.zeros((0, 1), np.int64)
    out = np.zeros(total, dtype=np.int64)
    for t in range(len(keys)):
        m = np.full(total, coefs[t], dtype=np.int64)
        for j in range(k):
            if exps[t, j]:
                m = R.mul(m, powtab[grid[j], exps[t, j]])
        out = R.add(out, m)
    return out


def func_of(f: MultiPoly, cap: int = FUNC_CAP) -> FuncTable:
    return f.func_of(cap)


def func_equiv(f: MultiPoly, g: MultiPoly) -> bool:
    f._check(g)
    return bool(np.array_equal(func_values(f), func_values(g)))


# ---------------------------------------------------------------------------
# one-polynomial predicates

def is_unit_poly(f: MultiPoly) -> bool:
    """Unit of R[x1..xk]: unit constant term, every other coefficient nilpotent."""
    R = f.ring
    if not R.is_unit(f.constant_term):
        return False
    return all(R.is_nilpotent(c) for k, c in f._terms.items() if k)


def unit_poly_inverse(f: MultiPoly) -> MultiPoly:
    """Multiplicative inverse a0^-1 * sum_j (-a0^-1 n)^j of a unit polynomial."""
    if not is_unit_poly(f):
        raise NotAUnit(f"{f} is not a unit of the polynomial ring")
    R = f.ring
    a0inv = R.inverse(f.constant_term)
    nil = MultiPoly._raw(R, f.nvars, {k: c for k, c in f._terms.items() if k})
    step = nil.scale(R.neg(a0inv))
    total = MultiPoly.const(R, f.nvars, 1)
    power = total
    while True:
        power = power * step
        if power.is_zero():
            break
        total = total + power
    return total.scale(a0inv)


def is_unit_valued(f: MultiPoly, cap: int = FUNC_CAP) -> bool:
    return bool(f.ring.unit_mask[func_values(f, cap)].all())


def _require_univariate(f: MultiPoly) -> None:
    if f.nvars != 1:
        raise RingError("expected a polynomial in one variable")


def is_bijective_brute(f: MultiPoly) -> bool:
    _require_univariate(f)
    vals = func_values(f)
    return len(np.unique(vals)) == f.ring.size


def noebauer_criterion(f: MultiPoly) -> bool:
    """Permutation test for a finite local ring that is not a field:
    f permutes the residue field and f' never vanishes modulo M."""
    R = f.ring
    if not R.is_local or R.is_field:
        raise RingError(f"{R.name} is not a local ring with nonzero maximal ideal")
    vals = func_values(f)
    res = R.residue[vals[R.residue_reps]]
    if len(np.unique(res)) != R.residue_size:
        return False
    dvals = func_values(f.derivative(1))
    return bool(R.unit_mask[dvals].all())


def map_coefficients(f: MultiPoly, target: Ring, hom: np.ndarray) -> MultiPoly:
    """Image of f under the coefficient map given by the index array hom."""
    out: dict[int, int] = {}
    for k, c in f._terms.items():
        v = int(hom[c])
        if v:
            out[k] = v
    return MultiPoly._raw(target, f.nvars, out)


def is_permutation_poly(f: MultiPoly) -> bool:
    _require_univariate(f)
    R = f.ring
    if R.is_local and not R.is_field:
        fast = noebauer_criterion(f)
        if CROSSCHECK:
            assert fast == is_bijective_brute(f), f"criterion disagrees with brute force on {f}"
        return fast
    if not R.is_local:
        try:
            split = crt_split(R)
        except RingError:
            return is_bijective_brute(f)
        return all(is_permutation_poly(map_coefficients(f, F, split.to_factors[:, j]))
                   for j, F in enumerate(split.factors))
    return is_bijective_brute(f)


def is_automorphism(f: MultiPoly) -> bool:
    """R-automorphism of R[x]: unit linear coefficient, nilpotent higher ones."""
    _require_univariate(f)
    R = f.ring
    if not R.is_unit(f._terms.get(1, 0)):
        return False
    return all(R.is_nilpotent(c) for k, c in f._terms.items() if k >= 2)


def x_poly(R: Ring) -> MultiPoly:
    return MultiPoly.var(R, 1, 1)


def newton_inverse(f: MultiPoly, max_iter: int = 64, max_degree: int = 1024) -> MultiPoly | None:
    """Compositional inverse by Newton lifting; None when the iteration fails.

    Without an inverse the iterates' degrees keep growing, so exceeding
    ``max_degree`` is treated as failure.
    """
    _require_univariate(f)
    R = f.ring
    a1 = f._terms.get(1, 0)
    if not R.is_unit(a1):
        return None
    x = x_poly(R)
    df = f.derivative(1)
    g = (x - f.constant_term).scale(R.inverse(a1))
    for _ in range(max_iter):
        err = f.substitute([g]) - x
        if err.is_zero():
            return g if g.substitute([f]) == x else None
        slope = df.substitute([g])
        if not is_unit_poly(slope):
            return None
        g = g - err * unit_poly_inverse(slope)
        if g.degree() > max_degree:
            return None
    return None


def automorphism_inverse(f: MultiPoly) -> MultiPoly:
    if not is_automorphism(f):
        raise NotAUnit(f"{f} is not an R-automorphism of R[x]")
    g = newton_inverse(f)
    if g is None:  # pragma: no cover - excluded by the criterion
        raise RuntimeError(f"Newton iteration did not converge for {f}")
    return g


def lagrange_interpolate(values: "FuncTable | Sequence[int]", ring: Ring | None = None) -> MultiPoly:
    """Polynomial of degree < q over the field F_q inducing the given values."""
    if isinstance(values, FuncTable):
        ring, vals = values.ring, values.values.tolist()
    else:
        vals = [int(v) for v in values]
    if ring is None or not ring.is_field:
        raise RingError("Lagrange interpolation needs a field")
    if len(vals) != ring.size:
        raise RingError("need one value per field element")
    R = ring
    x = x_poly(R)
    total = MultiPoly.zero(R, 1)
    for b, vb in enumerate(vals):
        if not vb:
            continue
        basis = MultiPoly.const(R, 1, vb)
        for c in range(R.size):
            if c != b:
                basis = basis * (x - c).scale(R.inverse(R.sub(b, c)))
        total = total + basis
    return total


def monomials_1var(R: Ring, coeffs: Iterable[int]) -> MultiPoly:
    return MultiPoly.univariate(R, list(coeffs))


def monomial_exponents(nvars: int, max_deg: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= max_deg, graded order."""
    out = [()]
    for _ in range(nvars):
        out = [e + (d,) for e in out for d in range(max_deg + 1) if sum(e) + d <= max_deg]
    return sorted(out, key=lambda e: (sum(e), e))


def random_poly(ring: Ring, nvars: int, max_deg: int, rng, pool=None, density: float = 0.6,
                min_deg: int = 0) -> MultiPoly:
    """Random polynomial with coefficients drawn from ``pool`` (default: all of R)."""
    pool = np.arange(ring.size) if pool is None else np.asarray(pool)
    terms = {}
    for e in monomial_exponents(nvars, max_deg):
        if sum(e) < min_deg or rng.random() > density:
            continue
        c = int(pool[rng.integers(len(pool))])
        if c:
            terms[pack(e)] = c
    return MultiPoly._raw(ring, nvars, terms)
