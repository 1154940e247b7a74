"""Hot kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import from ``TRIPERM_NUMBA`` ("0" forces the
numpy path) and can be switched at runtime with :func:`set_backend`, which is
what the benchmark does.  Both paths must return identical arrays.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_BACKEND = "numpy"
if numba is not None and os.environ.get("TRIPERM_NUMBA", "1") != "0":
    _BACKEND = "numba"


def backend() -> str:
    return _BACKEND


def set_backend(name: str) -> None:
    global _BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    _BACKEND = name


# ---------------------------------------------------------------------------
# polynomial evaluation over the whole grid R^k

def _eval_grid_np(exps, coefs, add, mul, powtab, n, k):
    total = n ** k
    if k:
        grid = np.indices((n,) * k, dtype=np.int64).reshape(k, total)
    else:
        grid = np.zeros((0, 1), dtype=np.int64)
    out = np.zeros(total, dtype=np.int64)
    for t in range(exps.shape[0]):
        m = np.full(total, coefs[t], dtype=np.int64)
        for j in range(k):
            e = exps[t, j]
            if e:
                m = mul[m, powtab[grid[j], e]]
        out = add[out, m]
    return out


if numba is not None:

    @njit(cache=True)
    def _eval_grid_nb(exps, coefs, add, mul, powtab, n, k):
        total = n ** k
        out = np.zeros(total, np.int64)
        coords = np.zeros(max(k, 1), np.int64)
        for p in range(total):
            r = p
            for j in range(k - 1, -1, -1):
                coords[j] = r % n
                r //= n
            acc = 0
            for t in range(exps.shape[0]):
                m = coefs[t]
                for j in range(k):
                    e = exps[t, j]
                    if e:
                        m = mul[m, powtab[coords[j], e]]
                acc = add[acc, m]
            out[p] = acc
        return out


def eval_grid(exps, coefs, add, mul, powtab, n: int, k: int) -> np.ndarray:
    """Values of sum(coefs[t] * x^exps[t]) at every point of R^k, row-major."""
    if _BACKEND == "numba":
        return _eval_grid_nb(exps, coefs, add, mul, powtab, n, k)
    return _eval_grid_np(exps, coefs, add, mul, powtab, n, k)


# ---------------------------------------------------------------------------
# batched univariate Horner evaluation

def _horner_np(coefs, xs, add, mul):
    b, d1 = coefs.shape
    out = np.repeat(coefs[:, d1 - 1 : d1], xs.shape[0], axis=1)
    for j in range(d1 - 2, -1, -1):
        out = add[mul[out, xs[None, :]], coefs[:, j : j + 1]]
    return out


if numba is not None:

    @njit(cache=True)
    def _horner_nb(coefs, xs, add, mul):
        b, d1 = coefs.shape
        out = np.empty((b, xs.shape[0]), np.int64)
        for i in range(b):
            for p in range(xs.shape[0]):
                x = xs[p]
                acc = coefs[i, d1 - 1]
                for j in range(d1 - 2, -1, -1):
                    acc = add[mul[acc, x], coefs[i, j]]
                out[i, p] = acc
        return out


def horner_batch(coefs, xs, add, mul) -> np.ndarray:
    """Evaluate many univariate polynomials (rows, lowest degree first) at xs."""
    coefs = np.ascontiguousarray(coefs, dtype=np.int64)
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    if _BACKEND == "numba":
        return _horner_nb(coefs, xs, add, mul)
    return _horner_np(coefs, xs, add, mul)


# ---------------------------------------------------------------------------
# associativity of a Cayley table

def _assoc_np(table):
    n = table.shape[0]
    for a in range(n):
        left = table[table[a]]          # (a*b)*c  indexed [b, c]
        right = table[a][table]         # a*(b*c)
        bad = np.argwhere(left != right)
        if bad.size:
            b, c = bad[0]
            return a, int(b), int(c)
    return -1, -1, -1


if numba is not None:

    @njit(cache=True)
    def _assoc_nb(table):
        n = table.shape[0]
        for a in range(n):
            for b in range(n):
                ab = table[a, b]
                for c in range(n):
                    if table[ab, c] != table[a, table[b, c]]:
                        return a, b, c
        return -1, -1, -1


def associativity_violation(table: np.ndarray):
    """First triple (a, b, c) with (ab)c != a(bc), or None."""
    table = np.ascontiguousarray(table, dtype=np.int64)
    if _BACKEND == "numba":
        a, b, c = _assoc_nb(table)
    else:
        a, b, c = _assoc_np(table)
    return None if a < 0 else (int(a), int(b), int(c))


# ---------------------------------------------------------------------------
# homomorphism check for psi: N x| Q -> G on induced tables
#
# pair index p = (q * nu + u) * nf + f.  The semidirect product is
#   (h,(u,f)) (l,(v,g)) = (h l, (u(l) v, f(l) + u(l) g))
# with every ingredient given as an index table.

def _semidirect_product_index(qa, ua, fa, qb, ub, fb, qmul, uprec, fprec, umul, ufmul, fadd, nu, nf):
    ul = uprec[ua, qb]
    q = qmul[qa, qb]
    u = umul[ul, ub]
    f = fadd[fprec[fa, qb], ufmul[ul, fb]]
    return (q * nu + u) * nf + f


def _semidirect_hom_np(psi, qmul, uprec, fprec, umul, ufmul, fadd, nu, nf):
    m = psi.shape[0]
    idx = np.arange(m)
    qs, rest = np.divmod(idx, nu * nf)
    us, fs = np.divmod(rest, nf)
    for a in range(m):
        prod = _semidirect_product_index(qs[a], us[a], fs[a], qs, us, fs,
                                         qmul, uprec, fprec, umul, ufmul, fadd, nu, nf)
        lhs = psi[prod]
        rhs = psi[a][psi]
        bad = np.flatnonzero((lhs != rhs).any(axis=1))
        if bad.size:
            return a, int(bad[0])
    return -1, -1


if numba is not None:

    @njit(cache=True)
    def _semidirect_hom_nb(psi, qmul, uprec, fprec, umul, ufmul, fadd, nu, nf):
        m, d = psi.shape
        for a in range(m):
            qa = a // (nu * nf)
            ua = (a // nf) % nu
            fa = a % nf
            for b in range(m):
                qb = b // (nu * nf)
                ub = (b // nf) % nu
                fb = b % nf
                ul = uprec[ua, qb]
                q = qmul[qa, qb]
                u = umul[ul, ub]
                f = fadd[fprec[fa, qb], ufmul[ul, fb]]
                p = (q * nu + u) * nf + f
                for x in range(d):
                    if psi[p, x] != psi[a, psi[b, x]]:
                        return a, b
        return -1, -1


def semidirect_hom_violation(psi, qmul, uprec, fprec, umul, ufmul, fadd, nu, nf):
    """First pair (a, b) with psi(a*b) != psi(a) o psi(b), or None."""
    args = [np.ascontiguousarray(x, dtype=np.int64) for x in (psi, qmul, uprec, fprec, umul, ufmul, fadd)]
    if _BACKEND == "numba":
        a, b = _semidirect_hom_nb(*args, nu, nf)
    else:
        a, b = _semidirect_hom_np(*args, nu, nf)
    return None if a < 0 else (int(a), int(b))
