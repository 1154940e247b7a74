"""Exact set membership for rows of small non-negative integers.

Rows are hashed by a fixed random linear form modulo 2^64; every hash hit is
confirmed by comparing the stored row, so a collision can never produce a
wrong answer (it raises instead).
"""
from __future__ import annotations

import numpy as np

_COEFS: dict[int, np.ndarray] = {}


def _coefs(width: int) -> np.ndarray:
    c = _COEFS.get(width)
    if c is None:
        rng = np.random.default_rng(0x5EED + width)
        c = rng.integers(1, 2**63 - 1, size=width, dtype=np.int64).astype(np.uint64) | np.uint64(1)
        _COEFS[width] = c
    return c


def row_hashes(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows)
    if rows.ndim == 1:
        rows = rows[None, :]
    with np.errstate(over="ignore"):
        return (rows.astype(np.uint64) * _coefs(rows.shape[1])).sum(axis=1, dtype=np.uint64)


class RowSet:
    """Growable set of equal-length integer rows with stable insertion indices."""

    def __init__(self, width: int, capacity: int = 1024):
        self.width = width
        self._data = np.empty((capacity, width), dtype=np.int64)
        self._n = 0
        self._index: dict[int, int] = {}

    def __len__(self) -> int:
        return self._n

    @property
    def rows(self) -> np.ndarray:
        return self._data[: self._n]

    def _grow(self, need: int) -> None:
        cap = len(self._data)
        if need <= cap:
            return
        while cap < need:
            cap *= 2
        new = np.empty((cap, self.width), dtype=np.int64)
        new[: self._n] = self._data[: self._n]
        self._data = new

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Index of each row, or -1 if absent."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.width)
        get = self._index.get
        out = np.fromiter((get(h, -1) for h in row_hashes(rows).tolist()), dtype=np.int64, count=len(rows))
        hit = out >= 0
        if hit.any() and not np.array_equal(self._data[out[hit]], rows[hit]):
            raise RuntimeError("row hash collision")
        return out

    def add(self, rows: np.ndarray) -> np.ndarray:
        """Insert rows (duplicates ignored); return the indices of the new ones."""
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, self.width)
        if not len(rows):
            return np.arange(self._n, self._n)
        h = row_hashes(rows)
        uh, first, inverse = np.unique(h, return_index=True, return_inverse=True)
        if not np.array_equal(rows[first][inverse.ravel()], rows):
            raise RuntimeError("row hash collision")
        order = np.argsort(first)               # keep first-occurrence order
        uh, first = uh[order], first[order]
        cand = rows[first]
        known = self.lookup(cand)
        fresh = np.flatnonzero(known < 0)
        start = self._n
        if len(fresh):
            self._grow(start + len(fresh))
            self._data[start : start + len(fresh)] = cand[fresh]
            index = self._index
            for j, key in enumerate(uh[fresh].tolist()):
                index[key] = start + j
            self._n += len(fresh)
        return np.arange(start, self._n)

    def __contains__(self, row) -> bool:
        return bool(self.lookup(np.asarray(row))[0] >= 0)


def dedupe_rows(rows: np.ndarray) -> np.ndarray:
    """Distinct rows in unspecified order (hash-based, verified exactly)."""
    rows = np.asarray(rows, dtype=np.int64)
    if len(rows) == 0:
        return rows.reshape(0, rows.shape[1] if rows.ndim == 2 else 0)
    h = row_hashes(rows)
    _, first, inverse = np.unique(h, return_index=True, return_inverse=True)
    out = rows[first]
    if not np.array_equal(out[inverse.ravel()], rows):
        raise RuntimeError("row hash collision")
    return out


def sort_rows(rows: np.ndarray) -> np.ndarray:
    if len(rows) == 0:
        return rows
    return rows[np.lexsort(rows.T[::-1])]


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Distinct rows in lexicographic order."""
    return sort_rows(dedupe_rows(rows))
