"""Time each hot kernel under the numba and numpy backends and check they agree.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from triperm import _accel
from triperm.dualnum import all_coeff_rows
from triperm.poly import func_values, random_poly
from triperm.ring import build_ring
from triperm.structure import induced_semidirect


def _cases():
    rng = np.random.default_rng(1)
    R5 = build_ring("F5")
    f = random_poly(R5, 4, 6, rng, density=0.8)
    yield "eval_grid (F5, 4 vars, 625 points)", lambda: func_values(f)

    Z4 = build_ring("Z4")
    rows = all_coeff_rows(Z4, 5)
    add, mul = Z4._tables_for_kernels
    xs = np.arange(Z4.size)
    yield f"horner_batch (Z4, {len(rows)} polys)", lambda: _accel.horner_batch(rows, xs, add, mul)

    Z = build_ring("Z200")
    table = np.asarray(Z._mul_rows, dtype=np.int64)
    yield "associativity (200x200 table)", lambda: _accel.associativity_violation(table)

    d = induced_semidirect(build_ring("F3"), 2)
    args = (d["psi"], d["qmul"], d["uprec"], d["fprec"], d["umul"], d["ufmul"], d["fadd"], d["nu"], d["nf"])
    yield "semidirect homomorphism (F3, 1296^2 pairs)", lambda: _accel.semidirect_hom_violation(*args)


def _time(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"{'kernel':46s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s} agree")
    for name, fn in _cases():
        _accel.set_backend("numba")
        fn()                                   # compile / load cache
        t_nb, out_nb = _time(fn, args.repeat)
        _accel.set_backend("numpy")
        t_np, out_np = _time(fn, args.repeat)
        print(f"{name:46s} {t_nb:10.5f} {t_np:10.5f} {t_np / t_nb:8.1f} {_same(out_nb, out_np)}")


if __name__ == "__main__":
    main()
