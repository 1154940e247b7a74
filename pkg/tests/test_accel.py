import os
import subprocess
import sys

import numpy as np
import pytest

from triperm import _accel
from triperm.dualnum import all_coeff_rows
from triperm.poly import func_values, random_poly
from triperm.ring import build_ring
from triperm.structure import induced_semidirect

pytestmark = pytest.mark.skipif(_accel.numba is None, reason="numba not installed")


@pytest.fixture
def both():
    """Run a callable under each backend and return both results."""
    saved = _accel.backend()

    def go(fn):
        out = {}
        for name in ("numba", "numpy"):
            _accel.set_backend(name)
            out[name] = fn()
        return out["numba"], out["numpy"]

    yield go
    _accel.set_backend(saved)


def test_eval_grid_parity(both):
    rng = np.random.default_rng(0)
    for spec, k in (("Z4", 3), ("F2^2:t^2+t+1", 2), ("Z9", 2), ("F3", 0)):
        f = random_poly(build_ring(spec), k, 4, rng)
        a, b = both(lambda: func_values(f))
        assert np.array_equal(a, b)


def test_horner_parity(both):
    for spec, deg in (("Z4", 4), ("F3", 3), ("F2[a1..a1]dual", 2), ("F2", 0)):
        R = build_ring(spec)
        rows = all_coeff_rows(R, deg)
        add, mul = R._tables_for_kernels
        a, b = both(lambda: _accel.horner_batch(rows, np.arange(R.size), add, mul))
        assert np.array_equal(a, b)


def test_associativity_parity(both):
    Z = build_ring("Z12")
    table = np.asarray(Z._mul_rows, dtype=np.int64)
    assert both(lambda: _accel.associativity_violation(table)) == (None, None)
    broken = table.copy()
    broken[2, 3] = 5
    a, b = both(lambda: _accel.associativity_violation(broken))
    assert a is not None and b is not None
    for x, y, z in (a, b):
        assert broken[broken[x, y], z] != broken[x, broken[y, z]]


def test_semidirect_hom_parity(both):
    d = induced_semidirect(build_ring("F2"), 2)
    args = [d["psi"], d["qmul"], d["uprec"], d["fprec"], d["umul"], d["ufmul"], d["fadd"], d["nu"], d["nf"]]
    assert both(lambda: _accel.semidirect_hom_violation(*args)) == (None, None)
    bad = args[0].copy()
    bad[[1, 2]] = bad[[2, 1]]
    args[0] = bad
    a, b = both(lambda: _accel.semidirect_hom_violation(*args))
    assert a is not None and b is not None


def test_unknown_backend():
    with pytest.raises(ValueError):
        _accel.set_backend("cuda")


@pytest.mark.parametrize("flag,expected", [("0", "numpy"), ("1", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, TRIPERM_NUMBA=flag)
    code = "from triperm import _accel; from triperm.cli import run; print(_accel.backend()); run(['induced-order', '--ring', 'F2', '--n', '2'])"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, timeout=120)
    lines = out.stdout.splitlines()
    assert lines[0] == expected and '"order": 8' in lines[1]
