import io
import json
import subprocess
import sys

import pytest

from triperm.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    out = buf.getvalue()
    return code, (json.loads(out) if out.startswith("{") else out)


def test_induced_order():
    code, rep = call("induced-order", "--ring", "F2", "--n", "2")
    assert code == 0 and rep["order"] == 8


def test_member_accepted_and_rejected():
    code, rep = call("member", "--ring", "Z4", "--n", "2", "--vec", "(x1+2*x1^2, x1 + x2*(1+2*x1))")
    assert code == 0 and rep["member"]
    code, rep = call("member", "--ring", "Z4", "--vec", "(x1^2, x2)")
    assert code == 1 and not rep["member"]


def test_group_props_f3():
    code, rep = call("group-props", "--ring", "F3", "--n", "2")
    assert code == 0
    assert rep["solvable"] and not rep["nilpotent"] and not rep["abelian"]


def test_trimonoid_commands():
    assert call("compose", "--ring", "Z4", "--vec", "(x1+1, x2)", "--vec", "(x1+1, x2)")[1]["result"] == "(x1 + 2, x2)"
    code, rep = call("invert", "--ring", "Z4", "--vec", "(x1+3, x2)")
    assert code == 0 and rep["verified"] and rep["result"] == "(x1 + 1, x2)"
    assert call("apply", "--ring", "Z4", "--vec", "(x1+1, x1+x2)", "--point", "1,1")[1]["result"] == ["2", "2"]
    assert call("solve", "--ring", "Z4", "--vec", "(x1+1, x1+x2)", "--point", "2,2")[1]["result"] == ["1", "1"]
    assert call("unit", "--ring", "Z4", "--poly", "(x1, x2*(x1^2 - x1 + 1))")[1]["unit"] is False
    assert call("equiv", "--ring", "F2", "--vec", "(x1^2, x2)", "--vec", "(x1, x2)")[1]["equivalent"] is True
    code, rep = call("invert", "--ring", "Z4", "--vec", "(x1, x2*(x1^2 - x1 + 1))")
    assert code == 1 and rep["unit"] is False


def test_funcspace_commands():
    code, rep = call("count-functions", "--ring", "Z4")
    assert code == 0 and (rep["F"], rep["FU"], rep["P"]) == (64, 16, 8)
    assert call("verify-ratios", "--ring", "F2[t]/t^2")[0] == 0
    assert call("verify-order", "--ring", "F3", "--n", "2")[0] == 0
    code, rep = call("tr-vs-mt", "--ring", "Z4", "--n", "2")
    assert code == 0 and rep["subset"] and not rep["equal"]
    for level in ("induced", "group"):
        assert call("verify-decomposition", "--ring", "F2", "--n", "2", "--level", level)[0] == 0


def test_dual_commands():
    code, rep = call("dual-eval", "--ring", "Z4", "--vec", "(x^2, 0)", "--vec", "(x, 1)")
    assert code == 0 and rep["result"]["components"] == ["x1^2", "2*x1"] and rep["agrees_with_substitution"]
    code, rep = call("dual-perm", "--ring", "F3", "--vec", "(x^3, 0)")
    assert code == 0 and rep == {"permutation": False, "brute_force": False}
    code, rep = call("embed", "--ring", "Z4", "--vec", "(x+2*x^2, 1)")
    assert code == 0 and rep["phi_matches_dual_action"] and rep["psi"] == "(2*x1^2 + x1, x2 + 1)"
    assert call("embed", "--ring", "F3", "--vec", "(x^3, 0)")[0] == 1


@pytest.mark.parametrize("argv,code", [
    (("count-functions", "--ring", "Q7"), 2),
    (("compose", "--ring", "Z4", "--vec", "(x1 +, x2)", "--vec", "(x1, x2)"), 2),
    (("count-functions", "--ring", "Z9", "--n", "2"), 3),
    (("no-such-command",), 2),
    (("apply", "--ring", "Z4", "--vec", "(x1, x2)", "--point", "1"), 2),
])
def test_exit_codes(argv, code):
    assert call(*argv)[0] == code


def test_text_format():
    code, out = call("induced-order", "--ring", "F2", "--n", "2", "--format", "text")
    assert code == 0 and "order: 8" in out.splitlines()


def test_deterministic_output():
    argv = ("tr-vs-mt", "--ring", "F3", "--n", "2", "--seed", "3")
    assert call(*argv) == call(*argv)
    a, b = io.StringIO(), io.StringIO()
    run(list(argv), a)
    run(list(argv), b)
    assert a.getvalue() == b.getvalue()


def test_verify_all_f2_and_module_entry():
    proc = subprocess.run([sys.executable, "-m", "triperm", "verify-all", "--ring", "F2", "--n", "2", "--jobs", "2"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    rep = json.loads(proc.stdout)
    assert rep["ok"] and set(rep["checks"]) >= {"verify-order", "group-props", "dual", "roundtrips"}
