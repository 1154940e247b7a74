"""Command-line interface: ``python3 -m triperm <command> [options]``.

Exit codes: 0 ok, 1 failed check, 2 bad input, 3 size cap exceeded.
Output is JSON with sorted keys unless ``--format text``.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import dualnum, funcspace, structure, trimonoid
from .errors import CapExceeded, ParseError, RingError, TripermError
from .parse import parse_element, parse_poly, parse_vec, split_top_level
from .ring import Ring, build_ring


class CheckFailed(Exception):
    def __init__(self, report):
        super().__init__("check failed")
        self.report = report


def _ring(args) -> Ring:
    if not args.ring:
        raise ParseError("--ring is required")
    return build_ring(args.ring, cap=args.cap) if args.cap else build_ring(args.ring)


def _vecs(args, count: int) -> list[str]:
    if len(args.vec) != count:
        raise ParseError(f"expected {count} --vec argument(s), got {len(args.vec)}")
    return args.vec


def _tri(R: Ring, text: str, validate: bool = True):
    return trimonoid.from_vecpoly(parse_vec(R, text), validate=validate)


def _point(R: Ring, text: str | None) -> list[int]:
    if not text:
        raise ParseError("--point is required")
    return [parse_element(R, p) for p in split_top_level(text)]


def _fmt_point(R: Ring, pt) -> list[str]:
    return [R.format(int(a)) for a in pt]


def _dual(R: Ring, text: str):
    return dualnum.make_dual(R, [parse_poly(R, c, 1) for c in split_top_level(text)])


def _vec_str(t) -> str:
    return "(" + ", ".join(str(c) for c in trimonoid.to_vecpoly(t)) + ")"


# ---------------------------------------------------------------------------
# trimonoid commands

def cmd_compose(args):
    R = _ring(args)
    g, f = (_tri(R, v) for v in _vecs(args, 2))
    return {"result": _vec_str(trimonoid.compose_tri(g, f))}


def cmd_invert(args):
    R = _ring(args)
    t = _tri(R, _vecs(args, 1)[0])
    if not trimonoid.is_unit_tri(t):
        raise CheckFailed({"unit": False, "error": "not invertible in the polynomial monoid"})
    inv = trimonoid.invert_tri(t)
    ident = trimonoid.identity_tri(R, t.n)
    ok = trimonoid.compose_tri(t, inv) == ident and trimonoid.compose_tri(inv, t) == ident
    return {"result": _vec_str(inv), "verified": ok}


def cmd_apply(args):
    R = _ring(args)
    t = _tri(R, _vecs(args, 1)[0])
    return {"result": _fmt_point(R, trimonoid.apply_tri(t, _point(R, args.point)))}


def cmd_solve(args):
    R = _ring(args)
    t = _tri(R, _vecs(args, 1)[0])
    pre = trimonoid.solve_preimage(t, _point(R, args.point))
    return {"result": _fmt_point(R, pre)}


def cmd_member(args):
    R = _ring(args)
    try:
        t = _tri(R, _vecs(args, 1)[0])
    except TripermError as exc:
        if isinstance(exc, ParseError):
            raise
        raise CheckFailed({"member": False, "reason": str(exc)})
    return {"member": True, "factored": str(t)}


def cmd_unit(args):
    R = _ring(args)
    t = _tri(R, _vecs(args, 1)[0])
    return {"unit": trimonoid.is_unit_tri(t)}


def cmd_equiv(args):
    R = _ring(args)
    s, t = (_tri(R, v) for v in _vecs(args, 2))
    return {"equivalent": trimonoid.equiv_tri(s, t)}


# ---------------------------------------------------------------------------
# funcspace and structure commands

def cmd_count_functions(args):
    R = _ring(args)
    k = args.n or 1
    F = funcspace.enumerate_poly_functions(R, k, args.cap or funcspace.DOMAIN_CAP)
    out = {"ring": R.name, "k": k, "F": len(F), "FU": len(funcspace.enumerate_unit_valued(F))}
    if k == 1:
        out["P"] = len(funcspace.enumerate_poly_permutations(R, space=F))
    return out


def cmd_induced_order(args):
    R = _ring(args)
    rep = funcspace.verify_order_formula(R, args.n or 2, args.cap or funcspace.GROUP_CAP)
    out = {"order": rep["formula"]["value"], "report": rep}
    if not rep["match"]:
        raise CheckFailed(out)
    return out


def _checked(rep: dict, key: str = "match") -> dict:
    if not rep.get(key):
        raise CheckFailed(rep)
    return rep


def cmd_verify_ratios(args):
    return _checked(funcspace.verify_ratio_theorems(_ring(args), args.n or 1))


def cmd_verify_order(args):
    return _checked(funcspace.verify_order_formula(_ring(args), args.n or 2, args.cap or funcspace.GROUP_CAP))


def _tr_vs_mt_ok(rep: dict) -> bool:
    if not rep.get("subset"):
        return False
    wit = rep.get("witnesses", [])
    if wit:
        return not rep["equal"] and all(w["in_MT"] and not w["in_TR"] for w in wit)
    return True


def cmd_tr_vs_mt(args):
    rep = funcspace.tr_vs_mt(_ring(args), args.n or 2, args.cap or funcspace.GROUP_CAP)
    rep["ok"] = _tr_vs_mt_ok(rep)
    return _checked(rep, "ok")


def _decomp_ok(rep: dict) -> bool:
    keys = ("map_bijective", "map_homomorphic", "split", "kernel_normal")
    return all(rep[k] for k in keys if k in rep)


def cmd_verify_decomposition(args):
    rep = structure.verify_decomposition(_ring(args), args.n or 2, args.level, seed=args.seed)
    rep["ok"] = _decomp_ok(rep)
    return _checked(rep, "ok")


def cmd_group_props(args):
    return structure.group_props(_ring(args), args.n or 2)


# ---------------------------------------------------------------------------
# dual numbers

def cmd_dual_eval(args):
    R = _ring(args)
    f, g = (_dual(R, v) for v in _vecs(args, 2))
    closed = dualnum.dual_eval(f, g)
    generic = dualnum.dual_eval_generic(f, g)
    out = {"result": dualnum.dual_to_json(closed), "agrees_with_substitution": closed == generic}
    if closed != generic:
        raise CheckFailed(out)
    return out


def cmd_dual_perm(args):
    R = _ring(args)
    f = _dual(R, _vecs(args, 1)[0])
    crit = dualnum.is_perm_dual(f)
    brute = dualnum.is_perm_dual_brute(f)
    out = {"permutation": crit, "brute_force": brute}
    if crit != brute:
        raise CheckFailed(out)
    return out


def cmd_embed(args):
    R = _ring(args)
    f = _dual(R, _vecs(args, 1)[0])
    t = dualnum.embed_psi(f)
    same = bool(np.array_equal(dualnum.embed_phi(f), dualnum.dual_perm_as_points(f)))
    out = {"psi": _vec_str(t), "factored": str(t), "phi_matches_dual_action": same}
    if not same:
        raise CheckFailed(out)
    return out


# ---------------------------------------------------------------------------
# verify-all

def _field_expectations(R: Ring, props: dict) -> bool:
    if R.is_local and R.residue_size == 2:
        return props["nilpotent"] and props.get("p_group", False)
    if R.is_field:
        q = R.size
        return props["solvable"] == (q <= 4) and props["nilpotent"] == (q == 2)
    return True


def _roundtrips(R: Ring, n: int, seed: int, count: int = 50) -> dict:
    rng = np.random.default_rng(seed)
    ident = trimonoid.identity_tri(R, n)
    bad_inv = bad_solve = 0
    for _ in range(count):
        t = trimonoid.random_tr(R, n, 3, rng)
        inv = trimonoid.invert_tri(t)
        bad_inv += not (trimonoid.compose_tri(t, inv) == ident == trimonoid.compose_tri(inv, t))
        m = trimonoid.random_mt(R, n, 3, rng)
        pts = rng.integers(0, R.size, size=(10, n))
        bad_solve += sum(trimonoid.solve_preimage(m, trimonoid.apply_tri(m, p)) != tuple(p) for p in pts.tolist())
    return {"samples": count, "inverse_failures": int(bad_inv), "solve_failures": int(bad_solve),
            "ok": bad_inv == 0 and bad_solve == 0}


def _bundle_item(name: str, spec: str, n: int, seed: int) -> dict:
    R = build_ring(spec)
    if name == "count-functions":
        F = funcspace.enumerate_poly_functions(R, 1)
        rep = {"F": len(F), "FU": len(funcspace.enumerate_unit_valued(F)),
               "P": len(funcspace.enumerate_poly_permutations(R, space=F))}
        rep["ok"] = rep["F"] == len(funcspace.naive_closure(R, 1))
        return rep
    if name == "verify-ratios":
        rep = funcspace.verify_ratio_theorems(R, 1)
        rep["ok"] = rep["match"]
        return rep
    if name == "verify-order":
        rep = funcspace.verify_order_formula(R, n)
        rep["ok"] = rep["match"]
        return rep
    if name == "tr-vs-mt":
        rep = funcspace.tr_vs_mt(R, n)
        rep["ok"] = _tr_vs_mt_ok(rep)
        return rep
    if name == "verify-decomposition":
        rep = structure.verify_decomposition(R, n, "induced")
        rep["ok"] = _decomp_ok(rep)
        return rep
    if name == "group-props":
        rep = structure.group_props(R, n)
        rep["ok"] = bool(_field_expectations(R, rep))
        return rep
    if name == "normality":
        rep = structure.normality_report(R, n, n)
        rep["ok"] = rep["normal"]
        return rep
    if name == "roundtrips":
        return _roundtrips(R, max(n, 2), seed)
    if name == "dual":
        rng = np.random.default_rng(seed)
        bad = 0
        for _ in range(50):
            f = dualnum.DualPoly(R, 1, tuple(_rand1(R, rng) for _ in range(2)))
            g = dualnum.DualPoly(R, 1, tuple(_rand1(R, rng) for _ in range(2)))
            bad += dualnum.dual_eval(f, g) != dualnum.dual_eval_generic(f, g)
            bad += dualnum.is_perm_dual(f) != dualnum.is_perm_dual_brute(f)
        return {"samples": 50, "failures": int(bad), "ok": bad == 0}
    raise ValueError(name)


def _rand1(R: Ring, rng):
    from .poly import random_poly
    return random_poly(R, 1, 3, rng)


BUNDLE = ["count-functions", "verify-ratios", "verify-order", "tr-vs-mt", "verify-decomposition",
          "group-props", "normality", "roundtrips", "dual"]


def cmd_verify_all(args):
    R = _ring(args)
    n = args.n or 2
    names = [b for b in BUNDLE if b != "verify-ratios" or R.is_local]
    jobs = [(name, R.name, n, args.seed) for name in names]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_bundle_item, *zip(*jobs)))
    else:
        results = [_bundle_item(*j) for j in jobs]
    out = {"ring": R.name, "n": n, "checks": dict(zip(names, results))}
    out["ok"] = all(r["ok"] for r in results)
    return _checked(out, "ok")


COMMANDS = {
    "compose": (cmd_compose, "compose two triangular elements: --vec g --vec f gives g(f)"),
    "invert": (cmd_invert, "compositional inverse of a unit"),
    "apply": (cmd_apply, "evaluate at --point"),
    "solve": (cmd_solve, "preimage of --point"),
    "member": (cmd_member, "membership test for MT_n"),
    "unit": (cmd_unit, "is the element a unit of MT_n"),
    "equiv": (cmd_equiv, "do two elements induce the same data"),
    "count-functions": (cmd_count_functions, "|F|, |FU| (and |P| for k=1) by closure"),
    "induced-order": (cmd_induced_order, "order of the induced group pi_n(MT_n)"),
    "verify-ratios": (cmd_verify_ratios, "unit-valued ratio and permutation ratio reports"),
    "verify-order": (cmd_verify_order, "materialized group order against the product formula"),
    "tr-vs-mt": (cmd_tr_vs_mt, "compare pi_n(TR_n) with pi_n(MT_n)"),
    "verify-decomposition": (cmd_verify_decomposition, "split-extension check"),
    "group-props": (cmd_group_props, "solvable / nilpotent / abelian"),
    "dual-eval": (cmd_dual_eval, "f(g) over the dual numbers"),
    "dual-perm": (cmd_dual_perm, "permutation test over the dual numbers"),
    "embed": (cmd_embed, "embed a dual permutation polynomial into MT_(n+1)"),
    "verify-all": (cmd_verify_all, "run the full check bundle for one ring"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triperm")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--ring")
        p.add_argument("--n", type=int)
        p.add_argument("--vec", action="append", default=[])
        p.add_argument("--poly", action="append", default=[], help="alias for --vec")
        p.add_argument("--point")
        p.add_argument("--level", default="induced", choices=["induced", "monoid", "group"])
        p.add_argument("--format", default="json", choices=["json", "text"])
        p.add_argument("--cap", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
    return parser


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _emit(report, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(report, sort_keys=True, default=_default) + "\n")
        return
    if isinstance(report, dict):
        for k in sorted(report):
            v = report[k]
            if not isinstance(v, str):
                v = json.dumps(v, sort_keys=True, default=_default)
            stream.write(f"{k}: {v}\n")
    else:
        stream.write(f"{report}\n")


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    args.vec = args.vec + args.poly
    func = COMMANDS[args.command][0]
    try:
        report, code = func(args), 0
    except CheckFailed as exc:
        report, code = exc.report, 1
    except (ParseError, RingError) as exc:
        report, code = {"error": type(exc).__name__, "detail": str(exc)}, 2
    except CapExceeded as exc:
        report, code = {"error": "CapExceeded", "detail": str(exc)}, 3
    except TripermError as exc:
        report, code = {"error": type(exc).__name__, "detail": str(exc)}, 1
    _emit(report, args.format, stdout)
    return code


def main() -> None:
    sys.exit(run())
