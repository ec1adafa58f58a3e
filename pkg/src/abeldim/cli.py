"""Command-line front end: abeldim check | dim | bounds | superisolated | examples.

JSON-first output (sorted keys, no timestamps) so identical inputs produce
identical bytes; --pretty indents, --timing adds wall-clock numbers (off by
default to keep reports reproducible).  Exit codes: 0 ok, 1 invalid input or
resource cap, 2 internal cross-check failure (a violated theorem is a bug
and must be loud).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .chiopt import Box, default_cap_cycle, laufer_fundamental_cycle, min_chi_box, \
    min_chi_effective
from .errors import AbeldimError, InconsistentOracle
from .examples import REGISTRY, builtin_graph
from .generic import bound_report, check_recipe, codim_generic, d_generic, \
    h1_generic, is_dominant, twisted_h1_lower_bounds
from .lattice import ZERO, canonical_cycle, chi, cycle_from_json_dict, \
    determinant, estar_combination_of, estar_from_json_dict, \
    graph_from_json_dict, graph_to_json_dict, load_json
from .pattern import closed_form_min, run_pattern_induction, test_first, test_second
from .superisolated import si_dim, si_gs, si_pg, si_test_function, \
    si_twisted_dim, si_twisted_test_function

_INPUT_ERRORS = (AbeldimError, FileNotFoundError, json.JSONDecodeError,
                 ValueError, KeyError)


def _load_graph(args):
    if getattr(args, "example", None):
        params = {}
        if args.b is not None:
            params["b"] = args.b
        if args.branches is not None:
            params["branches"] = args.branches
        return builtin_graph(args.example, **params)
    if getattr(args, "graph", None):
        return graph_from_json_dict(load_json(args.graph))
    raise ValueError("provide --graph FILE or --example NAME")


def _load_Z(args, G):
    if getattr(args, "Z", None):
        Z = cycle_from_json_dict(load_json(args.Z), G)
        return Z
    mult = args.Z_auto if getattr(args, "Z_auto", None) is not None else 4
    return default_cap_cycle(G, mult=mult)


def _load_lprime(args, G):
    if getattr(args, "lprime", None):
        return estar_from_json_dict(load_json(args.lprime), G)
    if getattr(args, "lprime_zmin", False):
        return estar_combination_of(G, laufer_fundamental_cycle(G))
    raise ValueError("provide --lprime FILE or --lprime-zmin")


def _emit(args, payload):
    payload["version"] = __version__
    text = json.dumps(payload, sort_keys=True,
                      indent=2 if args.pretty else None)
    print(text)


def _graph_echo(G):
    return graph_to_json_dict(G)


# ---------------------------------------------------------------------------

def cmd_check(args):
    t0 = time.time()
    G = _load_graph(args)
    zmin = laufer_fundamental_cycle(G)
    payload = {
        "command": "check",
        "valid": True,
        "tree": True,
        "negative_definite": True,
        "vertices": len(G.vertices),
        "edges": len(G.edges),
        "det": determinant(G),
        "Z_K": canonical_cycle(G).to_json_dict(),
        "Z_min": zmin.to_json_dict(),
        "chi_Z_min": chi(G, zmin),
        "graph": _graph_echo(G),
    }
    if args.timing:
        payload["timing_sec"] = round(time.time() - t0, 3)
    _emit(args, payload)
    return 0


def cmd_dim(args):
    t0 = time.time()
    G = _load_graph(args)
    Z = _load_Z(args, G)
    lp = _load_lprime(args, G)
    methods = ["direct", "form3", "first", "second"] if args.method == "all" \
        else [args.method]

    values = {}
    for m in methods:
        if m in ("direct", "form3"):
            values[m] = d_generic(G, Z, lp, method=m)
        else:
            tau = test_first(G, Z, lp) if m == "first" else test_second(G, Z, lp)
            table = run_pattern_induction(tau)
            d0 = table.d0(tau)
            cf = closed_form_min(tau)
            if cf != d0:
                raise InconsistentOracle(
                    f"{m} algorithm: induction {d0} != closed form {cf}")
            values[m] = d0

    distinct = set(values.values())
    if len(distinct) > 1:
        raise InconsistentOracle(f"method disagreement: {values}")
    d = distinct.pop()
    h1Z = h1_generic(G, Z)
    cod, wit = codim_generic(G, Z, lp, method="dp", with_witness=True)
    if d + cod != h1Z:
        raise InconsistentOracle(f"d + codim = {d}+{cod} != h1 = {h1Z}")

    payload = {
        "command": "dim",
        "inputs": {"Z": Z.to_json_dict(), "lprime_estar": dict(sorted(lp.a.items())),
                   "graph": _graph_echo(G)},
        "methods": values,
        "d": d,
        "codim": cod,
        "h1": h1Z,
        "witness_Z1": wit.to_json_dict(),
        "dominant": is_dominant(G, Z, lp),
        "constant": d == 0,
    }
    if args.timing:
        payload["timing_sec"] = round(time.time() - t0, 3)
    _emit(args, payload)
    return 0


def cmd_bounds(args):
    t0 = time.time()
    G = _load_graph(args)
    Z = _load_Z(args, G)
    lp = _load_lprime(args, G)

    rep = bound_report(G, Z, lp)
    rec_a, rec_b = check_recipe(G, Z, lp)
    minus_lp = lp.minus_lprime(G)
    twisted = twisted_h1_lower_bounds(G, Z, lp) if minus_lp.is_integral() else None
    eff = min_chi_effective(G, shift=ZERO, strict=True)

    payload = {
        "command": "bounds",
        "inputs": {"Z": Z.to_json_dict(), "lprime_estar": dict(sorted(lp.a.items())),
                   "graph": _graph_echo(G)},
        "d": rep.d,
        "codim": rep.codim,
        "T": rep.T,
        "t": rep.t,
        "t_Z": rep.t_Z,
        "dominant": rep.dominant,
        "constant": rep.constant,
        "recipe": {"a": rec_a, "b": rec_b},
        "twisted_h1_lower_bound": twisted,
        "min_chi_positive": eff.value,
        "p_g_generic": 1 - eff.value,
    }
    if args.timing:
        payload["timing_sec"] = round(time.time() - t0, 3)
    _emit(args, payload)
    return 0


def cmd_superisolated(args):
    t0 = time.time()
    d, k, k0 = args.d, args.k, args.k0
    by_min = min(k * s + _binom3(d - s) for s in range(0, d - 1))
    value = si_dim(d, k)
    payload = {
        "command": "superisolated",
        "d": d, "k": k,
        "p_g": si_pg(d),
        "dim": value,
        "dim_min_form": by_min,
        "g_s": [si_gs(d, s) for s in range(0, d - 1)],
    }
    if k >= 1:
        tau = si_test_function(d, k)
        engine = closed_form_min(tau)
        table = run_pattern_induction(tau)
        if engine != value or table.d0(tau) != value:
            raise InconsistentOracle(
                f"pattern engine got {engine}/{table.d0(tau)}, closed form {value}")
        payload["engine_dim"] = engine
    if k0 is not None:
        tvalue = si_twisted_dim(d, k, k0)
        payload["k0"] = k0
        payload["twisted_dim"] = tvalue
        if k >= 1:
            ttau = si_twisted_test_function(d, k, k0)
            tengine = closed_form_min(ttau)
            if tengine != tvalue:
                raise InconsistentOracle(
                    f"twisted engine got {tengine}, closed form {tvalue}")
            payload["engine_twisted_dim"] = tengine
    if args.timing:
        payload["timing_sec"] = round(time.time() - t0, 3)
    _emit(args, payload)
    return 0


def _binom3(n):
    return n * (n - 1) * (n - 2) // 6 if n >= 3 else 0


def cmd_examples(args):
    payload = {
        "command": "examples",
        "examples": {name: desc for name, (_fn, desc) in sorted(REGISTRY.items())},
    }
    _emit(args, payload)
    return 0


# ---------------------------------------------------------------------------

def _add_graph_args(p):
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--example", help="builtin example name (see `abeldim examples`)")
    p.add_argument("--b", type=int, default=None, help="central decoration for builtins")
    p.add_argument("--branches", type=int, default=None, help="branch count for `star`")


def _add_zl_args(p):
    p.add_argument("--Z", help="cycle JSON file")
    p.add_argument("--Z-auto", dest="Z_auto", type=int, nargs="?", const=4,
                   default=None, help="use the 'Z >> 0' cap cycle (optional multiplier)")
    p.add_argument("--lprime", help="E*-combination JSON file for -l'")
    p.add_argument("--lprime-zmin", dest="lprime_zmin", action="store_true",
                   help="take -l' = Z_min")


def build_parser():
    ap = argparse.ArgumentParser(prog="abeldim",
                                 description="Abel-map image dimensions on plumbing graphs")
    ap.add_argument("--version", action="version", version=f"abeldim {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, fn in (("check", cmd_check), ("dim", cmd_dim), ("bounds", cmd_bounds)):
        p = sub.add_parser(name)
        _add_graph_args(p)
        if name != "check":
            _add_zl_args(p)
        if name == "dim":
            p.add_argument("--method", default="all",
                           choices=["direct", "form3", "first", "second", "all"])
        p.add_argument("--pretty", action="store_true")
        p.add_argument("--timing", action="store_true")
        p.set_defaults(fn=fn)

    psi = sub.add_parser("superisolated")
    psi.add_argument("--d", type=int, required=True)
    psi.add_argument("--k", type=int, required=True)
    psi.add_argument("--k0", type=int, default=None)
    psi.add_argument("--pretty", action="store_true")
    psi.add_argument("--timing", action="store_true")
    psi.set_defaults(fn=cmd_superisolated)

    pe = sub.add_parser("examples")
    pe.add_argument("--pretty", action="store_true")
    pe.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except InconsistentOracle as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)},
                         sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
