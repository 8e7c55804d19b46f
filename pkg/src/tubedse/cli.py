"""Command-line interface: ``tubedse <command> ...``.

Exit status: 0 on success, 1 when a check fails, 2 on invalid input or an
infeasible configuration.  JSON output uses sorted keys.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction

from .cocycle import MellinSeries, Phi, cocycle_identity_check, place_var
from .dse import (
    ConfigurationError,
    SpecError,
    check_gamma_equation,
    check_rge,
    counterexample_report,
    extract_gamma_beta,
    parse_spec,
    quasilinear_reduce,
    rio_coproduct_check,
    solve_analytic_oracle,
    solve_analytic_tubing,
    solve_combinatorial_closed,
    solve_combinatorial_fixpoint,
)
from .dse.checks import all_zero
from .dse.solvers import green_to_json, tree_coefficient, trees_to_json
from .hopf import ForestLC, check_cocycle
from .poly import Poly
from .trees import PrimitiveInfo, aut_order, enumerate_trees, forest_size, forests_up_to_size, parse_tree
from .tubings import TubingEvaluator, phi_tubing_naive, tubing_report


def _emit(obj, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(_text(obj) + "\n")


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            _text(v, indent) if isinstance(v, (dict, list)) else f"{pad}- {v}" for v in obj
        )
    return f"{pad}{obj}"


def _load_spec(args):
    if args.spec is None:
        raise ConfigurationError("a spec is required (--spec FILE or --spec -)")
    if args.spec == "-":
        text = sys.stdin.read()
    elif args.spec.lstrip().startswith("{"):
        text = args.spec
    else:
        with open(args.spec, encoding="utf-8") as fh:
            text = fh.read()
    spec = parse_spec(text)
    if getattr(args, "order", None) is not None:
        spec = spec.with_order(args.order)
    if getattr(args, "bind_random", False):
        spec = spec.bind_random(args.seed)
    return spec


def _tree_mellins(tree, spec=None, bind_random=False, seed=0) -> dict:
    """Mellin series for every decoration: from the spec when given, else
    symbolic with places read off the tree's edges."""
    if spec is not None:
        tree.check_legal(spec.prims)
        return dict(spec.mellin)
    places: dict = {}
    for v in tree.vertices():
        places.setdefault(v.label, set()).update(e for e, _ in v.children)
    out = {}
    for label, ps in places.items():
        ps = tuple(sorted(ps)) or ("e",)
        m = MellinSeries.symbolic(PrimitiveInfo(label, 1, "G", ps))
        out[label] = m.bind_random(seed) if bind_random else m
    return out


# -- commands ----------------------------------------------------------------

def cmd_trees(args):
    spec = _load_spec(args)
    prims = spec.prims
    rows = []
    for t in enumerate_trees(spec.primitives, max(spec.order, 1)) if spec.order else []:
        if not args.all and not tree_coefficient(t, prims):
            continue
        rows.append({
            "tree": t.to_text(),
            "weight": t.weight(prims),
            "equation": prims[t.label].equation,
            "vertices": t.size,
            "aut": aut_order(t),
            "coefficient": _frac(tree_coefficient(t, prims)),
        })
    return {"order": spec.order, "count": len(rows), "trees": rows}


def cmd_tubings(args):
    tree = parse_tree(args.tree)
    mellins = _tree_mellins(tree, _load_spec(args) if args.spec else None)
    rep = tubing_report(tree, mellins, emit_tubes=args.emit_tubes)
    if args.stats:
        bs: dict = {}
        for row in rep["tubings"]:
            bs[str(row["b"])] = bs.get(str(row["b"]), 0) + 1
        rep["stats"] = {"count": rep["count"], "b_distribution": bs}
    return rep


def cmd_phi(args):
    tree = parse_tree(args.tree)
    spec = _load_spec(args) if args.spec else None
    mellins = _tree_mellins(tree, spec, args.bind_random, args.seed)
    if args.method == "tubing":
        value = TubingEvaluator(mellins)(tree)
    elif args.method == "tubing-naive":
        value = phi_tubing_naive(tree, mellins)
    else:
        value = Phi(mellins)(tree)
    return {"tree": tree.to_text(), "method": args.method, "phi": value.to_text()}


def cmd_solve(args):
    spec = _load_spec(args)
    if args.method in ("fixpoint", "closed"):
        solver = solve_combinatorial_fixpoint if args.method == "fixpoint" else solve_combinatorial_closed
        return {"order": spec.order, "method": args.method, "trees": trees_to_json(solver(spec))}
    solver = solve_analytic_tubing if args.method == "tubing" else solve_analytic_oracle
    return {"order": spec.order, "method": args.method, "green": green_to_json(solver(spec))}


def _cocycle_suite(spec, max_size: int) -> dict:
    """Exhaustive 1-cocycle checks: every argument tuple of forests with at
    most ``max_size - 1`` vertices in total, and every scale monomial of
    degree at most ``max_size``."""
    forests = forests_up_to_size(spec.primitives, max_size - 1)
    checked = failed = 0
    for p in spec.primitives:
        for args in itertools.product(forests, repeat=len(p.places)):
            if sum(forest_size(f) for f in args) > max_size - 1:
                continue
            checked += 1
            if not check_cocycle(p, [ForestLC({f: Poly.const(1)}) for f in args]):
                failed += 1
    poly_checked = poly_failed = 0
    for p in spec.primitives:
        m = spec.mellin[p.label]
        for deg in range(max_size + 1):
            for alpha in m.alphas(deg):
                f = Poly.monomial({place_var(e): k for e, k in zip(p.places, alpha)})
                poly_checked += 1
                if not cocycle_identity_check(m, f):
                    poly_failed += 1
    return {"tree_cases": checked, "tree_failures": failed, "poly_cases": poly_checked, "poly_failures": poly_failed}


def cmd_check(args):
    spec = _load_spec(args)
    which = args.which
    if which == "cocycle":
        res = _cocycle_suite(spec, args.max_size)
        ok = res["tree_failures"] == 0 and res["poly_failures"] == 0
        return _verdict(which, ok, res)
    G = solve_analytic_tubing(spec) if which in ("rge", "gamma") else None
    if which == "rge":
        r = check_rge(G, extract_gamma_beta(G, spec), spec)
        return _verdict(which, all_zero(r), {i: [c.to_text() for c in s.coeffs] for i, s in r.items()})
    if which == "gamma":
        r = check_gamma_equation(spec, G, args.form)
        return _verdict(which, all_zero(r), {i: [c.to_text() for c in s.coeffs] for i, s in r.items()})
    n = min(args.n, spec.order)
    r = rio_coproduct_check(spec, n)
    return _verdict(which, all(r.values()), {f"{i}:{k}": v for (i, k), v in sorted(r.items())})


def _verdict(which, ok, detail):
    return {"check": which, "pass": bool(ok), "residuals" if which in ("rge", "gamma") else "detail": detail}


def cmd_quasilinear(args):
    spec = _load_spec(args)
    red = quasilinear_reduce(spec)
    g1 = solve_analytic_oracle(spec)
    g2 = solve_analytic_oracle(red)
    equal = all(g1[i] == g2[i] for i in spec.equations)
    return {"reduced": red.to_json(), "equal": equal, "order": spec.order, "pass": equal}


def cmd_counterexample(args):
    return counterexample_report(args.order, args.method)


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    ap = argparse.ArgumentParser(prog="tubedse", description="Exact Dyson-Schwinger solvers via trees and tubings.")
    sub = ap.add_subparsers(dest="command", required=True)

    def spec_opts(p, required=True):
        p.add_argument("--spec", required=required, help="spec JSON file, inline JSON, or - for stdin")
        p.add_argument("--order", type=int, help="override the truncation order")
        p.add_argument("--bind-random", action="store_true", help="bind unlisted Mellin coefficients to seeded rationals")
        p.add_argument("--symbolic", dest="bind_random", action="store_false", help="keep Mellin coefficients symbolic (default)")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("trees", parents=[common], help="list trees with their closed-form coefficients")
    spec_opts(p)
    p.add_argument("--all", action="store_true", help="include trees with coefficient 0")
    p.set_defaults(fn=cmd_trees)

    p = sub.add_parser("tubings", parents=[common], help="binary tubings of a tree")
    p.add_argument("--tree", required=True)
    spec_opts(p, required=False)
    p.add_argument("--emit-tubes", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.set_defaults(fn=cmd_tubings)

    p = sub.add_parser("phi", parents=[common], help="evaluate phi on a tree")
    p.add_argument("--tree", required=True)
    spec_opts(p, required=False)
    p.add_argument("--method", choices=("tubing", "tubing-naive", "recursive"), default="tubing")
    p.set_defaults(fn=cmd_phi)

    p = sub.add_parser("solve", parents=[common], help="solve a spec")
    spec_opts(p)
    p.add_argument("--method", choices=("tubing", "oracle", "fixpoint", "closed"), default="tubing")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("check", parents=[common], help="verify an identity")
    p.add_argument("which", choices=("rge", "gamma", "rio", "cocycle"))
    spec_opts(p)
    p.add_argument("--n", type=int, default=4, help="max coefficient for the rio check")
    p.add_argument("--form", choices=("operator", "functional"), default="operator")
    p.add_argument("--max-size", type=int, default=4, help="vertex bound for the cocycle check")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("quasilinear", parents=[common], help="reduce a quasi-linear spec and compare solutions")
    spec_opts(p)
    p.set_defaults(fn=cmd_quasilinear)

    p = sub.add_parser("counterexample", parents=[common], help="the two-place counterexample report")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--method", choices=("oracle", "tubing"), default="oracle")
    p.set_defaults(fn=cmd_counterexample)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        result = args.fn(args)
    except SpecError as exc:
        _emit({"error": "spec", "pointer": exc.pointer, "message": exc.message}, "json", err)
        return 2
    except (ConfigurationError, ValueError, OSError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)}, "json", err)
        return 2
    _emit(result, args.format, out)
    if isinstance(result, dict) and result.get("pass") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
