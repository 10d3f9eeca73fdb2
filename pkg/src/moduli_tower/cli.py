"""Command line interface: ``moduli-tower <command> ...``.

Grammars
  rational   p/q or p (no decimals), e.g. 1/2
  subset     comma separated points, e.g. 1,2,3
  blocks     blocks separated by |, e.g. "1,2,3|4,5"; unlisted points are singletons
  curve      exactly four blocks, e.g. "1|2|3,4|5,6"
  weights    sym:<rational> or a comma list of n rationals
  level      --k K (K = 0 is the GIT quotient)

Exit codes: 0 success, 2 usage error, 3 domain error, 1 internal failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

from . import __version__
from .acceptance import run_all
from .core import Level, ModuliError, format_rational, parse_rational
from .divisors import (
    DivisorClass,
    a_alpha_class,
    boundary_class,
    canonical_class,
    picard_basis,
    picard_rank_formula,
    pullback_step,
    pullback_to_top,
    pushforward_step,
    symmetric_class,
    verify_basis_rank,
)
from .fcurves import FCurve, pair_class
from .git_stability import (
    CoincidencePattern,
    classify_pattern,
    count_patterns_by_class,
    count_singular_points,
    descends,
    stabilizer_weights,
)
from .hassett_trees import (
    CombCurveType,
    WeightData,
    boundary_divisor_inventory,
    contracted_divisors,
    enumerate_stable_types,
    reduce_type,
)
from .nef import ak_alpha_table, fnef_threshold, simpson_model
from .tower import blowup_center_description, quotient_ledger, schedule, stability_transitions

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class Output:
    """What a command produced: JSON data plus a human rendering."""

    def __init__(self, data, text: str | None = None, ok: bool = True):
        self.data = data
        self.text = text
        self.ok = ok


def _rational(text: str):
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _dump(data) -> str:
    return json.dumps(data, indent=2)


def _read_class(args) -> DivisorClass:
    if getattr(args, "class_file", None):
        with open(args.class_file, encoding="utf-8") as fh:
            return DivisorClass.from_json(fh.read())
    if getattr(args, "class_json", None):
        text = args.class_json
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                text = fh.read()
        return DivisorClass.from_json(text)
    raise ModuliError("no class given; use --class JSON, --class @file or --class-file")


def _class_output(c: DivisorClass) -> Output:
    lines = [f"{c.level} (n={c.n}), {len(c)} terms"]
    lines += [f"  D^{{{S}}}: {v.pretty()}" for S, v in c.items()]
    return Output(c.to_dict(), "\n".join(lines))


# -- git ----------------------------------------------------------------------------

def cmd_git_classify(args) -> Output:
    p = CoincidencePattern.parse(args.n, args.blocks)
    weights = [parse_rational(t) for t in args.weights.split(",")] if args.weights else None
    cls = classify_pattern(p, weights)
    stab = stabilizer_weights(p) if cls.closed_orbit and weights is None else None
    data = {"pattern": str(p), "tag": cls.tag.value, "closed_orbit": cls.closed_orbit, "weights": stab}
    text = f"{p}: {cls.tag.value}" + (" (closed orbit)" if cls.closed_orbit else "")
    return Output(data, text)


def cmd_git_count(args) -> Output:
    counts = count_patterns_by_class(args.n)
    rows = sorted(
        ({"tag": c.tag.value, "closed_orbit": c.closed_orbit, "count": v} for c, v in counts.items()),
        key=lambda r: (r["tag"], r["closed_orbit"]),
    )
    data = {"n": args.n, "classes": rows, "singular_points": count_singular_points(args.n)}
    text = "\n".join(f"{r['tag']}{' (closed)' if r['closed_orbit'] else ''}: {r['count']}" for r in rows)
    text += f"\nsingular points of the quotient: {data['singular_points']}"
    return Output(data, text)


def cmd_git_descends(args) -> Output:
    degrees = [int(t) for t in args.degrees.split(",")]
    ok = descends(degrees)
    return Output({"degrees": degrees, "descends": ok}, "descends" if ok else "does not descend")


# -- trees ----------------------------------------------------------------------------

def cmd_trees_enumerate(args) -> Output:
    A = WeightData.parse(args.n, args.weights)
    types = enumerate_stable_types(args.n, A)
    if args.count:
        by_edges: dict[int, int] = {}
        for t in types:
            by_edges[t.num_edges] = by_edges.get(t.num_edges, 0) + 1
        data = {"n": args.n, "total": len(types), "by_edges": {str(e): c for e, c in sorted(by_edges.items())}}
        text = f"{len(types)} stable types; by number of edges: " + ", ".join(
            f"{e}: {c}" for e, c in sorted(by_edges.items())
        )
        return Output(data, text)
    return Output([t.to_dict() for t in types], "\n".join(t.to_json() for t in types))


def cmd_trees_reduce(args) -> Output:
    with open(args.input, encoding="utf-8") as fh:
        t = CombCurveType.from_json(fh.read())
    A = WeightData.parse(t.n, args.source)
    B = WeightData.parse(t.n, args.target)
    r = reduce_type(t, A, B)
    return Output(r.to_dict(), r.to_json())


def cmd_trees_inventory(args) -> Output:
    inv = boundary_divisor_inventory(Level(args.n, args.k))
    data = {
        "n": args.n,
        "level": inv.level.tag(),
        "collision": len(inv.collision),
        "nodal": len(inv.nodal),
        "total": inv.total,
    }
    return Output(data, f"{inv.level}: {len(inv.collision)} collision + {len(inv.nodal)} nodal = {inv.total}")


def cmd_trees_contracted(args) -> Output:
    subsets = contracted_divisors(args.n, args.k)
    data = {"n": args.n, "k": args.k, "count": len(subsets), "subsets": [str(S) for S in subsets]}
    return Output(data, f"{len(subsets)} divisors contracted from level {args.k} to level {args.k - 1}")


# -- div ------------------------------------------------------------------------------

def cmd_div(args) -> Output:
    action = args.action
    if action == "canonical":
        return _class_output(canonical_class(Level(args.n, args.k)))
    if action == "boundary":
        return _class_output(boundary_class(Level(args.n, args.k)))
    if action == "symmetric":
        return _class_output(symmetric_class(Level(args.n, args.k), args.j))
    if action == "alpha":
        return _class_output(a_alpha_class(args.n, args.k))
    if action == "pullback":
        c = _read_class(args)
        return _class_output(pullback_step(c, args.to_k))
    if action == "pushforward":
        c = _read_class(args)
        return _class_output(pushforward_step(c, args.to_k))
    if action == "top":
        return _class_output(pullback_to_top(_read_class(args)))
    if action == "basis":
        level = Level(args.n, args.k)
        basis = picard_basis(level)
        data = basis.to_dict()
        expected = picard_rank_formula(level)
        if args.verify:
            rank, matches = verify_basis_rank(level)
            data.update({"verified_rank": rank, "expected": expected, "matches": matches})
            text = f"rank {rank} / expected {expected}: {'OK' if matches else 'MISMATCH'}"
            return Output(data, text, ok=matches)
        return Output(data, f"{len(basis)} generators: " + " ".join(str(S) for S in basis.generators))
    raise ModuliError(f"unknown div action {action!r}")


# -- pair, nef, lc --------------------------------------------------------------------

def cmd_pair(args) -> Output:
    C = FCurve.parse(args.n, args.curve)
    if args.a_alpha is not None:
        c = a_alpha_class(args.n, args.a_alpha)
    else:
        c = pullback_to_top(_read_class(args))
    value = pair_class(C, c)
    return Output({"curve": str(C), "pairing": str(value)}, value.pretty())


def cmd_nef_threshold(args) -> Output:
    report = fnef_threshold(args.n, args.k)
    data = report.to_dict()
    text = [f"F-nef threshold of A({args.k}, a) for n={args.n}: {data['threshold']}"]
    if report.witness is not None:
        text.append(f"witness curve {report.witness} (sizes {report.witness.sizes})")
    text.append(f"all F-curve pairings nonnegative on [{data['threshold']}, {data['upper']}]")
    text += [f"  C_{i}: {f.pretty()}" for i, f in report.table]
    return Output(data, "\n".join(text))


def cmd_nef_table(args) -> Output:
    table = ak_alpha_table(args.n, args.k)
    lines = [
        f"C_{r.i}: engine {r.engine.pretty()} | closed form {r.closed_form.pretty()}"
        + ("" if r.agrees else "  <- differs")
        for r in table.rows
    ]
    lines.append("all rows agree" if table.matches else "rows differ")
    return Output(table.to_dict(), "\n".join(lines))


def cmd_lc_model(args) -> Output:
    level = simpson_model(args.n, args.alpha)
    return Output({"n": args.n, "alpha": format_rational(args.alpha), "level": level.tag()}, str(level))


# -- tower ----------------------------------------------------------------------------

def cmd_tower_schedule(args) -> Output:
    rows = schedule(args.n)
    lines = [f"stage {r.stage}: |S|={r.center_size}, {r.component_count} components, codim {r.codim}, "
             f"+{r.rank_increment}" for r in rows]
    return Output({"n": args.n, "stages": [r.to_dict() for r in rows]}, "\n".join(lines))


def cmd_tower_ledger(args) -> Output:
    ledger = quotient_ledger(args.n)
    lines = [f"{'level':<16}{'rank':>8}{'recursive':>11}  source"]
    for r in ledger.rows:
        lines.append(f"{str(r.level):<16}{r.closed_form:>8}{r.recursive:>11}  {r.source}")
    lines.append(f"top expected 2^(n-1)-C(n,2)-1 = {ledger.top_expected}: {'OK' if ledger.consistent else 'MISMATCH'}")
    return Output(ledger.to_dict(), "\n".join(lines), ok=ledger.consistent)


def cmd_tower_transitions(args) -> Output:
    report = stability_transitions(args.n)
    lines = [f"quotient unchanged through stage {report.last_unchanged}"]
    for r in report.rows:
        tail = f" ({r.note})" if r.note else ""
        lines.append(f"stage {r.stage}: |S|={r.center_size} -> {r.level}{tail}")
    return Output(report.to_dict(), "\n".join(lines))


def cmd_tower_centers(args) -> Output:
    comps = blowup_center_description(args.n, args.k)
    data = {"n": args.n, "k": args.k, "count": len(comps), "components": [c.to_dict() for c in comps]}
    head = comps[0]
    text = f"{len(comps)} components, each {head.tag()} on {head.points} points, codim {head.codim}"
    return Output(data, text)


# -- verify ---------------------------------------------------------------------------

def cmd_verify(args) -> Output:
    if not args.all:
        raise ModuliError("only --all is supported")
    lines: list[str] = []
    results = run_all(args.max_n, log=None)
    rows = []
    for r in results:
        lines.append(r.line())
        rows.append({"criterion": r.number, "name": r.name, "passed": r.passed, "detail": r.detail})
    passed = all(r.passed for r in results)
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} passed")
    return Output({"max_n": args.max_n, "results": rows, "all_passed": passed}, "\n".join(lines), ok=passed)


# -- parser ---------------------------------------------------------------------------

def _add_n(p):
    p.add_argument("--n", type=int, required=True, help="number of marked points")


def _add_k(p, required=True):
    p.add_argument("--k", type=int, required=required, help="level (0 = GIT quotient)")


def _add_class(p):
    p.add_argument("--class", dest="class_json", help="DivisorClass JSON, or @path")
    p.add_argument("--class-file", help="path to a DivisorClass JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moduli-tower",
        description=__doc__.split("\n")[0],
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(group, name, func: Callable, help_text: str):
        p = group.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
        return p

    git = sub.add_parser("git", help="GIT stability of points on the line").add_subparsers(dest="action", required=True)
    p = leaf(git, "classify", cmd_git_classify, "classify a coincidence pattern")
    _add_n(p)
    p.add_argument("--blocks", required=True, help='e.g. "1,2,3|4,5,6"')
    p.add_argument("--weights", help="comma list of n rationals (default: all 1)")
    p = leaf(git, "count", cmd_git_count, "count all patterns by stability class")
    _add_n(p)
    p = leaf(git, "descends", cmd_git_descends, "parity test for O(a_1,...,a_n)")
    p.add_argument("--degrees", required=True, help="comma list of integers")

    trees = sub.add_parser("trees", help="weighted stable trees").add_subparsers(dest="action", required=True)
    p = leaf(trees, "enumerate", cmd_trees_enumerate, "all stable types for a weight vector")
    _add_n(p)
    p.add_argument("--weights", default="sym:1", help="sym:<rational> or comma list")
    p.add_argument("--count", action="store_true", help="print counts only")
    p = leaf(trees, "reduce", cmd_trees_reduce, "image of a type under a reduction morphism")
    p.add_argument("--in", dest="input", required=True, help="tree JSON file")
    p.add_argument("--from", dest="source", required=True, help="source weights")
    p.add_argument("--to", dest="target", required=True, help="target weights")
    p = leaf(trees, "inventory", cmd_trees_inventory, "boundary divisors of a level")
    _add_n(p)
    _add_k(p)
    p = leaf(trees, "contracted", cmd_trees_contracted, "divisors contracted from level k to k-1")
    _add_n(p)
    _add_k(p)

    p = sub.add_parser("div", help="divisor classes on the tower")
    p.set_defaults(func=cmd_div)
    p.add_argument("action", choices=["canonical", "boundary", "symmetric", "alpha", "pullback", "pushforward",
                                      "top", "basis"])
    p.add_argument("--n", type=int, help="number of marked points")
    _add_k(p, required=False)
    p.add_argument("--j", type=int, help="stratum size for 'symmetric'")
    p.add_argument("--to-k", type=int, help="target level for pullback/pushforward")
    p.add_argument("--verify", action="store_true", help="with 'basis': check the rank against F-curves")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    _add_class(p)

    p = sub.add_parser("pair", help="pair an F-curve with a divisor class")
    p.set_defaults(func=cmd_pair)
    _add_n(p)
    p.add_argument("--curve", required=True, help='e.g. "1|2|3,4|5,6"')
    p.add_argument("--a-alpha", type=int, help="use A(k, alpha) for this k")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    _add_class(p)

    nef = sub.add_parser("nef", help="F-nef thresholds").add_subparsers(dest="action", required=True)
    p = leaf(nef, "threshold", cmd_nef_threshold, "scan all F-curves against A(k, alpha)")
    _add_n(p)
    _add_k(p)
    p = leaf(nef, "table", cmd_nef_table, "vital curve pairings: engine and closed form")
    _add_n(p)
    _add_k(p)

    lc = sub.add_parser("lc", help="log canonical models").add_subparsers(dest="action", required=True)
    p = leaf(lc, "model", cmd_lc_model, "level realising the model of K + alpha D")
    _add_n(p)
    p.add_argument("--alpha", type=_rational, required=True, help="rational p/q")

    tower = sub.add_parser("tower", help="blow-up schedule and Picard ranks").add_subparsers(
        dest="action", required=True)
    p = leaf(tower, "schedule", cmd_tower_schedule, "blow-up stages of (P^1)^n")
    _add_n(p)
    p = leaf(tower, "ledger", cmd_tower_ledger, "Picard ranks of every level")
    _add_n(p)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p = leaf(tower, "transitions", cmd_tower_transitions, "which stages change the quotient")
    _add_n(p)
    p = leaf(tower, "centers", cmd_tower_centers, "center of the reduction from level k+1 to k")
    _add_n(p)
    _add_k(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.set_defaults(func=cmd_verify)
    p.add_argument("--all", action="store_true", help="run every check")
    p.add_argument("--max-n", type=int, default=12, help="largest n to use (default 12)")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    return parser


def _needs(args, *names):
    missing = [f"--{name.replace('_', '-')}" for name in names if getattr(args, name, None) is None]
    if missing:
        raise _Usage(f"{args.command} {getattr(args, 'action', '')}: missing {', '.join(missing)}")


class _Usage(Exception):
    pass


_DIV_NEEDS = {
    "canonical": ("n", "k"),
    "boundary": ("n", "k"),
    "symmetric": ("n", "k", "j"),
    "alpha": ("n", "k"),
    "pullback": ("to_k",),
    "pushforward": ("to_k",),
    "top": (),
    "basis": ("n", "k"),
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "div":
            _needs(args, *_DIV_NEEDS[args.action])
        out = args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"moduli-tower: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModuliError, ValueError, OSError) as exc:
        print(f"moduli-tower: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as exc:  # pragma: no cover - genuine bugs
        print(f"moduli-tower: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    as_json = args.json or getattr(args, "format", None) == "json"
    print(_dump(out.data) if as_json or out.text is None else out.text)
    return EXIT_OK if out.ok else EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
