"""Command-line entry point: ``tfpart <subcommand>``.

graph6 is read from stdin and written to stdout; results are JSON lines on
stdout; diagnostics go to stderr. Exit codes: 0 success, 2 size guard hit,
3 a proven bound came out violated, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from fractions import Fraction
from typing import Iterator, Sequence, TextIO

from . import __version__, flags, gen, graph6, heuristics, lab
from .errors import GuardExceeded, TfpartError
from .graphcore import Graph
from .solver import CostVector, Partition, SizeSpec, parse_norm, solve, solve_subset

EXIT_OK = 0
EXIT_GUARD = 2
EXIT_VIOLATION = 3
EXIT_USAGE = 64

log = logging.getLogger("tfpart")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else str(x)


def _emit(out: TextIO, data: dict) -> None:
    out.write(json.dumps(data) + "\n")


def _read_graphs(stream: TextIO) -> Iterator[tuple[str, Graph]]:
    for line in stream:
        text = line.strip()
        if text and not text.startswith("#"):
            yield text, graph6.decode(text)


def _partition_json(g: Graph, part: Partition) -> dict:
    return {"classes": [c.members() for c in part.classes()], "per_class": list(CostVector.of(g, part).per_class)}


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _n_range(text: str) -> range:
    lo, sep, hi = text.partition("..")
    try:
        return range(int(lo), int(hi if sep else lo) + 1)
    except ValueError:
        raise UsageError(f"bad --n-range {text!r}; use A..B") from None


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args, out: TextIO, inp: TextIO) -> int:
    workers = args.workers if args.workers is not None else lab.default_workers()
    guard = None if args.no_guard else args.guard
    graph6.write_lines(gen.enumerate_free(args.n, args.forbid, guard=guard, workers=workers), out)
    return EXIT_OK


def cmd_solve(args, out: TextIO, inp: TextIO) -> int:
    p = parse_norm(args.norm)
    for text, g in _read_graphs(inp):
        if args.alpha is not None:
            alpha = Fraction(args.alpha)
            m = math.floor(alpha * g.n)
            a, cost = solve_subset(g, m, args.objective, guard=args.guard)
            _emit(out, {"g6": text, "n": g.n, "alpha": str(alpha), "objective": args.objective,
                        "m": m, "cost": cost, "vertices": a.members()})
            continue
        spec = SizeSpec.parse(args.spec)
        part, cv = solve(g, spec, p, guard=args.guard)
        _emit(out, {"g6": text, "n": g.n, "spec": str(spec), "norm": args.norm,
                    "cost": cv.norm(p), **_partition_json(g, part)})
    return EXIT_OK


def _heur_one(args, g: Graph) -> dict:
    method = args.method
    if method == "ind-bisect":
        part = heuristics.independent_bisection(g)
    elif method == "nbhd":
        part = heuristics.neighborhood_bisection(g, args.vertex, trials=args.trials, seed=args.seed)
    elif method == "tri-ind":
        part = heuristics.tripartition_via_independent(g, seed=args.seed, trials=args.trials)
    elif method == "random-k":
        part = heuristics.random_balanced_kpartition(g, args.k, seed=args.seed, trials=args.trials,
                                                     p=parse_norm(args.norm))
    elif method == "biased":
        if args.alpha is None:
            raise UsageError("--method biased needs --alpha")
        res = heuristics.biased_unbalanced(g, Fraction(args.alpha), seed=args.seed, trials=args.trials)
        return {"cost": res.cost, "vertices": res.vertices.members()}
    elif method == "three-quarters":
        res = heuristics.three_quarters_sparse(g)
        return {"cost": res.cost, "vertices": res.vertices.members(), "certified": res.certified}
    else:
        raise UsageError(f"unknown method {method!r}")
    if part is None:
        return {"applicable": False}
    p = parse_norm(args.norm)
    return {"applicable": True, "cost": CostVector.of(g, part).norm(p), **_partition_json(g, part)}


def cmd_heur(args, out: TextIO, inp: TextIO) -> int:
    for text, g in _read_graphs(inp):
        _emit(out, {"g6": text, "n": g.n, "method": args.method, "seed": args.seed, **_heur_one(args, g)})
    return EXIT_OK


def _pattern(text: str) -> Graph:
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            return next(graph6.read_lines(fh))
    return graph6.decode(text)


def _params(items: Sequence[str]) -> dict[str, Fraction]:
    out = {}
    for item in items:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects name=value, got {item!r}")
        out[name.strip()] = Fraction(value.strip())
    return out


def cmd_flags(args, out: TextIO, inp: TextIO) -> int:
    modes = [m for m in (args.density, args.labeled, args.expected_cut, args.ineq) if m is not None]
    if len(modes) != 1:
        raise UsageError("flags needs exactly one of --density, --labeled, --expected-cut, --ineq")
    for text, g in _read_graphs(inp):
        row = {"g6": text, "n": g.n}
        if args.density is not None:
            row["density"] = _frac(flags.density(flags.Flag(_pattern(args.density)), g))
        elif args.labeled is not None:
            flag = flags.Flag.parse(args.labeled, [(0, 1)] if args.type_edge else [])
            if args.anchor is None:
                raise UsageError("--labeled needs --anchor")
            row.update(flag=args.labeled, anchor=_ints(args.anchor),
                       density=_frac(flags.labeled_density(flag, g, _ints(args.anchor))))
        elif args.expected_cut is not None:
            kind, _, verts = args.expected_cut.partition(":")
            if args.sizes is None:
                raise UsageError("--expected-cut needs --sizes")
            values = flags.expected_cut_cost(g, kind, _ints(verts), _ints(args.sizes))
            row.update(anchor_kind=kind, anchor=_ints(verts), sizes=_ints(args.sizes),
                       expected=[_frac(v) for v in values])
        else:
            rep = flags.inequality_report(g, args.ineq, _params(args.param), args.aggregate)
            row.update(ineq=rep.ineq_id, aggregate=rep.aggregate, residual=_frac(rep.value),
                       anchors_used=rep.anchors_used, anchors_skipped=rep.anchors_skipped)
            if rep.note:
                row["note"] = rep.note
        _emit(out, row)
    return EXIT_OK


def cmd_check(args, out: TextIO, inp: TextIO) -> int:
    claims = [c for c in args.claims.split(",") if c]
    for c in claims:
        lab.get_claim(c)
    params = lab.ClaimParams.make(alpha=args.alpha, r=args.r, t7_slack=args.t7_slack)
    workers = args.threads if args.threads is not None else lab.default_workers()
    graphs = None
    n_values: Sequence[int] = ()
    if args.stdin:
        graphs = (g for _, g in _read_graphs(inp))
    elif args.n_range is None:
        raise UsageError("check needs --n-range or --stdin")
    else:
        n_values = _n_range(args.n_range)
    forbid = args.forbid
    if forbid is None:
        forbid = 4 if claims and all(c.startswith("K4") for c in claims) else 3
    records: list[lab.CheckRecord] = []

    class _Tee:
        def write(self, line: str) -> None:
            data = json.loads(line)
            if "summary" not in data:
                records.append(lab.CheckRecord.from_json(data))
            out.write(line)

        def flush(self) -> None:
            out.flush()

    summary = lab.run_sweep(
        _Tee() if args.figures else out, n_values, forbid, claims, params,
        regular=args.regular, workers=workers, guard=None if args.no_guard else args.guard,
        resume=args.resume, graphs=graphs,
    )
    if args.figures:
        for path in _figures(records, args.resume, args.figures):
            print(f"figure: {path}", file=sys.stderr)
    if summary.proven_violations:
        for v in summary.violations:
            if v["proven"]:
                print(f"violation of proven bound {v['claim_id']} on {v['g6']} (n={v['n']}): review manually",
                      file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _figures(records: list, resume: str | None, out_dir: str) -> list[str]:
    from . import plotting

    if resume:
        with open(resume, encoding="utf-8") as fh:
            records = [lab.CheckRecord.from_json(d) for d in map(json.loads, filter(str.strip, fh))
                       if "summary" not in d]
    return plotting.plot_sweep(records, out_dir)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tfpart", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="store_true", help="print version and inequality catalog hash")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("gen", help="enumerate K_R-free graphs as graph6")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--forbid", type=int, default=3, help="forbidden clique size R")
    p.add_argument("--guard", type=int, default=gen.DEFAULT_GUARD)
    p.add_argument("--no-guard", action="store_true")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="exact optimum for each graph6 line on stdin")
    p.add_argument("--spec", default="balanced:2")
    p.add_argument("--norm", default="1")
    p.add_argument("--alpha", help="solve for a floor(alpha*n)-set instead of a partition")
    p.add_argument("--objective", choices=["sparse", "two_sided"], default="sparse")
    p.add_argument("--guard", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("heur", help="constructive heuristics")
    p.add_argument("--method", required=True,
                   choices=["ind-bisect", "nbhd", "tri-ind", "biased", "random-k", "three-quarters"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=16)
    p.add_argument("--vertex", type=int, default=0)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--alpha")
    p.add_argument("--norm", default="1")
    p.set_defaults(func=cmd_heur)

    p = sub.add_parser("flags", help="flag densities, expected cut costs and inequality residuals")
    p.add_argument("--density", metavar="H.g6", help="pattern as graph6 text or file")
    p.add_argument("--labeled", metavar="NAME", help="flag name such as lu2 or luu212")
    p.add_argument("--type-edge", action="store_true", help="labels 1 and 2 adjacent when the name omits them")
    p.add_argument("--anchor", help="comma-separated host vertices for --labeled")
    p.add_argument("--expected-cut", metavar="KIND:V,..", help="vertex:v, edge:u,v or edge_plus_nonneighbor:u,v,w")
    p.add_argument("--sizes", help="target class sizes for --expected-cut")
    p.add_argument("--ineq", help="inequality id from the catalog")
    p.add_argument("--param", action="append", default=[], help="override a parameter, name=value")
    p.add_argument("--aggregate", choices=list(flags.AGGREGATES), default="mean")
    p.set_defaults(func=cmd_flags)

    p = sub.add_parser("check", help="verify claims over enumerated graphs")
    p.add_argument("--claims", required=True)
    p.add_argument("--n-range", metavar="A..B")
    p.add_argument("--stdin", action="store_true", help="check graph6 lines from stdin instead")
    p.add_argument("--forbid", type=int)
    p.add_argument("--regular", action="store_true")
    p.add_argument("--resume", metavar="FILE")
    p.add_argument("--alpha")
    p.add_argument("--r", type=int)
    p.add_argument("--t7-slack")
    p.add_argument("--threads", type=int, help="worker processes (default: CUT_THREADS or CPU count)")
    p.add_argument("--guard", type=int, default=gen.DEFAULT_GUARD)
    p.add_argument("--no-guard", action="store_true")
    p.add_argument("--figures", metavar="DIR", help="also write per-claim PNG figures to DIR")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None, stdout: TextIO | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    out = stdout or sys.stdout
    inp = stdin or sys.stdin
    if args.version:
        out.write(f"tfpart {__version__} catalog-sha256 {flags.catalog_hash()}\n")
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, out, inp)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except GuardExceeded as exc:
        print(f"tfpart: guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (UsageError, TfpartError, ValueError, KeyError) as exc:
        print(f"tfpart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
