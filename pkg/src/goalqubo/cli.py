"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 ``solve`` found
no satisficing vector.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import nullcontext
from dataclasses import replace
from pathlib import Path

from . import __version__
from .instances import FormatError, GeneratorSpec, format_solutions, generate, load_bks, read_solutions
from .landscape import profile_rows
from .metrics import diversity_report
from .oracle import count_local_optima, enumerate_satisficing
from .qubo_core import MAXIMIZE, MINIMIZE, ParseError, parse_instance, serialize_instance
from .quadratization import format_aux_map, reduce_to_qubo, square_objective
from .tabu_search import (
    ORDERINGS,
    TENURE_POLICIES,
    SolverConfig,
    derive_seed,
    run,
    run_parallel_targets,
)
from .targets import (
    Exact,
    Interval,
    lexicographic_interval,
    parse_target,
    target_from_pct,
)

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_EMPTY = 0, 1, 2, 3
SENSES = {"min": MINIMIZE, "max": MAXIMIZE}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_instance(path, sense, name=None):
    path = Path(path)
    with path.open() as fh:
        return parse_instance(fh, SENSES[sense], name or path.stem)


def _add_instance(p):
    p.add_argument("-i", "--instance", required=True, help="instance file (n m header, 1-based i j q)")
    p.add_argument("--sense", choices=SENSES, default="max",
                   help="objective sense of the file (default max, as for ORLIB bqp)")


def _add_target(p, multiple=False):
    p.add_argument("--exact", type=int, metavar="T")
    p.add_argument("--interval", type=int, nargs=2, metavar=("LB", "UB"))
    p.add_argument("--lex", type=int, nargs=2, metavar=("FSTAR", "DELTA"))
    if multiple:
        p.add_argument("--pct", metavar="P", help="fraction of the best-known value, e.g. 0.80")
        p.add_argument("--bks", metavar="FILE", help="best-known values, 'name value' per line")
        p.add_argument("--name", help="instance name for --bks lookup (default: file stem)")
        p.add_argument("--target", action="append", default=[], metavar="SPEC",
                       help="exact:T, interval:LB:UB, lex:F:D or pct:P; repeat for parallel runs")


def _targets(args, inst):
    forms = []
    if args.exact is not None:
        forms.append(Exact(args.exact))
    if args.interval is not None:
        forms.append(Interval(*args.interval))
    if args.lex is not None:
        forms.append(lexicographic_interval(*args.lex))
    specs = list(getattr(args, "target", []) or [])
    pct = getattr(args, "pct", None)
    needs_bks = pct is not None or any(s.startswith("pct:") for s in specs)
    bks = None
    if needs_bks:
        if not args.bks:
            raise UsageError("--pct needs --bks")
        table = load_bks(args.bks, inst.sense)
        name = args.name or inst.name
        if name not in table:
            raise UsageError(f"instance {name!r} not in {args.bks}")
        bks = table[name].value
    if pct is not None:
        forms.append(Exact(target_from_pct(bks, pct)))
    forms.extend(parse_target(s, bks) for s in specs)
    return forms


def _out_paths(out, count):
    if out is None:
        return [None] * count
    if count == 1:
        return [Path(out)]
    return [Path(f"{out}.{k}") for k in range(count)]


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def cmd_solve(args) -> int:
    if args.replay:
        manifest = json.loads(Path(args.replay).read_text())
        return _solve_from(manifest, args.out or manifest["outputs"]["solutions"], args.trace)

    inst = _load_instance(args.instance, args.sense, args.name)
    targets = _targets(args, inst)
    if not targets:
        raise UsageError("give a target: --exact, --interval, --pct, --lex or --target")
    if args.iters is None and args.time is None:
        raise UsageError("give --iters and/or --time")
    manifest = {
        "tool": "goalqubo",
        "version": __version__,
        "instance": str(Path(args.instance).resolve()),
        "sense": args.sense,
        "name": inst.name,
        "targets": [str(t) for t in targets],
        "config": {
            "tenure": args.tenure,
            "tenure_policy": args.tenure_policy,
            "iter_limit": args.iters,
            "time_limit_ms": args.time,
            "seed": args.seed,
            "aspiration": args.aspiration,
            "start": args.start,
        },
        "order": args.order,
    }
    paths = _out_paths(args.out, len(targets))
    return _solve_from(manifest, args.out, args.trace, inst=inst, targets=targets,
                       manifest_path=args.manifest, paths=paths)


def _solve_from(manifest, out, trace_path, inst=None, targets=None, manifest_path=None,
                paths=None) -> int:
    replay = inst is None
    if replay:
        inst = _load_instance(manifest["instance"], manifest["sense"], manifest["name"])
        targets = [parse_target(t) for t in manifest["targets"]]
        paths = _out_paths(out, len(targets))
    c = manifest["config"]
    iters = manifest["summary"]["iterations"] if replay else c["iter_limit"]
    cfg = SolverConfig(
        tenure=c["tenure"], iter_limit=iters, time_limit=None if replay else c["time_limit_ms"],
        seed=c["seed"], aspiration=c["aspiration"], start=c["start"],
        tenure_policy=c["tenure_policy"],
    )

    order = manifest["order"]
    t0 = time.perf_counter()
    if len(targets) == 1:
        ctx = open(trace_path, "w") if trace_path else nullcontext()
        with ctx as trace:
            results = [run(inst, targets[0], cfg, ordering=order, trace=trace)]
    elif replay:
        # each target replays its own recorded iteration count
        per = manifest["summary"]["per_target"]
        results = [
            run(inst, t, replace(cfg, seed=derive_seed(cfg.seed, k), iter_limit=per[k]["iterations"]),
                ordering=order)
            for k, t in enumerate(targets)
        ]
    else:
        by_target = run_parallel_targets(inst, targets, cfg, ordering=order)
        results = [by_target[t] for t in targets]
    wall = (time.perf_counter() - t0) * 1e3

    for S, path in zip(results, paths):
        _emit(format_solutions(S), path)

    manifest = dict(manifest)
    manifest["outputs"] = {"solutions": str(out) if out is not None else None,
                           "files": [str(p) if p else None for p in paths]}
    manifest["wall_time_ms"] = round(wall, 3)
    manifest["summary"] = {
        "iterations": max(S.iterations for S in results),
        "per_target": [
            {"target": S.target, "unique_solutions": len(S), "best_af": str(S.best_af),
             "iterations": S.iterations}
            for S in results
        ],
    }
    if manifest_path is None and out is not None and not replay:
        manifest_path = f"{out}.manifest.json"
    if manifest_path is not None:
        Path(manifest_path).write_text(json.dumps(manifest, indent=2) + "\n")
    for S in results:
        print(f"{S.target}: {len(S)} unique solutions, best AF {S.best_af}, "
              f"{S.iterations} iterations", file=sys.stderr)
    return EXIT_OK if any(len(S) for S in results) else EXIT_EMPTY


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance, args.sense)
    if args.count_optima is not None:
        print(count_local_optima(inst, args.count_optima, strict=args.strict))
        return EXIT_OK
    targets = _targets(args, inst)
    if len(targets) != 1:
        raise UsageError("give exactly one of --exact, --interval, --lex")
    S = enumerate_satisficing(inst, targets[0]).reordered(args.order)
    for r in S:
        print(f"{r.x} {r.f}")
    return EXIT_OK


def cmd_profile(args) -> int:
    ls = args.l if args.l else list(range(0, args.n + 1))
    counts = None
    if args.instance:
        inst = _load_instance(args.instance, args.sense)
        if inst.n != args.n:
            raise UsageError(f"instance has n={inst.n}, not {args.n}")
        counts = {l: count_local_optima(inst, l) for l in ls if l >= 1}  # noqa: E741
    print("n,l,binomial_estimate,closed_form,oracle_count")
    for row in profile_rows(args.n, ls, counts):
        print(row)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GeneratorSpec(args.n, args.density, args.min, args.max, args.seed)
    _emit(serialize_instance(generate(spec)), Path(args.out) if args.out else None)
    return EXIT_OK


def cmd_stats(args) -> int:
    rep = diversity_report(read_solutions(args.solutions))
    if args.pretty:
        sys.stdout.write(rep.pretty())
    else:
        print(rep.csv_header())
        print(rep.csv_row())
    return EXIT_OK


def cmd_reduce(args) -> int:
    inst = _load_instance(args.instance, args.sense).minimization()
    t = args.exact * (1 if args.sense == "min" else -1)
    result = reduce_to_qubo(square_objective(inst, t), args.penalty)
    out = Path(args.out)
    out.write_text(serialize_instance(result.qubo))
    aux = Path(args.aux) if args.aux else out.with_name(out.name + ".aux")
    aux.write_text(format_aux_map(result))
    print(f"{result.qubo.n} variables ({result.aux_count} auxiliary), penalty {result.penalty}, "
          f"offset {result.offset}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="goalqubo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"goalqubo {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="tabu search for satisficing vectors")
    p.add_argument("-i", "--instance")
    p.add_argument("--sense", choices=SENSES, default="max")
    _add_target(p, multiple=True)
    p.add_argument("--tenure", type=int, default=10)
    p.add_argument("--tenure-policy", choices=TENURE_POLICIES, default="random")
    p.add_argument("--iters", type=int)
    p.add_argument("--time", type=float, metavar="MS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--aspiration", action="store_true")
    p.add_argument("--start", choices=("all_zero", "random"), default="all_zero")
    p.add_argument("--order", choices=ORDERINGS, default="obj-desc")
    p.add_argument("--out")
    p.add_argument("--trace", help="per-iteration trace: iter,flipped_var,f,af,tabu_count")
    p.add_argument("--manifest", help="manifest path (default: OUT.manifest.json)")
    p.add_argument("--replay", metavar="MANIFEST", help="re-run a recorded manifest")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive enumeration (n <= 24)")
    _add_instance(p)
    _add_target(p)
    p.add_argument("--order", choices=ORDERINGS, default="obj-desc")
    p.add_argument("--count-optima", type=int, metavar="L", help="count local minima of radius L")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("profile", help="local-optima estimates as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, action="append", help="radius; repeatable (default 0..n)")
    p.add_argument("-i", "--instance", help="add exact oracle counts for this instance")
    p.add_argument("--sense", choices=SENSES, default="min")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--density", type=float, default=0.1)
    p.add_argument("--min", type=int, default=-100)
    p.add_argument("--max", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("stats", help="diversity statistics of a solutions file")
    p.add_argument("solutions")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("reduce", help="Rosenberg quadratization of (x'Qx - t)^2")
    _add_instance(p)
    p.add_argument("--exact", type=int, required=True, metavar="T")
    p.add_argument("--penalty", type=int, metavar="M")
    p.add_argument("--out", required=True)
    p.add_argument("--aux", help="auxiliary map sidecar (default: OUT.aux)")
    p.set_defaults(func=cmd_reduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve" and not args.replay and not args.instance:
            raise UsageError("solve needs -i/--instance or --replay")
        return args.func(args)
    except UsageError as exc:
        print(f"goalqubo: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, FormatError) as exc:
        print(f"goalqubo: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"goalqubo: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
