"""Command-line harness.

Subcommands:
  gen      write an instance file from a generator spec
  solve    run one solver on one instance
  bench    execute a benchmark config (JSON) and write result files
  report   turn results.jsonl into a summary CSV and optional SVG chart
  selftest run the acceptance-criteria suites; nonzero exit on failure

The canonical config format is JSON (documented in the README).
"""

import argparse
import json
import sys

from . import acceptance
from .bench import (
    SOLVERS, bench, build_instance, default_config, run_solver,
    write_summary_csv, write_svg_chart, ResultRow,
)
from .instances import save_instance


def _parse_graph(text):
    """grid:I:5x5 | clustered:4x5:6  ->  ["grid", [...]] spec."""
    parts = text.split(":")
    if parts[0] == "grid":
        gtype = parts[1]
        rows, cols = parts[2].split("x")
        return ["grid", [gtype, int(rows), int(cols)]]
    if parts[0] == "clustered":
        k, size = parts[1].split("x")
        inter = int(parts[2]) if len(parts) > 2 else int(k)
        return ["clustered", [int(k), int(size), inter]]
    raise argparse.ArgumentTypeError(f"unknown graph spec {text!r}")


def _cmd_gen(args):
    if args.spec_json:
        spec = json.loads(args.spec_json)
    else:
        if args.family in ("worstcase_a", "worstcase_b"):
            spec = {"kind": "worstcase", "variant": args.family[-1],
                    "n": args.n or 10}
        elif args.family.startswith("lowerbound"):
            spec = {"kind": "lowerbound", "paths": args.paths,
                    "path_len": args.path_len, "seed": args.seed,
                    "which": args.family.rsplit("_", 1)[-1]}
        elif args.family == "greedy_adversarial":
            spec = {"kind": "greedy_adversarial", "n": args.n or 8}
        elif args.family == "convolution_witness":
            spec = {"kind": "convolution_witness"}
        else:
            if not args.graph:
                raise SystemExit("--graph required for standard families")
            spec = {"kind": "standard", "graph": _parse_graph(args.graph),
                    "family": args.family, "seed": args.seed}
    inst = build_instance(spec)
    save_instance(inst, args.out)
    print(f"wrote {args.out} ({inst.family}, n={inst.graph.n}, "
          f"m={inst.graph.num_elements} elements)")
    return 0


def _cmd_solve(args):
    inst = build_instance({"kind": "file", "path": args.instance})
    params = {}
    if args.iters is not None:
        params["iters"] = args.iters
        params["max_iters"] = args.iters
    mode = args.mode or inst.mode
    rep = run_solver(inst, args.solver, mode=mode, seed=args.seed,
                     params=params)
    out = {
        "solver": args.solver,
        "mode": mode,
        "cost": rep.cost,
        "cut_elements": sorted(rep.solution.elements(inst.graph)),
        "iterations": rep.iterations,
        "oracle_calls": rep.oracle_calls,
        "wall_time_ms": round(rep.wall_time * 1000.0, 3),
        "surrogate_value": rep.surrogate_value,
    }
    print(json.dumps(out, sort_keys=True, indent=1))
    return 0


def _cmd_bench(args):
    if args.config:
        with open(args.config) as fh:
            config = json.load(fh)
    else:
        config = default_config()
    if args.output_dir:
        config["output_dir"] = args.output_dir

    def progress(done, total, task):
        if args.verbose:
            print(f"[{done}/{total}] {task[0]} {task[3]}", file=sys.stderr)

    rows = bench(config, progress=progress)
    print(f"{len(rows)} result rows -> {config.get('output_dir', 'bench_out')}")
    return 0


def _cmd_report(args):
    rows = []
    with open(args.results) as fh:
        for line in fh:
            obj = json.loads(line)
            rows.append(ResultRow(
                instance=obj["instance"], family=obj["family"],
                solver=obj["solver"], seed=obj["seed"], cost=obj["cost"],
                best_known=obj["best_known"], factor=obj["factor"],
                bound=obj.get("bound"), oracle_calls=obj["oracle_calls"],
                iterations=obj["iterations"]))
    if args.timings:
        timing = {}
        with open(args.timings) as fh:
            for line in fh:
                obj = json.loads(line)
                timing[(obj["instance"], obj["solver"], obj["seed"])] = obj["wall_time_ms"]
        for row in rows:
            row.wall_time_ms = timing.get((row.instance, row.solver, row.seed), 0.0)
    write_summary_csv(rows, args.csv)
    print(f"wrote {args.csv}")
    if args.svg:
        write_svg_chart(rows, args.svg)
        print(f"wrote {args.svg}")
    return 0


def _cmd_selftest(args):
    results = acceptance.run_all(fast=args.fast)
    failed = [r for r in results if not r.passed]
    return 1 if failed else 0


def main(argv=None):
    parser = argparse.ArgumentParser(prog="coopcut",
                                     description="minimum cooperative cut toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--family", required=False, default="",
                   help="cost family or special instance name")
    p.add_argument("--graph", help="grid:I:5x5 or clustered:4x5:6")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, help="size for worstcase/greedy_adversarial")
    p.add_argument("--paths", type=int, default=3, help="lowerbound paths")
    p.add_argument("--path-len", type=int, default=10, help="lowerbound path length")
    p.add_argument("--spec-json", help="raw instance spec as JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("solve", help="run one solver on one instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--solver", required=True, choices=sorted(SOLVERS))
    p.add_argument("--mode", choices=["st", "global"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, help="relaxation/semigradient iterations")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench", help="run a benchmark config")
    p.add_argument("--config", help="JSON config; omitted -> the default desk benchmark")
    p.add_argument("--output-dir")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("report", help="summarize results.jsonl")
    p.add_argument("--results", required=True)
    p.add_argument("--timings", help="timings.jsonl for the mean_time_ms column")
    p.add_argument("--csv", required=True)
    p.add_argument("--svg")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("selftest", help="run the acceptance criteria")
    p.add_argument("--fast", action="store_true",
                   help="skip the full desk benchmark (criterion 10)")
    p.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
