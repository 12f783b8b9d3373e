"""Command line entry point: ``hubcover solve|verify|reduce|lift|gen|bench``.

Exit codes: 0 success, 1 infeasible instance or failed verification,
2 usage or format errors.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from hubcover import formats
from hubcover.approx import (
    approx_bounded_enumeration,
    approx_taskwise,
    solve_variant3_greedy,
)
from hubcover.bench import ALGORITHMS, rows_to_csv, run_bench
from hubcover.errors import HubCoverError, InfeasibleError
from hubcover.exact import solve_exact
from hubcover.feasibility import verify_solution
from hubcover.generators import FAMILIES, GeneratorSpec, generate_instance
from hubcover.model import HcpInstance, QueensInstance, SetCoverInstance, Solution
from hubcover.reductions import (
    ReductionRecord,
    lift_solution,
    parse_any,
    queens_to_sa2,
    reduce_v2_to_v1,
    reduce_v3_to_v2,
    serialize_any,
    setcover_to_v3,
    v3_to_setcover,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _load_instance(path: str) -> HcpInstance:
    return formats.parse_instance(_read(path))


def _print_solution(instance: HcpInstance, sol: Solution, label: str) -> None:
    hubs = " ".join(instance.hubs[h] for h in sol.sorted_hubs)
    print(f"status {label}")
    print(f"cost {formats.format_rational(sol.cost)}")
    print(f"open {hubs}" if hubs else "open")


def cmd_solve(args) -> int:
    instance = _load_instance(args.file)
    if args.algo == "exact":
        result = solve_exact(instance, workers=args.workers)
        sol, label = result.solution, "optimal"
    else:
        try:
            if args.algo == "taskwise":
                sol = approx_taskwise(instance)
            elif args.algo == "bounded-enum":
                sol = approx_bounded_enumeration(instance, args.k)
            else:
                sol = solve_variant3_greedy(instance)
        except InfeasibleError:
            sol = None
        label = "feasible"
    if sol is None:
        print("infeasible")
        return EXIT_FAIL
    _print_solution(instance, sol, label)
    if args.out:
        _write(args.out, formats.serialize_solution(instance, sol))
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    solution = formats.parse_solution(_read(args.solution), instance)
    report = verify_solution(instance, solution)
    print(report)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_reduce(args) -> int:
    source = parse_any(_read(args.file))
    to = args.to
    if to == "v1" and isinstance(source, HcpInstance):
        record = reduce_v2_to_v1(source)
    elif to == "v2" and isinstance(source, HcpInstance):
        b0 = None
        if args.b0 is not None:
            if args.b0 not in source.branches:
                raise UsageError(f"--b0 {args.b0} is not a branch")
            b0 = source.branches.index(args.b0)
        record = reduce_v3_to_v2(source, b0, args.allocation)
    elif to == "setcover" and isinstance(source, HcpInstance):
        record = v3_to_setcover(source)
    elif to == "v3" and isinstance(source, SetCoverInstance):
        record = setcover_to_v3(source)
    elif to == "queens-sa2" and isinstance(source, QueensInstance):
        record = queens_to_sa2(source)
    else:
        raise UsageError(f"cannot reduce a {type(source).__name__} to {to}")
    _write(args.out, serialize_any(record.target))
    map_path = args.map or args.out + ".map.json"
    _write(map_path, record.to_json())
    print(f"wrote {args.out} and {map_path}")
    return EXIT_OK


def cmd_lift(args) -> int:
    record = ReductionRecord.from_json(_read(args.mapping))
    text = _read(args.target_solution)
    if isinstance(record.target, SetCoverInstance):
        target_sol = formats.parse_cover(text, record.target)
    else:
        target_sol = formats.parse_solution(text, record.target)
        report = verify_solution(record.target, target_sol)
        if not report.ok:
            print(report)
            return EXIT_FAIL
    lifted = lift_solution(record, target_sol)
    if isinstance(record.source, HcpInstance):
        out = formats.serialize_solution(record.source, lifted)
    elif isinstance(record.source, SetCoverInstance):
        out = formats.serialize_cover(record.source, lifted)
    else:
        out = formats.serialize_placement(record.source.n, lifted)
    _write(args.out, out)
    print(f"wrote {args.out}")
    return EXIT_OK


def _spec_from_args(args) -> GeneratorSpec:
    return GeneratorSpec(
        family=args.family,
        branches=args.branches,
        hubs=args.hubs,
        cost_min=args.cost_min,
        cost_max=args.cost_max,
        task_density=args.task_density,
        allocation=args.allocation,
        alpha=Fraction(args.alpha),
        phi=None if args.phi is None else Fraction(args.phi),
        phi_quantile=args.phi_quantile,
        grid=args.grid,
        edge_prob=args.edge_prob,
        hub_edge_prob=args.hub_edge_prob,
        capacity=args.capacity,
        n=args.n,
        placed=args.placed,
    )


def cmd_gen(args) -> int:
    instance = generate_instance(_spec_from_args(args), args.seed)
    _write(args.out, formats.serialize_instance(instance))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_bench(args) -> int:
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    rows = run_bench(_spec_from_args(args), args.count, args.seed, algos, args.k, args.workers)
    text = rows_to_csv(rows, include_time=not args.no_time)
    if args.csv:
        _write(args.csv, text)
        print(f"wrote {len(rows)} rows to {args.csv}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _generator_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--branches", type=int, default=4)
    p.add_argument("--hubs", type=int, default=4)
    p.add_argument("--cost-min", type=int, default=1)
    p.add_argument("--cost-max", type=int, default=1)
    p.add_argument("--task-density", type=float, default=0.5)
    p.add_argument("--allocation", choices=("single", "multi"), default="multi")
    p.add_argument("--alpha", default="1", help="rational, e.g. 1/2")
    p.add_argument("--phi", default=None, help="fixed threshold (euclidean-v1)")
    p.add_argument("--phi-quantile", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--hub-edge-prob", type=float, default=0.5)
    p.add_argument("--capacity", type=int, default=None)
    p.add_argument("--n", type=int, default=4, help="board size (queens-derived)")
    p.add_argument("--placed", type=int, default=1, help="pre-placed queens (queens-derived)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hubcover", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an HCPI instance")
    p.add_argument("file")
    p.add_argument("--algo", choices=("exact", "taskwise", "bounded-enum", "greedy-v3"),
                   default="exact")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify an HCPS solution")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reduce", help="transform an instance into another problem")
    p.add_argument("file")
    p.add_argument("--to", required=True, choices=("v1", "v2", "v3", "setcover", "queens-sa2"))
    p.add_argument("--b0", help="branch name used as the common task end (--to v2)")
    p.add_argument("--allocation", choices=("single", "multi"), default="multi")
    p.add_argument("--out", required=True)
    p.add_argument("--map", help="mapping sidecar path (default: OUT.map.json)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lift", help="map a target solution back to the source problem")
    p.add_argument("mapping")
    p.add_argument("target_solution")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("gen", help="generate a random instance")
    _generator_options(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="approximation-ratio benchmark")
    _generator_options(p)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--algos", default="exact", help=f"comma list from {','.join(ALGORITHMS)}")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv")
    p.add_argument("--no-time", action="store_true", help="omit the wall_time column")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, HubCoverError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
