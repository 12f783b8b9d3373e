"""Approximation-ratio benchmark over generated instances."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from fractions import Fraction

from hubcover.approx import (
    approx_bounded_enumeration,
    approx_taskwise,
    harmonic,
    solve_variant3_greedy,
)
from hubcover.errors import BadSpecError, InfeasibleError
from hubcover.exact import solve_exact
from hubcover.formats import digest, format_rational, serialize_instance
from hubcover.generators import GeneratorSpec, generate_instance
from hubcover.model import HcpInstance

ALGORITHMS = ("exact", "taskwise", "bounded-enum", "greedy-v3")

_FAMILY_VARIANT = {
    "euclidean-v1": "v1",
    "random-graph-v2": "v2",
    "bipartite-v3": "v3",
    "queens-derived": "v2",
}


@dataclass(frozen=True)
class BenchRow:
    digest: str
    branches: int
    hubs: int
    tasks: int
    variant: str
    allocation: str
    algorithm: str
    cost: Fraction | None
    optimum: Fraction | None
    ratio: Fraction | None
    wall_time: float


def check_algorithms(spec: GeneratorSpec, algos: list[str]) -> None:
    variant = _FAMILY_VARIANT.get(spec.family)
    allocation = "single" if spec.family == "queens-derived" else spec.allocation
    for algo in algos:
        if algo not in ALGORITHMS:
            raise BadSpecError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
        if algo in ("taskwise", "bounded-enum") and (variant == "v3" or allocation == "single"):
            raise BadSpecError(f"{algo} needs a multi allocation v1/v2 family")
        if algo == "greedy-v3" and variant != "v3":
            raise BadSpecError("greedy-v3 needs the bipartite-v3 family")


def run_algorithm(instance: HcpInstance, algo: str, k: int = 2):
    """Return a Solution, or None when the instance is infeasible."""
    try:
        if algo == "exact":
            return solve_exact(instance).solution
        if algo == "taskwise":
            return approx_taskwise(instance)
        if algo == "bounded-enum":
            return approx_bounded_enumeration(instance, k)
        if algo == "greedy-v3":
            return solve_variant3_greedy(instance)
    except InfeasibleError:
        return None
    raise BadSpecError(f"unknown algorithm {algo!r}")


def _bench_one(args) -> list[BenchRow]:
    spec, seed, algos, k = args
    instance = generate_instance(spec, seed)
    key = digest(serialize_instance(instance))
    optimum = solve_exact(instance).optimum
    rows = []
    for algo in algos:
        start = time.perf_counter()
        sol = run_algorithm(instance, algo, k)
        elapsed = time.perf_counter() - start
        cost = None if sol is None else sol.cost
        ratio = cost / optimum if cost is not None and optimum else None
        rows.append(BenchRow(
            key, instance.n_branches, instance.n_hubs, len(instance.tasks),
            instance.variant.value, instance.allocation.value, algo,
            cost, optimum, ratio, elapsed,
        ))
    return rows


def run_bench(
    spec: GeneratorSpec,
    count: int,
    seed: int,
    algos: list[str],
    k: int = 2,
    workers: int = 1,
) -> list[BenchRow]:
    """Instances use seeds ``seed .. seed+count-1``; rows come back in seed order."""
    spec.validate()
    check_algorithms(spec, algos)
    jobs = [(spec, seed + i, tuple(algos), k) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_bench_one, jobs))
    else:
        chunks = [_bench_one(job) for job in jobs]
    return [row for chunk in chunks for row in chunk]


def row_within_bound(row: BenchRow, k: int = 2, max_set_size: int | None = None) -> bool:
    """Check the guarantee each algorithm carries (infeasible rows trivially pass)."""
    if row.cost is None or row.optimum is None:
        return row.cost is None and row.optimum is None
    if row.algorithm == "exact":
        return row.cost == row.optimum
    if row.algorithm == "taskwise":
        return row.cost <= row.branches ** 2 * row.optimum
    if row.algorithm == "bounded-enum":
        return row.cost == row.optimum if row.optimum <= k else row.cost == row.hubs
    if row.algorithm == "greedy-v3":
        d = max_set_size if max_set_size is not None else row.branches
        return row.cost <= harmonic(d) * row.optimum
    return False


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def rows_to_csv(rows: list[BenchRow], include_time: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f.name for f in fields(BenchRow)]
    if not include_time:
        header = header[:-1]
    writer.writerow(header)
    for row in rows:
        cells = [_cell(v) for v in astuple(row)]
        writer.writerow(cells if include_time else cells[:-1])
    return buf.getvalue()
