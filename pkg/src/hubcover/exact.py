"""Exact solvers: fixed-hub-set feasibility and best-first subset enumeration.

These are the correctness oracles for everything else in the package and
the only way the capacitated variants are solved.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from hubcover.errors import LimitExceededError
from hubcover.feasibility import tour_feasible
from hubcover.model import (
    Allocation,
    CoverWitness,
    HcpInstance,
    MultiWitness,
    SingleWitness,
    Solution,
    Task,
    Tour,
    Variant,
    Witness,
    make_solution,
)

LIMITS_ENV = "HUBCOVER_LIMITS"


@dataclass(frozen=True)
class Limits:
    hubs: int = 20
    branches: int = 12  # applies to single allocation only

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> Limits:
        """Read ``HUBCOVER_LIMITS=hubs=N,branches=M``; missing keys keep defaults."""
        raw = (os.environ if env is None else env).get(LIMITS_ENV, "").strip()
        values = {}
        if raw:
            for part in raw.split(","):
                key, sep, val = part.partition("=")
                key = key.strip()
                if not sep or key not in ("hubs", "branches"):
                    raise ValueError(f"bad {LIMITS_ENV} entry {part!r}")
                values[key] = int(val)
        return cls(**values)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class OptimalResult:
    status: Status
    solution: Solution | None = None
    optimum: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status is Status.OPTIMAL


def _ma_witness(instance: HcpInstance, hubs: list[int]) -> MultiWitness | None:
    tours = {}
    for b, b2 in instance.tasks:
        for h, h2 in itertools.product(hubs, repeat=2):
            tour = Tour(b, h, h2, b2)
            if tour_feasible(instance, tour):
                tours[(b, b2)] = tour
                break
        else:
            return None
    return MultiWitness.from_mapping(tours)


def _v3_witness(instance: HcpInstance, hubs: list[int]) -> CoverWitness | None:
    alloc = {}
    for b in range(instance.n_branches):
        for h in hubs:
            if instance.has_branch_hub(b, h):
                alloc[b] = h
                break
        else:
            return None
    return CoverWitness.from_mapping(alloc)


def _sa_witness(instance: HcpInstance, hubs: list[int]) -> SingleWitness | None:
    nb = instance.n_branches
    # constraints[b] = list of (other branch, task) pairs, other != b
    constraints: dict[int, list[tuple[int, Task]]] = {b: [] for b in range(nb)}
    self_tasks = set()
    degree = [0] * nb
    for b, b2 in instance.tasks:
        degree[b] += 1
        if b == b2:
            self_tasks.add(b)
            continue
        degree[b2] += 1
        constraints[b].append((b2, (b, b2)))
        constraints[b2].append((b, (b, b2)))

    def unary_ok(b: int, h: int) -> bool:
        if instance.variant is Variant.V2:
            if not instance.has_branch_hub(b, h):
                return False
        elif degree[b] and instance.branch_hub_dist(b, h) > instance.phi:
            # every tour leg is nonnegative, so the first leg alone must fit
            return False
        return b not in self_tasks or tour_feasible(instance, Tour(b, h, h, b))

    def pair_ok(task: Task, hb: int, hb2: int) -> bool:
        return tour_feasible(instance, Tour(task[0], hb, hb2, task[1]))

    domains = {b: [h for h in hubs if unary_ok(b, h)] for b in range(nb)}
    if any(not d for d in domains.values()):
        return None
    order = sorted(range(nb), key=lambda b: (-degree[b], b))
    assignment: dict[int, int] = {}

    def consistent(b: int, h: int, other: int, ho: int) -> bool:
        for o, task in constraints[b]:
            if o != other:
                continue
            hb, hb2 = (h, ho) if task[0] == b else (ho, h)
            if not pair_ok(task, hb, hb2):
                return False
        return True

    def search(i: int, domains: dict[int, list[int]]) -> bool:
        if i == len(order):
            return True
        b = order[i]
        for h in domains[b]:
            assignment[b] = h
            pruned = dict(domains)
            wiped = False
            for other in {o for o, _ in constraints[b]}:
                if other in assignment:
                    continue
                new = [ho for ho in pruned[other] if consistent(b, h, other, ho)]
                if not new:
                    wiped = True
                    break
                pruned[other] = new
            if not wiped and search(i + 1, pruned):
                return True
            del assignment[b]
        return False

    if not search(0, domains):
        return None
    return SingleWitness.from_mapping(assignment)


def feasible_with_hubs(instance: HcpInstance, hubset: Iterable[int]) -> Witness | None:
    """Return a witness using only hubs in ``hubset``, or None if there is none.

    Multi allocation scans all hub pairs per task; single allocation runs a
    forward-checking backtrack over branch allocations; variant 3 gives each
    branch its lowest-index adjacent hub. A hub set over capacity yields None.
    """
    hubs = sorted(set(hubset))
    if instance.capacity is not None and len(hubs) > instance.capacity:
        return None
    if instance.variant is Variant.V3:
        return _v3_witness(instance, hubs)
    if instance.allocation is Allocation.MULTI:
        return _ma_witness(instance, hubs)
    return _sa_witness(instance, hubs)


def per_task_best_pair(instance: HcpInstance, task: Task) -> tuple[int, int, Fraction] | None:
    """Cheapest feasible (h, h2) for one task; a repeated hub is paid once."""
    best = None
    b, b2 = task
    for h, h2 in itertools.product(range(instance.n_hubs), repeat=2):
        if not tour_feasible(instance, Tour(b, h, h2, b2)):
            continue
        cost = instance.cost_of((h, h2))
        if best is None or (cost, h, h2) < (best[2], best[0], best[1]):
            best = (h, h2, cost)
    return best


def check_limits(instance: HcpInstance, limits: Limits | None = None) -> None:
    limits = limits or Limits.from_env()
    if instance.n_hubs > limits.hubs:
        raise LimitExceededError(f"{instance.n_hubs} hubs exceed the limit of {limits.hubs}")
    if (
        instance.allocation is Allocation.SINGLE
        and instance.variant is not Variant.V3
        and instance.n_branches > limits.branches
    ):
        raise LimitExceededError(
            f"{instance.n_branches} branches exceed the single-allocation limit of "
            f"{limits.branches}"
        )


def _evaluate(args):
    instance, hubs = args
    return feasible_with_hubs(instance, hubs)


def _required_masks(instance: HcpInstance) -> list[int]:
    """Bitmasks of hubs; every feasible hub set meets each of them.

    A cheap necessary condition used to skip subsets before the full check.
    """
    nh = instance.n_hubs
    masks = []
    if instance.variant is Variant.V3 or (
        instance.allocation is Allocation.SINGLE and instance.variant is Variant.V2
    ):
        for b in range(instance.n_branches):
            masks.append(sum(1 << h for h in instance.hubs_adjacent_to(b)))
    for b, b2 in instance.tasks:
        first = second = 0
        for h, h2 in itertools.product(range(nh), repeat=2):
            if tour_feasible(instance, Tour(b, h, h2, b2)):
                first |= 1 << h
                second |= 1 << h2
        masks += [first, second]
    return sorted(set(masks))


def _subsets_by_cost(instance: HcpInstance, max_size: int):
    """Yield (cost, size, hubs) for every hub subset of at most ``max_size`` hubs.

    Order is exactly ascending (cost, size, hubs). Standard heap enumeration
    over hubs sorted by (cost, index): each subset has successors "append
    next" and "bump last", neither smaller in that order.
    """
    order = sorted(range(instance.n_hubs), key=lambda h: (instance.opening_cost[h], h))
    # integer keys: Fraction comparisons dominate the heap otherwise
    scale = math.lcm(*(c.denominator for c in instance.opening_cost)) if order else 1
    costs = [int(instance.opening_cost[h] * scale) for h in order]
    m = len(order)
    heap = [(0, 0, (), ())]
    while heap:
        cost, size, hubs, pos = heapq.heappop(heap)
        yield Fraction(cost, scale), size, hubs
        last = pos[-1] if pos else -1
        nxt = last + 1
        if nxt < m:
            if size < max_size:
                new = pos + (nxt,)
                heapq.heappush(heap, (
                    cost + costs[nxt], size + 1, tuple(sorted(order[p] for p in new)), new
                ))
            if pos:
                new = pos[:-1] + (nxt,)
                heapq.heappush(heap, (
                    cost - costs[last] + costs[nxt], size,
                    tuple(sorted(order[p] for p in new)), new,
                ))


def _candidates(instance: HcpInstance, max_size: int):
    masks = _required_masks(instance)
    for _, _, hubs in _subsets_by_cost(instance, max_size):
        bits = sum(1 << h for h in hubs)
        if all(bits & m for m in masks):
            yield hubs


def solve_exact(
    instance: HcpInstance,
    limits: Limits | None = None,
    workers: int = 1,
) -> OptimalResult:
    """Cheapest feasible hub set, ties broken by (size, sorted hub indices).

    Hub subsets are enumerated best-first in that order, so the first
    feasible one is optimal. With ``workers > 1`` consecutive chunks of
    candidates are checked in a process pool and the first feasible one in
    enumeration order wins, so results are identical to a serial run.
    """
    check_limits(instance, limits)
    all_hubs = list(range(instance.n_hubs))
    max_size = instance.n_hubs if instance.capacity is None else instance.capacity
    # feasibility is monotone in the hub set, so the full set decides uncapacitated infeasibility
    uncapped = instance.replace(capacity=None) if instance.capacity is not None else instance
    if feasible_with_hubs(uncapped, all_hubs) is None:
        return OptimalResult(Status.INFEASIBLE)

    candidates = _candidates(instance, max_size)
    if workers <= 1:
        for hubs in candidates:
            witness = feasible_with_hubs(instance, hubs)
            if witness is not None:
                sol = make_solution(instance, hubs, witness)
                return OptimalResult(Status.OPTIMAL, sol, sol.cost)
        return OptimalResult(Status.INFEASIBLE)

    chunk = 64 * workers
    with ProcessPoolExecutor(max_workers=workers) as pool:
        while batch := list(itertools.islice(candidates, chunk)):
            results = pool.map(_evaluate, [(instance, h) for h in batch], chunksize=16)
            for hubs, witness in zip(batch, results):
                if witness is not None:
                    sol = make_solution(instance, hubs, witness)
                    return OptimalResult(Status.OPTIMAL, sol, sol.cost)
    return OptimalResult(Status.INFEASIBLE)
