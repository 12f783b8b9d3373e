"""Tour validity and full-solution verification.

All threshold comparisons are non-strict (``<=``) and exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from hubcover.errors import WitnessMismatchError, WrongVariantError
from hubcover.model import (
    Allocation,
    CoverWitness,
    HcpInstance,
    MultiWitness,
    SingleWitness,
    Solution,
    Tour,
    Variant,
)


class Family(enum.Enum):
    # declaration order is the report order
    TASK_COVERAGE = "TaskCoverage"
    SINGLE_ALLOCATION_BROKEN = "SingleAllocationBroken"
    CLOSED_HUB_USED = "ClosedHubUsed"
    TOUR_TOO_LONG = "TourTooLong"
    MISSING_EDGE = "MissingEdge"
    BRANCH_UNCOVERED = "BranchUncovered"
    CAPACITY_EXCEEDED = "CapacityExceeded"
    COST_MISMATCH = "CostMismatch"


_FAMILY_RANK = {f: i for i, f in enumerate(Family)}


@dataclass(frozen=True)
class Violation:
    family: Family
    obj: str
    key: tuple = field(default=(), compare=False, repr=False)

    def __str__(self) -> str:
        return f"{self.family.value}: {self.obj}"


@dataclass(frozen=True)
class VerificationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> set[Family]:
        return {v.family for v in self.violations}

    def first(self) -> Violation | None:
        return self.violations[0] if self.violations else None

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


def tour_length(instance: HcpInstance, tour: Tour) -> Fraction:
    """Length of ``b -> h -> h2 -> b2`` with the hub-to-hub leg discounted by alpha."""
    if instance.variant is not Variant.V1:
        raise WrongVariantError("tour_length is defined for variant 1 only")
    return (
        instance.branch_hub_dist(tour.b, tour.h)
        + instance.alpha * instance.hub_hub_dist(tour.h, tour.h2)
        + instance.branch_hub_dist(tour.b2, tour.h2)
    )


def _missing_edges(instance: HcpInstance, tour: Tour) -> list[str]:
    missing = []
    if not instance.has_branch_hub(tour.b, tour.h):
        missing.append(f"{instance.branches[tour.b]}-{instance.hubs[tour.h]}")
    if tour.h != tour.h2 and instance.alpha != 0 and not instance.has_hub_hub(tour.h, tour.h2):
        missing.append(f"{instance.hubs[tour.h]}-{instance.hubs[tour.h2]}")
    if not instance.has_branch_hub(tour.b2, tour.h2):
        missing.append(f"{instance.hubs[tour.h2]}-{instance.branches[tour.b2]}")
    return missing


def tour_feasible(instance: HcpInstance, tour: Tour) -> bool:
    if instance.variant is Variant.V1:
        return tour_length(instance, tour) <= instance.phi
    if instance.variant is Variant.V2:
        return not _missing_edges(instance, tour)
    raise WrongVariantError("variant 3 has no tours")


def _tour_desc(instance: HcpInstance, t: Tour) -> str:
    b, h, h2, b2 = (
        instance.branches[t.b], instance.hubs[t.h], instance.hubs[t.h2], instance.branches[t.b2]
    )
    return f"{b}-{h}-{b2}" if t.h == t.h2 else f"{b}-{h}-{h2}-{b2}"


def _task_desc(instance: HcpInstance, task) -> str:
    return f"task ({instance.branches[task[0]]},{instance.branches[task[1]]})"


def _check_tour(instance: HcpInstance, task, tour: Tour, out: list[Violation]) -> None:
    where = f"{_task_desc(instance, task)} via {_tour_desc(instance, tour)}"
    if instance.variant is Variant.V1:
        length = tour_length(instance, tour)
        if length > instance.phi:
            out.append(Violation(
                Family.TOUR_TOO_LONG, f"{where}: length {length} > {instance.phi}", task
            ))
    else:
        missing = _missing_edges(instance, tour)
        if missing:
            out.append(Violation(
                Family.MISSING_EDGE, f"{where}: no edge {', '.join(missing)}", task
            ))


def _check_hub_index(instance: HcpInstance, h: int) -> None:
    if not 0 <= h < instance.n_hubs:
        raise WitnessMismatchError(f"witness references unknown hub index {h}")


def _check_branch_index(instance: HcpInstance, b: int) -> None:
    if not 0 <= b < instance.n_branches:
        raise WitnessMismatchError(f"witness references unknown branch index {b}")


def _verify_multi(instance, solution, witness: MultiWitness, out):
    tours = witness.as_dict()
    task_set = set(instance.tasks)
    for task, tour in sorted(tours.items()):
        for v in (tour.b, tour.b2):
            _check_branch_index(instance, v)
        for h in (tour.h, tour.h2):
            _check_hub_index(instance, h)
        if task not in task_set:
            out.append(Violation(
                Family.TASK_COVERAGE, f"tour for non-task {_task_desc(instance, task)}", task
            ))
    for task in instance.tasks:
        tour = tours.get(task)
        if tour is None:
            out.append(Violation(
                Family.TASK_COVERAGE, f"{_task_desc(instance, task)} has no tour", task
            ))
            continue
        if tour.task != task:
            out.append(Violation(
                Family.TASK_COVERAGE,
                f"{_task_desc(instance, task)} served by mismatched tour "
                f"{_tour_desc(instance, tour)}",
                task,
            ))
            continue
        for h in sorted(tour.hubs):
            if h not in solution.open_hubs:
                out.append(Violation(
                    Family.CLOSED_HUB_USED,
                    f"{_task_desc(instance, task)} uses closed hub {instance.hubs[h]}",
                    (task, h),
                ))
        _check_tour(instance, task, tour, out)


def _verify_single(instance, solution, witness: SingleWitness, out):
    alloc = witness.as_dict()
    for b, h in alloc.items():
        _check_branch_index(instance, b)
        _check_hub_index(instance, h)
    for b in range(instance.n_branches):
        if b not in alloc:
            out.append(Violation(
                Family.SINGLE_ALLOCATION_BROKEN,
                f"branch {instance.branches[b]} is not allocated to a hub",
                (b,),
            ))
        elif alloc[b] not in solution.open_hubs:
            out.append(Violation(
                Family.CLOSED_HUB_USED,
                f"branch {instance.branches[b]} allocated to closed hub "
                f"{instance.hubs[alloc[b]]}",
                (b,),
            ))
    if instance.variant is Variant.V2:
        for b, h in sorted(alloc.items()):
            if not instance.has_branch_hub(b, h):
                out.append(Violation(
                    Family.MISSING_EDGE,
                    f"branch {instance.branches[b]} allocated to non-adjacent hub "
                    f"{instance.hubs[h]}",
                    (b,),
                ))
    for task in instance.tasks:
        b, b2 = task
        if b not in alloc or b2 not in alloc:
            continue
        tour = Tour(b, alloc[b], alloc[b2], b2)
        if instance.variant is Variant.V1:
            _check_tour(instance, task, tour, out)
        elif tour.h != tour.h2 and instance.alpha != 0 and not instance.has_hub_hub(tour.h, tour.h2):
            # branch legs were already checked per branch above
            out.append(Violation(
                Family.MISSING_EDGE,
                f"{_task_desc(instance, task)}: hubs {instance.hubs[tour.h]} and "
                f"{instance.hubs[tour.h2]} are not connected",
                task,
            ))


def _verify_cover(instance, solution, witness: CoverWitness, out):
    alloc = witness.as_dict()
    for b, h in alloc.items():
        _check_branch_index(instance, b)
        _check_hub_index(instance, h)
    for b in range(instance.n_branches):
        h = alloc.get(b)
        if h is None:
            out.append(Violation(
                Family.BRANCH_UNCOVERED, f"branch {instance.branches[b]} is not covered", (b,)
            ))
            continue
        if h not in solution.open_hubs:
            out.append(Violation(
                Family.CLOSED_HUB_USED,
                f"branch {instance.branches[b]} covered by closed hub {instance.hubs[h]}",
                (b,),
            ))
        if not instance.has_branch_hub(b, h):
            out.append(Violation(
                Family.MISSING_EDGE,
                f"branch {instance.branches[b]} is not adjacent to hub {instance.hubs[h]}",
                (b,),
            ))


def witness_kind(instance: HcpInstance) -> type:
    if instance.variant is Variant.V3:
        return CoverWitness
    if instance.allocation is Allocation.MULTI:
        return MultiWitness
    return SingleWitness


def verify_solution(instance: HcpInstance, solution: Solution) -> VerificationReport:
    """Check every model and variant constraint; collect all violations.

    Raises :class:`WitnessMismatchError` if the witness kind does not fit the
    instance or references unknown indices.
    """
    kind = witness_kind(instance)
    if type(solution.witness) is not kind:
        raise WitnessMismatchError(
            f"expected {kind.__name__} for this instance, got {type(solution.witness).__name__}"
        )
    for h in solution.open_hubs:
        _check_hub_index(instance, h)

    out: list[Violation] = []
    if kind is MultiWitness:
        _verify_multi(instance, solution, solution.witness, out)
    elif kind is SingleWitness:
        _verify_single(instance, solution, solution.witness, out)
    else:
        _verify_cover(instance, solution, solution.witness, out)

    if instance.capacity is not None and len(solution.open_hubs) > instance.capacity:
        out.append(Violation(
            Family.CAPACITY_EXCEEDED,
            f"{len(solution.open_hubs)} open hubs exceed capacity {instance.capacity}",
        ))
    expected = instance.cost_of(solution.open_hubs)
    if solution.cost != expected:
        out.append(Violation(
            Family.COST_MISMATCH, f"stated cost {solution.cost} != opening cost {expected}"
        ))
    out.sort(key=lambda v: (_FAMILY_RANK[v.family], v.key, v.obj))
    return VerificationReport(tuple(out))
