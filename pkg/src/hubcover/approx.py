"""Approximation algorithms.

* :func:`approx_taskwise` -- open the cheapest feasible hub pair for every
  task independently; cost is at most ``|tasks| * OPT <= |B|^2 * OPT`` for
  multi allocation variants 1 and 2.
* :func:`approx_bounded_enumeration` -- unit-cost case: try every hub set of
  size at most ``k``; otherwise open all hubs.
* :func:`greedy_set_cover` -- weighted greedy with ratio ``H(d)``; variant 3
  is solved through it via :func:`solve_variant3_greedy`.

Single allocation variants 1/2 and all capacitated variants admit no
approximation guarantee, so these functions refuse them.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from hubcover.errors import InfeasibleError, UncoverableElementError, WrongSettingError
from hubcover.exact import feasible_with_hubs, per_task_best_pair
from hubcover.model import (
    Allocation,
    CoverWitness,
    HcpInstance,
    MultiWitness,
    SetCoverInstance,
    Solution,
    Tour,
    Variant,
    make_solution,
)

_NO_APPROX = {
    "single": "single allocation variants 1 and 2 admit no approximation bound "
              "(queens completion reduces to them)",
    "capacitated": "capacitated variants admit no approximation bound "
                   "(an approximation would solve unweighted variant 3 exactly)",
}


def _require_ma12(instance: HcpInstance) -> None:
    if instance.capacity is not None:
        raise WrongSettingError(_NO_APPROX["capacitated"])
    if instance.variant is Variant.V3:
        raise WrongSettingError("variant 3 is handled by solve_variant3_greedy")
    if instance.allocation is not Allocation.MULTI:
        raise WrongSettingError(_NO_APPROX["single"])


def harmonic(d: int) -> Fraction:
    """H(d) = 1 + 1/2 + ... + 1/d."""
    return sum((Fraction(1, i) for i in range(1, d + 1)), Fraction(0))


def approx_taskwise(instance: HcpInstance) -> Solution:
    _require_ma12(instance)
    tours = {}
    opened: set[int] = set()
    for task in instance.tasks:
        best = per_task_best_pair(instance, task)
        if best is None:
            raise InfeasibleError(
                f"task ({instance.branches[task[0]]},{instance.branches[task[1]]}) "
                "has no feasible hub pair"
            )
        h, h2, _ = best
        tours[task] = Tour(task[0], h, h2, task[1])
        opened.update((h, h2))
    return make_solution(instance, opened, MultiWitness.from_mapping(tours))


def approx_bounded_enumeration(instance: HcpInstance, k: int) -> Solution:
    """Optimal when OPT <= k; otherwise opens every hub (cost |H|).

    Requires unit opening costs. Subsets are tried by ascending size, then
    lexicographically.
    """
    _require_ma12(instance)
    if any(c != 1 for c in instance.opening_cost):
        raise WrongSettingError("bounded enumeration requires unit opening costs")
    if k < 1:
        raise WrongSettingError("k must be at least 1")
    hubs = range(instance.n_hubs)
    for size in range(0, min(k, instance.n_hubs) + 1):
        for subset in itertools.combinations(hubs, size):
            witness = feasible_with_hubs(instance, subset)
            if witness is not None:
                return make_solution(instance, subset, witness)
    witness = feasible_with_hubs(instance, hubs)
    if witness is None:
        raise InfeasibleError("infeasible even with every hub open")
    return make_solution(instance, hubs, witness)


def greedy_set_cover(sc: SetCoverInstance) -> tuple[list[int], Fraction]:
    """Weighted greedy: repeatedly take the set with least weight per newly covered element.

    Ties go to the lower weight, then the lower index. Returns the chosen
    set indices in pick order and their total weight.
    """
    if sc.uncoverable:
        e = sc.uncoverable[0]
        raise UncoverableElementError(f"element {sc.elements[e]} is in no set")
    uncovered = set(range(len(sc.elements)))
    chosen: list[int] = []
    while uncovered:
        best = None
        for i, (w, members) in enumerate(sc.sets):
            gain = len(members & uncovered)
            if gain == 0:
                continue
            key = (w / gain, w, i)
            if best is None or key < best:
                best = key
        i = best[2]
        chosen.append(i)
        uncovered -= sc.sets[i][1]
    return chosen, sc.weight_of(chosen)


def solve_variant3_greedy(instance: HcpInstance) -> Solution:
    from hubcover.reductions import lift_solution, v3_to_setcover

    if instance.variant is not Variant.V3:
        raise WrongSettingError("solve_variant3_greedy needs a variant 3 instance")
    if instance.capacity is not None:
        raise WrongSettingError(_NO_APPROX["capacitated"])
    record = v3_to_setcover(instance)
    try:
        chosen, _ = greedy_set_cover(record.target)
    except UncoverableElementError as exc:
        raise InfeasibleError(str(exc)) from exc
    solution = lift_solution(record, chosen)
    assert isinstance(solution.witness, CoverWitness)
    return solution
