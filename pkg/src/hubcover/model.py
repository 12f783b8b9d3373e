"""Instance and solution data types for hub covering problems.

All numeric data is held as :class:`fractions.Fraction` so that threshold
comparisons (``length <= phi``) are exact. Instances and solutions are
frozen dataclasses; construct instances through :func:`build_instance`,
which validates every structural invariant and raises the first violation.

Branches and hubs are addressed by dense indices ``0..|B|-1`` and
``0..|H|-1``. In a :class:`MetricMatrix` the vertex order is all branches
followed by all hubs.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from hubcover.errors import (
    BadCapacityError,
    GeometryVariantMismatchError,
    InstanceError,
    InvalidBoardError,
    NonMetricError,
    NonPositiveCostError,
    UncoveredBranchSAError,
)

logger = logging.getLogger(__name__)

Task = tuple[int, int]
Rational = Union[Fraction, int, str, float]


class Variant(enum.Enum):
    V1 = "v1"
    V2 = "v2"
    V3 = "v3"


class Allocation(enum.Enum):
    SINGLE = "single"
    MULTI = "multi"


def as_rational(value: Rational) -> Fraction:
    """Coerce ``value`` to a Fraction. Floats go through their repr, so 2.75 -> 11/4."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class MetricMatrix:
    """Symmetric distance matrix over branches followed by hubs."""

    dist: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]]) -> MetricMatrix:
        return cls(tuple(tuple(as_rational(x) for x in row) for row in rows))

    def __len__(self) -> int:
        return len(self.dist)


@dataclass(frozen=True)
class AdjacencyGraph:
    """Unweighted connections: ``(branch, hub)`` pairs and ``(hub, hub)`` pairs with h < h2."""

    branch_hub: frozenset[tuple[int, int]] = frozenset()
    hub_hub: frozenset[tuple[int, int]] = frozenset()

    @classmethod
    def from_edges(
        cls,
        branch_hub: Iterable[tuple[int, int]] = (),
        hub_hub: Iterable[tuple[int, int]] = (),
    ) -> AdjacencyGraph:
        hh = set()
        for h, h2 in hub_hub:
            if h == h2:
                raise InstanceError(f"hub self-loop on hub {h}")
            hh.add((min(h, h2), max(h, h2)))
        return cls(frozenset((int(b), int(h)) for b, h in branch_hub), frozenset(hh))


Geometry = Union[MetricMatrix, AdjacencyGraph]


@dataclass(frozen=True)
class HcpInstance:
    branches: tuple[str, ...]
    hubs: tuple[str, ...]
    opening_cost: tuple[Fraction, ...]
    geometry: Geometry
    tasks: tuple[Task, ...]
    alpha: Fraction
    phi: Fraction | None
    variant: Variant
    allocation: Allocation
    capacity: int | None = None

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def n_hubs(self) -> int:
        return len(self.hubs)

    def hub_vertex(self, h: int) -> int:
        return len(self.branches) + h

    def dist(self, u: int, v: int) -> Fraction:
        """Distance between vertices ``u`` and ``v`` (branches first, then hubs)."""
        return self.geometry.dist[u][v]  # type: ignore[union-attr]

    def branch_hub_dist(self, b: int, h: int) -> Fraction:
        return self.geometry.dist[b][len(self.branches) + h]  # type: ignore[union-attr]

    def hub_hub_dist(self, h: int, h2: int) -> Fraction:
        nb = len(self.branches)
        return self.geometry.dist[nb + h][nb + h2]  # type: ignore[union-attr]

    def has_branch_hub(self, b: int, h: int) -> bool:
        return (b, h) in self.geometry.branch_hub  # type: ignore[union-attr]

    def has_hub_hub(self, h: int, h2: int) -> bool:
        if h == h2:
            return True
        return (min(h, h2), max(h, h2)) in self.geometry.hub_hub  # type: ignore[union-attr]

    def hubs_adjacent_to(self, b: int) -> list[int]:
        return sorted(h for bb, h in self.geometry.branch_hub if bb == b)  # type: ignore[union-attr]

    def cost_of(self, hubs: Iterable[int]) -> Fraction:
        return sum((self.opening_cost[h] for h in set(hubs)), Fraction(0))

    def notes(self) -> list[str]:
        """Informational remarks that do not make the instance invalid."""
        out = []
        if self.alpha not in (0, 1):
            out.append(f"alpha={self.alpha} lies outside {{0, 1}}")
        return out

    def replace(self, **changes) -> HcpInstance:
        """Return a re-validated copy with some fields changed."""
        fields = {
            "branches": self.branches,
            "hubs": self.hubs,
            "opening_cost": self.opening_cost,
            "geometry": self.geometry,
            "tasks": self.tasks,
            "alpha": self.alpha,
            "phi": self.phi,
            "variant": self.variant,
            "allocation": self.allocation,
            "capacity": self.capacity,
        }
        fields.update(changes)
        return build_instance(**fields)


def _check_metric(n: int, d: tuple[tuple[Fraction, ...], ...]) -> None:
    if len(d) != n or any(len(row) != n for row in d):
        raise NonMetricError(f"distance matrix must be {n}x{n}")
    for i in range(n):
        if d[i][i] != 0:
            raise NonMetricError(f"d({i},{i}) = {d[i][i]} is not zero")
        for j in range(n):
            if d[i][j] < 0:
                raise NonMetricError(f"d({i},{j}) = {d[i][j]} is negative")
            if d[i][j] != d[j][i]:
                raise NonMetricError(f"d({i},{j}) != d({j},{i})")
    for i in range(n):
        di = d[i]
        for j in range(n):
            dij = di[j]
            dj = d[j]
            for k in range(n):
                if di[k] > dij + dj[k]:
                    raise NonMetricError(
                        f"triangle inequality fails: d({i},{k}) = {di[k]} > "
                        f"d({i},{j}) + d({j},{k}) = {dij + dj[k]}"
                    )


def build_instance(
    branches: Sequence[str],
    hubs: Sequence[str],
    opening_cost: Sequence[Rational] | Mapping[int, Rational],
    geometry: Geometry,
    tasks: Iterable[Task],
    alpha: Rational,
    phi: Rational | None,
    variant: Variant | str,
    allocation: Allocation | str,
    capacity: int | None = None,
) -> HcpInstance:
    """Validate raw fields and return an :class:`HcpInstance`.

    Raises the first violated invariant as an :class:`InstanceError` subclass.
    ``phi`` is required for variant 1 and must be None for variants 2 and 3,
    whose thresholds are encoded by edge existence.
    """
    variant = Variant(variant)
    allocation = Allocation(allocation)
    branches = tuple(str(b) for b in branches)
    hubs = tuple(str(h) for h in hubs)
    nb, nh = len(branches), len(hubs)

    names = branches + hubs
    if len(set(names)) != len(names):
        raise InstanceError("branch and hub names must be unique")
    for name in names:
        if not name or any(c.isspace() for c in name) or name.startswith("#"):
            raise InstanceError(f"invalid identifier {name!r}")

    if isinstance(opening_cost, Mapping):
        if set(opening_cost) != set(range(nh)):
            raise InstanceError("opening_cost must map every hub index")
        costs = tuple(as_rational(opening_cost[h]) for h in range(nh))
    else:
        costs = tuple(as_rational(c) for c in opening_cost)
    if len(costs) != nh:
        raise InstanceError(f"expected {nh} opening costs, got {len(costs)}")
    for h, c in enumerate(costs):
        if c <= 0:
            raise NonPositiveCostError(f"hub {hubs[h]} has opening cost {c}")

    if variant is Variant.V1:
        if not isinstance(geometry, MetricMatrix):
            raise GeometryVariantMismatchError("variant 1 requires a MetricMatrix")
        geometry = MetricMatrix(tuple(tuple(as_rational(x) for x in row) for row in geometry.dist))
        _check_metric(nb + nh, geometry.dist)
    else:
        if not isinstance(geometry, AdjacencyGraph):
            raise GeometryVariantMismatchError(f"variant {variant.value} requires an AdjacencyGraph")
        for b, h in geometry.branch_hub:
            if not (0 <= b < nb and 0 <= h < nh):
                raise InstanceError(f"branch-hub edge ({b},{h}) out of range")
        for h, h2 in geometry.hub_hub:
            if not (0 <= h < h2 < nh):
                raise InstanceError(f"hub-hub edge ({h},{h2}) out of range or not normalized")
        if variant is Variant.V3 and geometry.hub_hub:
            raise GeometryVariantMismatchError("variant 3 graphs are bipartite: no hub-hub edges")

    alpha = as_rational(alpha)
    if not 0 <= alpha <= 1:
        raise InstanceError(f"alpha={alpha} outside [0, 1]")
    if variant is Variant.V1:
        if phi is None:
            raise InstanceError("variant 1 requires phi")
        phi = as_rational(phi)
        if phi < 0:
            raise InstanceError(f"phi={phi} is negative")
    elif phi is not None:
        raise GeometryVariantMismatchError("phi applies to variant 1 only")

    task_set = set()
    for b, b2 in tasks:
        if not (0 <= b < nb and 0 <= b2 < nb):
            raise InstanceError(f"task ({b},{b2}) references an unknown branch")
        task_set.add((int(b), int(b2)))
    if variant is Variant.V3 and task_set:
        raise GeometryVariantMismatchError("variant 3 instances carry no tasks")
    if allocation is Allocation.SINGLE and variant is not Variant.V3:
        in_task = {b for t in task_set for b in t}
        for b in range(nb):
            if b not in in_task:
                raise UncoveredBranchSAError(
                    f"branch {branches[b]} is in no task (single allocation)"
                )

    if capacity is not None:
        if isinstance(capacity, bool) or int(capacity) != capacity or not 1 <= capacity <= nh:
            raise BadCapacityError(f"capacity {capacity} outside [1, {nh}]")
        capacity = int(capacity)

    inst = HcpInstance(
        branches=branches,
        hubs=hubs,
        opening_cost=costs,
        geometry=geometry,
        tasks=tuple(sorted(task_set)),
        alpha=alpha,
        phi=phi,
        variant=variant,
        allocation=allocation,
        capacity=capacity,
    )
    for note in inst.notes():
        logger.info("instance note: %s", note)
    return inst


@dataclass(frozen=True)
class Tour:
    """Path b -> h -> h2 -> b2; a single-hub tour has h == h2."""

    b: int
    h: int
    h2: int
    b2: int

    @property
    def task(self) -> Task:
        return (self.b, self.b2)

    @property
    def hubs(self) -> frozenset[int]:
        return frozenset((self.h, self.h2))


@dataclass(frozen=True)
class MultiWitness:
    """One tour per task, stored as sorted ``(task, tour)`` pairs."""

    tours: tuple[tuple[Task, Tour], ...]

    @classmethod
    def from_mapping(cls, tours: Mapping[Task, Tour]) -> MultiWitness:
        return cls(tuple(sorted(tours.items())))

    def as_dict(self) -> dict[Task, Tour]:
        return dict(self.tours)

    def hubs(self) -> set[int]:
        return {h for _, t in self.tours for h in (t.h, t.h2)}


@dataclass(frozen=True)
class SingleWitness:
    """Branch -> hub allocation, stored as sorted ``(branch, hub)`` pairs."""

    allocation: tuple[tuple[int, int], ...]

    @classmethod
    def from_mapping(cls, allocation: Mapping[int, int]) -> SingleWitness:
        return cls(tuple(sorted(allocation.items())))

    def as_dict(self) -> dict[int, int]:
        return dict(self.allocation)

    def hubs(self) -> set[int]:
        return {h for _, h in self.allocation}


@dataclass(frozen=True)
class CoverWitness(SingleWitness):
    """Branch -> covering hub, used for variant 3."""


Witness = Union[MultiWitness, SingleWitness, CoverWitness]


@dataclass(frozen=True)
class Solution:
    open_hubs: frozenset[int]
    witness: Witness
    cost: Fraction

    @property
    def sorted_hubs(self) -> tuple[int, ...]:
        return tuple(sorted(self.open_hubs))


def make_solution(instance: HcpInstance, open_hubs: Iterable[int], witness: Witness) -> Solution:
    """Build a Solution whose cost is recomputed from the open hubs."""
    hubs = frozenset(open_hubs)
    for h in hubs:
        if not 0 <= h < instance.n_hubs:
            raise InstanceError(f"hub index {h} out of range")
    return Solution(hubs, witness, instance.cost_of(hubs))


@dataclass(frozen=True)
class SetCoverInstance:
    """Weighted set cover. ``sets[i] = (weight, member element indices)``."""

    elements: tuple[str, ...]
    sets: tuple[tuple[Fraction, frozenset[int]], ...]
    set_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        elements = tuple(str(e) for e in self.elements)
        sets = tuple((as_rational(w), frozenset(int(e) for e in m)) for w, m in self.sets)
        names = tuple(str(s) for s in self.set_names) or tuple(
            f"S{i + 1}" for i in range(len(sets))
        )
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "sets", sets)
        object.__setattr__(self, "set_names", names)
        if len(set(elements)) != len(elements):
            raise InstanceError("element names must be unique")
        if len(names) != len(sets) or len(set(names)) != len(names):
            raise InstanceError("set names must be unique, one per set")
        if set(elements) & set(names):
            raise InstanceError("element and set names must not overlap")
        for name in elements + names:
            if not name or any(c.isspace() for c in name):
                raise InstanceError(f"invalid identifier {name!r}")
        for i, (w, members) in enumerate(sets):
            if w <= 0:
                raise NonPositiveCostError(f"set {names[i]} has weight {w}")
            if not members:
                raise InstanceError(f"set {names[i]} covers no element")
            if not all(0 <= e < len(elements) for e in members):
                raise InstanceError(f"set {names[i]} references an unknown element")

    @property
    def uncoverable(self) -> tuple[int, ...]:
        covered = set().union(*(m for _, m in self.sets)) if self.sets else set()
        return tuple(e for e in range(len(self.elements)) if e not in covered)

    @property
    def coverable(self) -> bool:
        """False when the instance is infeasible by construction."""
        return not self.uncoverable

    def weight_of(self, chosen: Iterable[int]) -> Fraction:
        return sum((self.sets[i][0] for i in set(chosen)), Fraction(0))

    def covers(self, chosen: Iterable[int]) -> bool:
        covered = set()
        for i in chosen:
            covered |= self.sets[i][1]
        return len(covered) == len(self.elements)


@dataclass(frozen=True)
class SetCoverSolution:
    chosen: tuple[int, ...]
    weight: Fraction


def attacks(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True if queens on squares ``a`` and ``b`` (row, col) attack each other."""
    (r1, c1), (r2, c2) = a, b
    return r1 == r2 or c1 == c2 or abs(r1 - r2) == abs(c1 - c2)


@dataclass(frozen=True)
class QueensInstance:
    """n-queens completion: board size and pre-placed (row, col) queens, 1-based."""

    n: int
    placed: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidBoardError(f"board size {self.n!r} must be a positive integer")
        placed = tuple(sorted((int(r), int(c)) for r, c in self.placed))
        object.__setattr__(self, "placed", placed)
        for r, c in placed:
            if not (1 <= r <= self.n and 1 <= c <= self.n):
                raise InvalidBoardError(f"queen ({r},{c}) is off the {self.n}x{self.n} board")
        rows = [r for r, _ in placed]
        if len(set(rows)) != len(rows):
            raise InvalidBoardError("at most one placed queen per row")
        for i, a in enumerate(placed):
            for b in placed[i + 1:]:
                if attacks(a, b):
                    raise InvalidBoardError(f"placed queens {a} and {b} attack each other")

    def is_completion(self, placement: Sequence[tuple[int, int]]) -> bool:
        """Check that ``placement`` is n non-attacking queens extending ``placed``."""
        placement = list(placement)
        if len(placement) != self.n:
            return False
        if any(not (1 <= r <= self.n and 1 <= c <= self.n) for r, c in placement):
            return False
        if not set(self.placed) <= set(placement):
            return False
        return all(
            not attacks(a, b) for i, a in enumerate(placement) for b in placement[i + 1:]
        )
