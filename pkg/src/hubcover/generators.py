"""Seeded random instance families.

``euclidean-v1``
    points on an integer grid with L1 distances (exact integers, metric by
    construction); phi is given or taken as a quantile of single-hub tour
    lengths over all (task, hub) pairs.
``random-graph-v2``
    independent branch-hub and hub-hub connections.
``bipartite-v3``
    independent branch-hub connections, no tasks.
``queens-derived``
    a random partial queens placement pushed through :func:`queens_to_sa2`.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from hubcover.errors import BadSpecError
from hubcover.model import (
    AdjacencyGraph,
    HcpInstance,
    MetricMatrix,
    QueensInstance,
    SetCoverInstance,
    Variant,
    attacks,
    build_instance,
)

FAMILIES = ("euclidean-v1", "random-graph-v2", "bipartite-v3", "queens-derived")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    branches: int = 4
    hubs: int = 4
    cost_min: int = 1
    cost_max: int = 1
    task_density: float = 0.5
    allocation: str = "multi"
    alpha: Fraction = Fraction(1)
    phi: Fraction | None = None
    phi_quantile: float = 0.5
    grid: int = 10
    edge_prob: float = 0.5
    hub_edge_prob: float = 0.5
    capacity: int | None = None
    n: int = 4
    placed: int = 1

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise BadSpecError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.branches < 0 or self.hubs < 0:
            raise BadSpecError("sizes must be nonnegative")
        if not 1 <= self.cost_min <= self.cost_max:
            raise BadSpecError("need 1 <= cost_min <= cost_max")
        for name in ("task_density", "phi_quantile", "edge_prob", "hub_edge_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise BadSpecError(f"{name} must lie in [0, 1]")
        if self.allocation not in ("single", "multi"):
            raise BadSpecError("allocation must be 'single' or 'multi'")
        if not 0 <= self.alpha <= 1:
            raise BadSpecError("alpha must lie in [0, 1]")
        if self.grid < 0:
            raise BadSpecError("grid must be nonnegative")
        if self.family == "queens-derived" and not (self.n >= 1 and 0 <= self.placed <= self.n):
            raise BadSpecError("queens-derived needs n >= 1 and 0 <= placed <= n")


def _names(nb: int, nh: int) -> tuple[list[str], list[str]]:
    return [f"B{i + 1}" for i in range(nb)], [f"H{i + 1}" for i in range(nh)]


def _tasks(rng: random.Random, nb: int, density: float, single: bool) -> list[tuple[int, int]]:
    tasks = [
        (b, b2) for b, b2 in itertools.permutations(range(nb), 2) if rng.random() < density
    ]
    if single:
        covered = {b for t in tasks for b in t}
        for b in range(nb):
            if b not in covered:
                partner = rng.randrange(nb)
                tasks.append((b, partner))
                covered.update((b, partner))
    return tasks


def _quantile(values: list[Fraction], q: float) -> Fraction:
    """Lower empirical quantile (an element of ``values``)."""
    values = sorted(values)
    idx = min(len(values) - 1, max(0, math.ceil(q * len(values)) - 1))
    return values[idx]


def _euclidean_v1(spec: GeneratorSpec, rng: random.Random) -> HcpInstance:
    nb, nh = spec.branches, spec.hubs
    pts = [(rng.randint(0, spec.grid), rng.randint(0, spec.grid)) for _ in range(nb + nh)]
    dist = tuple(
        tuple(Fraction(abs(x1 - x2) + abs(y1 - y2)) for x2, y2 in pts) for x1, y1 in pts
    )
    costs = [rng.randint(spec.cost_min, spec.cost_max) for _ in range(nh)]
    tasks = _tasks(rng, nb, spec.task_density, spec.allocation == "single")
    phi = spec.phi
    if phi is None:
        lengths = [dist[b][nb + h] + dist[nb + h][b2] for b, b2 in tasks for h in range(nh)]
        phi = _quantile(lengths, spec.phi_quantile) if lengths else Fraction(0)
    branches, hubs = _names(nb, nh)
    return build_instance(
        branches, hubs, costs, MetricMatrix(dist), tasks, spec.alpha, phi,
        Variant.V1, spec.allocation, spec.capacity,
    )


def _random_graph_v2(spec: GeneratorSpec, rng: random.Random) -> HcpInstance:
    nb, nh = spec.branches, spec.hubs
    bh = [(b, h) for b in range(nb) for h in range(nh) if rng.random() < spec.edge_prob]
    hh = [
        (h, h2) for h, h2 in itertools.combinations(range(nh), 2)
        if rng.random() < spec.hub_edge_prob
    ]
    costs = [rng.randint(spec.cost_min, spec.cost_max) for _ in range(nh)]
    tasks = _tasks(rng, nb, spec.task_density, spec.allocation == "single")
    branches, hubs = _names(nb, nh)
    return build_instance(
        branches, hubs, costs, AdjacencyGraph.from_edges(bh, hh), tasks, spec.alpha, None,
        Variant.V2, spec.allocation, spec.capacity,
    )


def _bipartite_v3(spec: GeneratorSpec, rng: random.Random) -> HcpInstance:
    nb, nh = spec.branches, spec.hubs
    bh = [(b, h) for b in range(nb) for h in range(nh) if rng.random() < spec.edge_prob]
    costs = [rng.randint(spec.cost_min, spec.cost_max) for _ in range(nh)]
    branches, hubs = _names(nb, nh)
    return build_instance(
        branches, hubs, costs, AdjacencyGraph.from_edges(bh), (), spec.alpha, None,
        Variant.V3, spec.allocation, spec.capacity,
    )


def random_queens(rng: random.Random, n: int, placed: int) -> QueensInstance:
    """Place ``placed`` mutually non-attacking queens on distinct random rows."""
    queens: list[tuple[int, int]] = []
    for r in rng.sample(range(1, n + 1), placed):
        options = [c for c in range(1, n + 1) if not any(attacks((r, c), q) for q in queens)]
        if options:
            queens.append((r, rng.choice(options)))
    return QueensInstance(n, tuple(queens))


def _queens_derived(spec: GeneratorSpec, rng: random.Random) -> HcpInstance:
    from hubcover.reductions import queens_to_sa2

    return queens_to_sa2(random_queens(rng, spec.n, spec.placed)).target


_BUILDERS = {
    "euclidean-v1": _euclidean_v1,
    "random-graph-v2": _random_graph_v2,
    "bipartite-v3": _bipartite_v3,
    "queens-derived": _queens_derived,
}


def generate_instance(spec: GeneratorSpec, seed: int) -> HcpInstance:
    """Deterministic for a fixed ``(spec, seed)``."""
    spec.validate()
    rng = random.Random(f"{spec.family}:{seed}")
    return _BUILDERS[spec.family](spec, rng)


def random_setcover(
    rng: random.Random,
    max_elements: int = 12,
    max_sets: int = 8,
    weight_max: int = 5,
    density: float = 0.3,
) -> SetCoverInstance:
    """Random weighted set cover where every element lies in at least one set."""
    ne = rng.randint(1, max_elements)
    ns = rng.randint(1, max_sets)
    members = [{e for e in range(ne) if rng.random() < density} for _ in range(ns)]
    for e in range(ne):
        if not any(e in m for m in members):
            members[rng.randrange(ns)].add(e)
    for i, m in enumerate(members):
        if not m:
            m.add(rng.randrange(ne))
    sets = tuple((Fraction(rng.randint(1, weight_max)), frozenset(m)) for m in members)
    return SetCoverInstance(tuple(f"E{e + 1}" for e in range(ne)), sets)


def with_capacity(instance: HcpInstance, capacity: int | None) -> HcpInstance:
    return instance.replace(capacity=capacity)

