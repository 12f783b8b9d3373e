"""Constructive reductions between problem variants, and solution lifting.

=====================  =========================================
``reduce_v2_to_v1``    variant 2 -> variant 1 (weights 1/2, alpha 1/2, phi 11/4)
``reduce_v3_to_v2``    variant 3 -> variant 2 (full hub mesh, alpha 0, tasks to b0)
``setcover_to_v3``     weighted set cover -> variant 3
``v3_to_setcover``     variant 3 -> weighted set cover
``queens_to_sa2``      queens completion -> single allocation variant 2
=====================  =========================================

Every reduction returns a :class:`ReductionRecord` whose ``tables`` map
each target branch/hub (or element/set) back to its source counterpart.
:func:`lift_solution` uses them to turn a target solution into a source
solution with identical cost.
"""

from __future__ import annotations

import itertools
import json
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from hubcover import formats
from hubcover.errors import UnliftableWitnessError, WrongSettingError, WrongVariantError
from hubcover.model import (
    AdjacencyGraph,
    Allocation,
    CoverWitness,
    HcpInstance,
    MetricMatrix,
    MultiWitness,
    QueensInstance,
    SetCoverInstance,
    SetCoverSolution,
    SingleWitness,
    Solution,
    Tour,
    Variant,
    attacks,
    build_instance,
    make_solution,
)

Source = Union[HcpInstance, SetCoverInstance, QueensInstance]

V2_TO_V1_ALPHA = Fraction(1, 2)
V2_TO_V1_PHI = Fraction(11, 4)


def serialize_any(obj) -> str:
    if isinstance(obj, HcpInstance):
        return formats.serialize_instance(obj)
    if isinstance(obj, SetCoverInstance):
        return formats.serialize_setcover(obj)
    if isinstance(obj, QueensInstance):
        return formats.serialize_queens(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_any(text: str):
    kind = formats.sniff(text)
    parser = {
        "hcpi": formats.parse_instance,
        "setcover": formats.parse_setcover,
        "queens": formats.parse_queens,
    }.get(kind)
    if parser is None:
        raise formats.FormatSyntaxError(f"unknown file kind {kind!r}", 1)
    return parser(text)


@dataclass(frozen=True)
class ReductionRecord:
    kind: str
    source: Source
    target: Source
    tables: dict[str, tuple] = field(default_factory=dict)

    @property
    def source_digest(self) -> str:
        return formats.digest(serialize_any(self.source))

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "source_digest": self.source_digest,
            "source": serialize_any(self.source),
            "target": serialize_any(self.target),
            "tables": {k: _jsonable(v) for k, v in sorted(self.tables.items())},
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ReductionRecord:
        payload = json.loads(text)
        source = parse_any(payload["source"])
        if formats.digest(serialize_any(source)) != payload["source_digest"]:
            raise ValueError("mapping sidecar source digest does not match its source")
        tables = {
            k: (tuple(tuple(x) if isinstance(x, list) else x for x in v)
                if isinstance(v, list) else v)
            for k, v in payload["tables"].items()
        }
        return cls(payload["kind"], source, parse_any(payload["target"]), tables)


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def _identity_tables(instance: HcpInstance) -> dict[str, tuple]:
    return {
        "branch": tuple(range(instance.n_branches)),
        "hub": tuple(range(instance.n_hubs)),
    }


def reduce_v2_to_v1(instance: HcpInstance) -> ReductionRecord:
    """Embed a variant 2 graph as a {1, 2}-metric with alpha 1/2 and phi 11/4.

    Connections get distance 1, every other vertex pair distance 2. With a
    source alpha of 0 every hub-to-hub connection is valid, so all hub pairs
    get distance 1.
    """
    if instance.variant is not Variant.V2:
        raise WrongVariantError("reduce_v2_to_v1 needs a variant 2 instance")
    nb, nh = instance.n_branches, instance.n_hubs
    n = nb + nh
    one, two = Fraction(1), Fraction(2)
    d = [[two] * n for _ in range(n)]
    for i in range(n):
        d[i][i] = Fraction(0)
    for b, h in instance.geometry.branch_hub:
        d[b][nb + h] = d[nb + h][b] = one
    for h, h2 in itertools.combinations(range(nh), 2):
        if instance.alpha == 0 or instance.has_hub_hub(h, h2):
            d[nb + h][nb + h2] = d[nb + h2][nb + h] = one
    target = build_instance(
        instance.branches,
        instance.hubs,
        instance.opening_cost,
        MetricMatrix(tuple(tuple(row) for row in d)),
        instance.tasks,
        V2_TO_V1_ALPHA,
        V2_TO_V1_PHI,
        Variant.V1,
        instance.allocation,
        instance.capacity,
    )
    return ReductionRecord("v2-to-v1", instance, target, _identity_tables(instance))


def reduce_v3_to_v2(
    instance: HcpInstance,
    b0: int | None = None,
    allocation: Allocation | str = Allocation.MULTI,
) -> ReductionRecord:
    """Fully mesh the hubs, set alpha to 0 and add one task (b, b0) per branch."""
    if instance.variant is not Variant.V3:
        raise WrongVariantError("reduce_v3_to_v2 needs a variant 3 instance")
    nb, nh = instance.n_branches, instance.n_hubs
    if nb and b0 is None:
        b0 = 0
    if nb and not 0 <= b0 < nb:
        raise ValueError(f"b0={b0} is not a branch index")
    geometry = AdjacencyGraph(
        instance.geometry.branch_hub, frozenset(itertools.combinations(range(nh), 2))
    )
    target = build_instance(
        instance.branches,
        instance.hubs,
        instance.opening_cost,
        geometry,
        [(b, b0) for b in range(nb)],
        0,
        None,
        Variant.V2,
        allocation,
        instance.capacity,
    )
    tables = _identity_tables(instance)
    tables["b0"] = () if b0 is None else (b0,)
    return ReductionRecord("v3-to-v2", instance, target, tables)


def setcover_to_v3(sc: SetCoverInstance) -> ReductionRecord:
    """Elements become branches, sets become hubs, membership becomes adjacency."""
    edges = [(e, i) for i, (_, members) in enumerate(sc.sets) for e in members]
    target = build_instance(
        sc.elements,
        sc.set_names,
        [w for w, _ in sc.sets],
        AdjacencyGraph.from_edges(edges),
        (),
        0,
        None,
        Variant.V3,
        Allocation.SINGLE,
    )
    tables = {"element": tuple(range(len(sc.elements))), "set": tuple(range(len(sc.sets)))}
    return ReductionRecord("setcover-to-v3", sc, target, tables)


def v3_to_setcover(instance: HcpInstance) -> ReductionRecord:
    """Inverse of :func:`setcover_to_v3`.

    Hubs adjacent to no branch cannot become sets (sets must cover something)
    and are dropped; the ``hub`` table records which hub each set came from.
    """
    if instance.variant is not Variant.V3:
        raise WrongVariantError("v3_to_setcover needs a variant 3 instance")
    if instance.capacity is not None:
        raise WrongSettingError("set cover has no cardinality bound; drop the capacity first")
    sets, names, hub_of_set = [], [], []
    for h in range(instance.n_hubs):
        members = frozenset(b for b, hh in instance.geometry.branch_hub if hh == h)
        if members:
            sets.append((instance.opening_cost[h], members))
            names.append(instance.hubs[h])
            hub_of_set.append(h)
    target = SetCoverInstance(instance.branches, tuple(sets), tuple(names))
    tables = {"branch": tuple(range(instance.n_branches)), "hub": tuple(hub_of_set)}
    return ReductionRecord("v3-to-setcover", instance, target, tables)


def square_name(n: int, row: int, col: int) -> str:
    """Chess notation (column letter, row number) while the board allows it."""
    if n <= 26:
        return f"{string.ascii_lowercase[col - 1]}{row}"
    return f"r{row}c{col}"


def queens_to_sa2(q: QueensInstance) -> ReductionRecord:
    """Encode queens completion as single allocation variant 2.

    One branch per row, one unit-cost hub per square (row-major order), a
    task for every pair of rows, hub connections between non-attacking
    squares. A row with a fixed queen connects only to that square; a free
    row connects to every square in it. A one-row board gets the self-task
    so its branch still has to be allocated.
    """
    n = q.n
    squares = [(r, c) for r in range(1, n + 1) for c in range(1, n + 1)]
    hub_index = {s: i for i, s in enumerate(squares)}
    fixed = dict(q.placed)
    bh = []
    for r in range(1, n + 1):
        cols = [fixed[r]] if r in fixed else range(1, n + 1)
        bh += [(r - 1, hub_index[(r, c)]) for c in cols]
    hh = [
        (i, j)
        for i, j in itertools.combinations(range(len(squares)), 2)
        if not attacks(squares[i], squares[j])
    ]
    tasks = list(itertools.combinations(range(n), 2)) or [(0, 0)]
    target = build_instance(
        [f"B{r}" for r in range(1, n + 1)],
        [square_name(n, r, c) for r, c in squares],
        [1] * len(squares),
        AdjacencyGraph.from_edges(bh, hh),
        tasks,
        1,
        None,
        Variant.V2,
        Allocation.SINGLE,
    )
    tables = {"row": tuple(range(1, n + 1)), "square": tuple(squares)}
    return ReductionRecord("queens-to-sa2", q, target, tables)


def solve_queens_completion(q: QueensInstance) -> tuple[tuple[int, int], ...] | None:
    """Backtracking over free rows; returns a full placement sorted by row, or None."""
    n = q.n
    cols = {c for _, c in q.placed}
    diag = {r - c for r, c in q.placed}
    anti = {r + c for r, c in q.placed}
    fixed = dict(q.placed)
    free = [r for r in range(1, n + 1) if r not in fixed]
    chosen: dict[int, int] = {}

    def place(i: int) -> bool:
        if i == len(free):
            return True
        r = free[i]
        for c in range(1, n + 1):
            if c in cols or (r - c) in diag or (r + c) in anti:
                continue
            cols.add(c), diag.add(r - c), anti.add(r + c)
            chosen[r] = c
            if place(i + 1):
                return True
            del chosen[r]
            cols.discard(c), diag.discard(r - c), anti.discard(r + c)
        return False

    if not place(0):
        return None
    return tuple(sorted({**fixed, **chosen}.items()))


# ------------------------------------------------------------------ lifting

def _lift_v2_to_v1(record: ReductionRecord, sol: Solution) -> Solution:
    src: HcpInstance = record.source
    hub = record.tables["hub"]
    branch = record.tables["branch"]
    w = sol.witness
    if isinstance(w, MultiWitness):
        tours = {}
        for _, t in w.tours:
            tt = Tour(branch[t.b], hub[t.h], hub[t.h2], branch[t.b2])
            tours[tt.task] = tt
        witness = MultiWitness.from_mapping(tours)
    elif isinstance(w, SingleWitness):
        witness = SingleWitness.from_mapping({branch[b]: hub[h] for b, h in w.allocation})
    else:
        raise UnliftableWitnessError(f"unexpected witness {type(w).__name__}")
    return make_solution(src, (hub[h] for h in sol.open_hubs), witness)


def _lift_v3_to_v2(record: ReductionRecord, sol: Solution) -> Solution:
    src: HcpInstance = record.source
    hub = record.tables["hub"]
    b0 = record.tables["b0"][0] if record.tables["b0"] else None
    w = sol.witness
    if isinstance(w, MultiWitness):
        tours = w.as_dict()
        alloc = {}
        for b in range(src.n_branches):
            tour = tours.get((b, b0))
            if tour is None:
                raise UnliftableWitnessError(f"no tour for task ({b},{b0})")
            alloc[b] = hub[tour.h]
    elif isinstance(w, SingleWitness):
        alloc = {b: hub[h] for b, h in w.allocation}
    else:
        raise UnliftableWitnessError(f"unexpected witness {type(w).__name__}")
    return make_solution(src, (hub[h] for h in sol.open_hubs), CoverWitness.from_mapping(alloc))


def _lift_setcover_to_v3(record: ReductionRecord, sol: Solution) -> SetCoverSolution:
    sc: SetCoverInstance = record.source
    set_of = record.tables["set"]
    chosen = tuple(sorted(set_of[h] for h in sol.open_hubs))
    if not sc.covers(chosen):
        raise UnliftableWitnessError("open hubs do not cover every element")
    return SetCoverSolution(chosen, sc.weight_of(chosen))


def _lift_v3_to_setcover(record: ReductionRecord, cover) -> Solution:
    src: HcpInstance = record.source
    chosen = cover.chosen if isinstance(cover, SetCoverSolution) else tuple(cover)
    hub_of_set = record.tables["hub"]
    for i in chosen:
        if not 0 <= i < len(hub_of_set):
            raise UnliftableWitnessError(f"set index {i} has no hub")
    opened = sorted(hub_of_set[i] for i in set(chosen))
    alloc = {}
    for b in range(src.n_branches):
        h = next((h for h in opened if src.has_branch_hub(b, h)), None)
        if h is None:
            raise UnliftableWitnessError(f"branch {src.branches[b]} is not covered")
        alloc[b] = h
    return make_solution(src, opened, CoverWitness.from_mapping(alloc))


def _lift_queens(record: ReductionRecord, sol: Solution) -> tuple[tuple[int, int], ...]:
    q: QueensInstance = record.source
    rows = record.tables["row"]
    squares = record.tables["square"]
    w = sol.witness
    if not isinstance(w, SingleWitness):
        raise UnliftableWitnessError("queens lifting needs a single allocation witness")
    placement = []
    for b, h in w.allocation:
        r, c = squares[h]
        if r != rows[b]:
            raise UnliftableWitnessError(f"branch B{rows[b]} allocated to square outside its row")
        placement.append((r, c))
    placement.sort()
    if not q.is_completion(placement):
        raise UnliftableWitnessError("allocation does not describe a valid completion")
    return tuple(placement)


_LIFTERS = {
    "v2-to-v1": _lift_v2_to_v1,
    "v3-to-v2": _lift_v3_to_v2,
    "setcover-to-v3": _lift_setcover_to_v3,
    "v3-to-setcover": _lift_v3_to_setcover,
    "queens-to-sa2": _lift_queens,
}


def lift_solution(record: ReductionRecord, target_solution):
    """Map a target solution back to the source problem.

    Returns a :class:`Solution` for HCP sources, a :class:`SetCoverSolution`
    for set cover sources and a queens placement for queens sources.
    """
    try:
        lifter = _LIFTERS[record.kind]
    except KeyError:
        raise ValueError(f"unknown reduction kind {record.kind!r}") from None
    return lifter(record, target_solution)


def lift_chain(records: Sequence[ReductionRecord], target_solution):
    """Lift through several reductions, last one first."""
    sol = target_solution
    for record in reversed(records):
        sol = lift_solution(record, sol)
    return sol
