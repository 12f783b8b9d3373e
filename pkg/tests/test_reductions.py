import random

import pytest

from hubcover.errors import UnliftableWitnessError, WrongSettingError, WrongVariantError
from hubcover.exact import Limits, Status, feasible_with_hubs, solve_exact
from hubcover.feasibility import verify_solution
from hubcover.formats import serialize_instance, serialize_setcover
from hubcover.generators import GeneratorSpec, generate_instance, random_queens, random_setcover
from hubcover.model import (
    AdjacencyGraph,
    QueensInstance,
    SetCoverSolution,
    SingleWitness,
    build_instance,
    make_solution,
)
from hubcover.reductions import (
    ReductionRecord,
    lift_chain,
    lift_solution,
    queens_to_sa2,
    reduce_v2_to_v1,
    reduce_v3_to_v2,
    setcover_to_v3,
    solve_queens_completion,
    v3_to_setcover,
)

from oracles import brute_optimum, brute_setcover, queens_brute


def assert_equivalent(record, source_opt):
    res = solve_exact(record.target)
    assert res.optimum == source_opt
    if res.feasible:
        lifted = lift_solution(record, res.solution)
        assert verify_solution(record.source, lifted).ok
        assert lifted.cost == res.optimum


def test_figure5_golden(figure4, figure5):
    target = reduce_v2_to_v1(figure4).target
    assert serialize_instance(target) == serialize_instance(figure5)


def test_v2_to_v1_without_edges_is_infeasible():
    inst = build_instance(["a", "b"], ["h"], [1], AdjacencyGraph(), [(0, 1)], 1, None,
                          "v2", "multi")
    target = reduce_v2_to_v1(inst).target
    assert all(target.dist(0, v) == 2 for v in (1, 2))
    assert solve_exact(inst).status is solve_exact(target).status is Status.INFEASIBLE


def test_v2_to_v1_wrong_variant(figure5):
    with pytest.raises(WrongVariantError):
        reduce_v2_to_v1(figure5)


@pytest.mark.parametrize("alloc", ["multi", "single"])
@pytest.mark.parametrize("alpha", [0, 1])
def test_v2_to_v1_equivalence(alloc, alpha):
    for seed in range(40):
        inst = generate_instance(GeneratorSpec("random-graph-v2", branches=3, hubs=4, cost_max=3,
                                               allocation=alloc, alpha=alpha,
                                               task_density=0.4), seed)
        assert_equivalent(reduce_v2_to_v1(inst), brute_optimum(inst))


@pytest.mark.parametrize("alloc", ["multi", "single"])
def test_v3_to_v2_equivalence(alloc):
    rng = random.Random(5)
    for seed in range(60):
        inst = generate_instance(GeneratorSpec("bipartite-v3", branches=4, hubs=4, cost_max=3,
                                               edge_prob=0.4), seed)
        record = reduce_v3_to_v2(inst, b0=rng.randrange(4), allocation=alloc)
        assert record.target.alpha == 0
        assert_equivalent(record, brute_optimum(inst))


def test_v3_to_v2_single_branch():
    inst = build_instance(["b"], ["h1", "h2"], [2, 1],
                          AdjacencyGraph.from_edges([(0, 0), (0, 1)]), [], 0, None, "v3", "single")
    record = reduce_v3_to_v2(inst)
    assert record.target.tasks == ((0, 0),)
    assert_equivalent(record, 1)


def test_v3_to_v2_keeps_capacity(figure11):
    capped = figure11.replace(capacity=1)
    assert reduce_v3_to_v2(capped).target.capacity == 1
    assert solve_exact(reduce_v3_to_v2(capped).target).status is Status.INFEASIBLE


def test_v3_and_setcover_goldens_correspond(figure11, figure12):
    assert serialize_setcover(v3_to_setcover(figure11).target) == serialize_setcover(figure12)
    assert serialize_instance(setcover_to_v3(figure12).target) == serialize_instance(figure11)


def test_setcover_round_trip():
    rng = random.Random(2)
    for _ in range(200):
        sc = random_setcover(rng)
        back = v3_to_setcover(setcover_to_v3(sc).target).target
        assert serialize_setcover(back) == serialize_setcover(sc)


def test_setcover_to_v3_equivalence():
    rng = random.Random(8)
    for _ in range(150):
        sc = random_setcover(rng, max_elements=5, max_sets=5)
        record = setcover_to_v3(sc)
        opt = brute_setcover(sc)
        res = solve_exact(record.target)
        assert res.optimum == opt
        if opt is not None:
            cover = lift_solution(record, res.solution)
            assert isinstance(cover, SetCoverSolution)
            assert sc.covers(cover.chosen) and cover.weight == opt


def test_v3_to_setcover_drops_isolated_hubs_and_lifts():
    inst = build_instance(["a", "b"], ["h1", "h2", "h3"], [1, 1, 1],
                          AdjacencyGraph.from_edges([(0, 0), (1, 2)]), [], 0, None, "v3", "single")
    record = v3_to_setcover(inst)
    assert record.tables["hub"] == (0, 2)
    sol = lift_solution(record, [0, 1])
    assert sol.open_hubs == {0, 2} and verify_solution(inst, sol).ok
    with pytest.raises(UnliftableWitnessError):
        lift_solution(record, [0])
    with pytest.raises(WrongSettingError):
        v3_to_setcover(inst.replace(capacity=2))


C3_BOARD_HUB_EDGES = {
    ("a3", "b1"), ("c3", "b1"), ("b3", "a1"), ("b3", "c1"),
    ("a2", "c1"), ("c2", "a1"), ("a2", "c3"), ("c2", "a3"),
}
C3_BOARD_BRANCH_EDGES = {
    ("B1", "a1"), ("B1", "b1"), ("B1", "c1"),
    ("B2", "a2"), ("B2", "b2"), ("B2", "c2"),
    ("B3", "c3"),
}


def test_queens_c3_board_graph(queens3_c3):
    target = queens_to_sa2(queens3_c3).target
    g = target.geometry
    hub_edges = {frozenset((target.hubs[h], target.hubs[h2])) for h, h2 in g.hub_hub}
    assert hub_edges == {frozenset(e) for e in C3_BOARD_HUB_EDGES}
    assert {(target.branches[b], target.hubs[h]) for b, h in g.branch_hub} == C3_BOARD_BRANCH_EDGES
    assert target.tasks == ((0, 1), (0, 2), (1, 2))
    assert solve_exact(target).status is Status.INFEASIBLE


def test_queens_single_square():
    record = queens_to_sa2(QueensInstance(1))
    assert record.target.tasks == ((0, 0),)
    res = solve_exact(record.target)
    assert lift_solution(record, res.solution) == ((1, 1),)


def test_queens_two_by_two_infeasible():
    assert solve_exact(queens_to_sa2(QueensInstance(2)).target).status is Status.INFEASIBLE


def test_queens_completion_matches_brute_force():
    rng = random.Random(4)
    for _ in range(80):
        n = rng.choice([3, 4, 5, 6])
        q = random_queens(rng, n, rng.randint(0, n // 2))
        placement = solve_queens_completion(q)
        assert (placement is not None) == queens_brute(n, q.placed)
        if placement is not None:
            assert q.is_completion(placement)


def test_queens_reduction_equivalence_n4():
    rng = random.Random(9)
    for _ in range(40):
        q = random_queens(rng, 4, rng.randint(0, 2))
        record = queens_to_sa2(q)
        witness = feasible_with_hubs(record.target, range(16))
        assert (witness is not None) == (solve_queens_completion(q) is not None)
        if witness is not None:
            sol = make_solution(record.target, witness.hubs(), witness)
            assert q.is_completion(lift_solution(record, sol))


def test_queens_lift_rejects_attacking_allocation(queens3_c3):
    record = queens_to_sa2(queens3_c3)
    h = {name: i for i, name in enumerate(record.target.hubs)}
    alloc = {0: h["b1"], 1: h["a2"], 2: h["c3"]}
    sol = make_solution(record.target, alloc.values(), SingleWitness.from_mapping(alloc))
    with pytest.raises(UnliftableWitnessError):
        lift_solution(record, sol)


def test_record_json_round_trip(figure4, queens3_c3, figure12):
    for record in (reduce_v2_to_v1(figure4), queens_to_sa2(queens3_c3), setcover_to_v3(figure12),
                   reduce_v3_to_v2(setcover_to_v3(figure12).target, b0=2)):
        again = ReductionRecord.from_json(record.to_json())
        assert again.to_json() == record.to_json()
        assert again.tables == record.tables


def test_record_digest_is_checked(figure4):
    text = reduce_v2_to_v1(figure4).to_json().replace('"source_digest": "', '"source_digest": "0')
    with pytest.raises(ValueError):
        ReductionRecord.from_json(text)


def test_lift_chain_setcover_to_v1(figure12):
    r1 = setcover_to_v3(figure12)
    r2 = reduce_v3_to_v2(r1.target)
    r3 = reduce_v2_to_v1(r2.target)
    res = solve_exact(r3.target, Limits())
    cover = lift_chain([r1, r2, r3], res.solution)
    assert cover.weight == 2 and figure12.covers(cover.chosen)
