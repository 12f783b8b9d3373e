import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hubcover.errors import WitnessMismatchError, WrongVariantError
from hubcover.exact import feasible_with_hubs
from hubcover.feasibility import Family, tour_feasible, tour_length, verify_solution
from hubcover.generators import GeneratorSpec, generate_instance
from hubcover.model import (
    AdjacencyGraph,
    MetricMatrix,
    MultiWitness,
    SingleWitness,
    Tour,
    build_instance,
    make_solution,
)
from hubcover.reductions import queens_to_sa2

from oracles import raw_tour_ok


def line_instance(d_bh, d_hh, d_hb2, alpha, phi):
    # branches b, b2 and hubs h, h2; distances chosen so the metric stays valid
    big = d_bh + d_hh + d_hb2
    rows = [
        [0, big, d_bh, d_bh + d_hh],
        [big, 0, d_hh + d_hb2, d_hb2],
        [d_bh, d_hh + d_hb2, 0, d_hh],
        [d_bh + d_hh, d_hb2, d_hh, 0],
    ]
    return build_instance(["b", "b2"], ["h", "h2"], [1, 1], MetricMatrix.from_rows(rows),
                          [(0, 1)], alpha, phi, "v1", "multi")


def test_two_hub_tour_length_matches_p2():
    inst = line_instance(1, 1, 1, Fraction(1, 2), Fraction(11, 4))
    t = Tour(0, 0, 1, 1)
    assert tour_length(inst, t) == Fraction(5, 2)
    assert tour_feasible(inst, t)


def test_single_hub_tour_length_matches_p1(figure5):
    # B1 - H1 - B2 over two weight-1 legs
    assert tour_length(figure5, Tour(0, 0, 0, 1)) == 2


def test_zero_metric_tour_length():
    inst = line_instance(0, 0, 0, 1, 0)
    assert tour_length(inst, Tour(0, 0, 1, 1)) == 0


def test_length_three_fails_at_phi_two_point_seven_five(figure5):
    # B1 - H3 - B2 uses the weight-2 leg H3-B2
    t = Tour(0, 2, 2, 1)
    assert tour_length(figure5, t) == 3
    assert not tour_feasible(figure5, t)


def test_v2_tours_on_figure4(figure4):
    assert tour_feasible(figure4, Tour(0, 0, 0, 1))       # B1-H1-B2
    assert not tour_feasible(figure4, Tour(0, 2, 2, 1))   # H3-B2 missing
    assert tour_feasible(figure4, Tour(0, 2, 1, 1))       # B1-H3-H2-B2
    assert not tour_feasible(figure4, Tour(0, 0, 1, 1))   # H1-H2 missing


def test_v2_alpha_zero_exempts_hub_leg(figure4):
    relaxed = figure4.replace(alpha=0)
    assert tour_feasible(relaxed, Tour(0, 0, 1, 1))


def test_tour_length_wrong_variant(figure4):
    with pytest.raises(WrongVariantError):
        tour_length(figure4, Tour(0, 0, 0, 1))


def test_attacking_allocation_is_rejected(queens3_c3):
    target = queens_to_sa2(queens3_c3).target
    h = {name: i for i, name in enumerate(target.hubs)}
    alloc = {0: h["b1"], 1: h["a2"], 2: h["c3"]}
    sol = make_solution(target, alloc.values(), SingleWitness.from_mapping(alloc))
    report = verify_solution(target, sol)
    assert not report.ok
    assert report.families() <= {Family.MISSING_EDGE, Family.SINGLE_ALLOCATION_BROKEN}
    assert any("(B1,B2)" in v.obj for v in report.violations)


def test_empty_everything_is_ok():
    for variant, geom, phi in (("v1", MetricMatrix(()), 0), ("v2", AdjacencyGraph(), None)):
        inst = build_instance([], [], [], geom, [], 0, phi, variant, "multi")
        assert verify_solution(inst, make_solution(inst, [], MultiWitness(()))).ok


def test_closed_hub_detected(figure4):
    sol = make_solution(figure4, [], MultiWitness.from_mapping({(0, 1): Tour(0, 0, 0, 1)}))
    report = verify_solution(figure4, sol)
    assert report.families() == {Family.CLOSED_HUB_USED}


def test_missing_task_and_capacity(figure4):
    capped = figure4.replace(capacity=1)
    sol = make_solution(capped, [0, 1], MultiWitness(()))
    report = verify_solution(capped, sol)
    assert [v.family for v in report.violations] == [
        Family.TASK_COVERAGE, Family.CAPACITY_EXCEEDED
    ]


def test_witness_kind_mismatch(figure4):
    with pytest.raises(WitnessMismatchError):
        verify_solution(figure4, make_solution(figure4, [0], SingleWitness(())))


def test_stated_cost_is_checked(figure4):
    from hubcover.model import Solution

    sol = Solution(frozenset({0}), MultiWitness.from_mapping({(0, 1): Tour(0, 0, 0, 1)}),
                   Fraction(7))
    assert verify_solution(figure4, sol).families() == {Family.COST_MISMATCH}


def _all_allocations(inst):
    return itertools.product(range(inst.n_hubs), repeat=inst.n_branches)


@pytest.mark.parametrize("family", ["euclidean-v1", "random-graph-v2"])
def test_single_allocation_verdict_matches_brute_force(family):
    checked = 0
    for seed in range(60):
        spec = GeneratorSpec(family, branches=3, hubs=3, allocation="single",
                             task_density=0.4, cost_max=3)
        inst = generate_instance(spec, seed)
        for alloc in _all_allocations(inst):
            sol = make_solution(inst, set(alloc), SingleWitness.from_mapping(dict(enumerate(alloc))))
            expected = all(raw_tour_ok(inst, b, alloc[b], alloc[b2], b2) for b, b2 in inst.tasks)
            if inst.variant.value == "v2":
                expected = expected and all(
                    (b, alloc[b]) in inst.geometry.branch_hub for b in range(inst.n_branches)
                )
            assert verify_solution(inst, sol).ok == expected
            checked += 1
    assert checked > 1000


@pytest.mark.parametrize("family", ["euclidean-v1", "random-graph-v2"])
def test_multi_solution_replayed_as_single(family):
    # an MA witness whose tours agree with one allocation verifies under SA iff every tour passes
    for seed in range(40):
        inst = generate_instance(
            GeneratorSpec(family, branches=3, hubs=3, allocation="single", task_density=0.5), seed
        )
        multi = inst.replace(allocation="multi")
        for alloc in _all_allocations(inst):
            tours = {t: Tour(t[0], alloc[t[0]], alloc[t[1]], t[1]) for t in inst.tasks}
            ma = make_solution(multi, set(alloc), MultiWitness.from_mapping(tours))
            sa = make_solution(inst, set(alloc), SingleWitness.from_mapping(dict(enumerate(alloc))))
            assert verify_solution(inst, sa).ok == verify_solution(multi, ma).ok


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), extra=st.sets(st.integers(0, 4)))
def test_monotone_in_open_hubs(seed, extra):
    inst = generate_instance(GeneratorSpec("random-graph-v2", branches=3, hubs=5), seed)
    witness = feasible_with_hubs(inst, range(inst.n_hubs))
    if witness is None:
        return
    used = witness.hubs()
    sol = make_solution(inst, used, witness)
    assert verify_solution(inst, sol).ok
    bigger = make_solution(inst, used | extra, witness)
    assert verify_solution(inst, bigger).ok
    # every MA tour of an accepted solution is individually valid
    for _, tour in witness.tours:
        assert tour_feasible(inst, tour)


def test_verify_is_deterministic(queens3_c3):
    target = queens_to_sa2(queens3_c3).target
    alloc = {0: 0, 1: 3, 2: 8}
    sol = make_solution(target, alloc.values(), SingleWitness.from_mapping(alloc))
    assert verify_solution(target, sol) == verify_solution(target, sol)
