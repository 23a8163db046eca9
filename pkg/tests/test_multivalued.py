import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_mv_minimal_q
from qcfix.classify import GENERALIZED, QUASI, minimal_q
from qcfix.metric import MultiMap, generate_space
from qcfix.multivalued import (
    build_selection,
    compose_multimap,
    mv_bound,
    mv_fixed_points,
    mv_iterate,
    mv_minimal_q,
    mv_rate_certificates,
)
from qcfix.picard import FixedPointFound, iterate
from qcfix.samplers import contractive_multimaps, random_instance

P1, P2, P3, P4, P5 = range(5)


def test_compose_single_valued_chain():
    s = generate_space(3, 1.0, 0)
    F = MultiMap([[1], [2], [2]])
    assert compose_multimap(s, F)(0) == {2}


def test_compose_is_union():
    s = generate_space(5, 1.0, 0)
    F = MultiMap([[1, 2], [3], [4], [3], [4]])
    assert compose_multimap(s, F)(0) == {3, 4}


def test_compose_constant_is_idempotent():
    s = generate_space(4, 1.0, 0)
    F = MultiMap([[2]] * 4)
    assert compose_multimap(s, F) == F


def test_constant_multimap_has_zero_modulus():
    s = generate_space(6, 0.5, 3)
    report = mv_minimal_q(s, MultiMap([[4]] * 6))
    assert report.minimal_q == 0 and report.contractive


def test_example_embedding_modulus(example_space, example_map):
    F = MultiMap.from_self_map(example_map)
    report = mv_minimal_q(example_space, F)
    assert report.minimal_q == 0.5
    single = minimal_q(example_space, example_map, GENERALIZED)
    assert (report.minimal_q, report.witness) == (single.minimal_q, single.witness)
    assert mv_minimal_q(example_space, F, QUASI).minimal_q == 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_singleton_embedding_is_exact(seed):
    inst = random_instance(seed)
    F = MultiMap.from_self_map(inst.map)
    for terms in (QUASI, GENERALIZED):
        mv = mv_minimal_q(inst.space, F, terms)
        sv = minimal_q(inst.space, inst.map, terms)
        assert (mv.minimal_q, mv.witness) == (sv.minimal_q, sv.witness)


@pytest.mark.parametrize("inst", list(contractive_multimaps(20, start_seed=1000)), ids=lambda i: f"seed{i.seed}")
def test_matches_set_functional_oracle(inst):
    assert mv_minimal_q(inst.space, inst.map).minimal_q == brute_mv_minimal_q(inst.space, inst.map)
    five = mv_minimal_q(inst.space, inst.map, QUASI).minimal_q
    assert five == brute_mv_minimal_q(inst.space, inst.map, five_terms=True)
    assert five >= inst.q


def test_selection_tie_breaks_to_smaller_index(example_space):
    F = MultiMap([[0], [0], [0], [1, 2], [2]])
    sel = build_selection(example_space, F, 0.5, 0.5)
    # d(4, 2) = d(4, 3) = 1
    assert sel.underlying(P4) == P2


def test_selection_of_singletons_is_the_map(example_space, example_map):
    for a in (0.1, 0.5, 0.9):
        sel = build_selection(example_space, MultiMap.from_self_map(example_map), 0.5, a)
        assert sel.underlying == example_map


@pytest.mark.parametrize("q, a", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
def test_selection_parameter_ranges(example_space, example_map, q, a):
    with pytest.raises(ValueError):
        build_selection(example_space, MultiMap.from_self_map(example_map), q, a)


@pytest.mark.parametrize("inst", list(contractive_multimaps(20, start_seed=2000)), ids=lambda i: f"seed{i.seed}")
def test_selection_invariant(inst):
    q = inst.q if inst.q > 0 else 0.5
    for a in (0.25, 0.5, 0.75):
        sel = build_selection(inst.space, inst.map, q, a)
        assert sel.invariant_violations(inst.space) == []
        assert all(sel.underlying(x) in inst.map(x) for x in inst.space.points())


def test_mv_iterate_on_embedded_example(example_space, example_map):
    trace = mv_iterate(example_space, MultiMap.from_self_map(example_map), P5, 0.5, 0.5)
    assert trace.outcome == FixedPointFound(P1, 2)
    assert trace.steps == (P5, P3, P1, P1)
    single = iterate(example_space, example_map, P5, 50)
    assert (trace.steps, trace.residuals, trace.outcome) == (single.steps, single.residuals, single.outcome)


def test_mv_iterate_at_strict_fixed_point():
    s = generate_space(4, 1.0, 9)
    F = MultiMap([[0], [0, 1], [2, 3], [1]])
    trace = mv_iterate(s, F, 0, 0.5)
    assert trace.outcome == FixedPointFound(0, 0)


def test_mv_bound_arithmetic():
    assert mv_bound(0.25, 0.5, 2, 1.0) == 0.5
    assert mv_bound(0.25, 0.5, 0, 1.0) == 2.0
    with pytest.raises(ValueError):
        mv_bound(1.0, 0.5, 1, 1.0)


def test_fixed_points_strict_and_weak():
    s = generate_space(4, 1.0, 9)
    F = MultiMap([[0], [0, 1], [2, 3], [1]])
    fixed = mv_fixed_points(s, F)
    assert fixed.strict == [0]
    assert fixed.weak == [0, 1, 2]


def test_fixed_points_of_embedded_example(example_space, example_map):
    assert mv_fixed_points(example_space, MultiMap.from_self_map(example_map)).strict == [P1]
    assert mv_fixed_points(example_space, MultiMap([[2]] * 5)).strict == [P3]


@pytest.mark.parametrize("inst", list(contractive_multimaps(20, start_seed=3000)), ids=lambda i: f"seed{i.seed}")
def test_theorem_on_seeded_multimaps(inst):
    s, F = inst.space, inst.map
    q = inst.q if inst.q > 0 else 2.0**-30
    (x_star,) = mv_fixed_points(s, F).strict
    for a in (0.25, 0.5, 0.75):
        sel = build_selection(s, F, q, a)
        assert minimal_q(s, sel.underlying).minimal_q <= q ** (1 - a) + 1e-12
        for x in s.points():
            trace = mv_iterate(s, F, x, q, a)
            assert trace.outcome.point == x_star
            assert all(b in F(p) for p, b in zip(trace.steps, trace.steps[1:]))
            assert all(c.holds for c in mv_rate_certificates(s, trace, x_star, q, a))
