from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cofinitary.errors import InvalidPartition, NoDisjointOrbit
from cofinitary.evaluate import GenericState, eval_relation
from cofinitary.orbits import (
    GreedyBuilder,
    PartitionSpec,
    PeriodicSet,
    check_claims,
    greedy_build,
    greedy_step,
    greedy_trace,
    min_of_orbit,
    next_disjoint_orbit,
    orbit_graph,
    orbit_of,
    walk_witness,
)
from cofinitary.perm import ExactPerm, PartialInj, block_cycle3
from cofinitary.words import GENERIC, GROUND, enumerate_good

SINGLETONS = PartitionSpec.singletons()


def test_orbit_queries():
    assert orbit_of(SINGLETONS, 7) == 7 and min_of_orbit(SINGLETONS, 7) == 7
    assert orbit_of(PartitionSpec.blocks(3), 7) == 2
    assert min_of_orbit(PartitionSpec.blocks(3), 2) == 6
    assert next_disjoint_orbit(SINGLETONS, {0, 1}) == 2
    r = PartitionSpec.residues(5)
    assert r.orbit_count() == 5 and orbit_of(r, 12) == 2
    assert SINGLETONS.orbit_count() is None


def test_greedy_step_examples():
    assert greedy_step(PartialInj(), SINGLETONS).sorted_pairs() == [(0, 1)]
    assert greedy_step(PartialInj([(0, 1)]), SINGLETONS).sorted_pairs() == [(0, 1), (2, 0)]
    one = PartitionSpec.explicit_periodic([], [("g", 0)])
    with pytest.raises(NoDisjointOrbit):
        greedy_step(PartialInj(), one)


def test_greedy_build_examples():
    assert greedy_trace(SINGLETONS, 4) == [(0, 1), (2, 0), (1, 3), (4, 2)]
    assert greedy_build(SINGLETONS, 4).sorted_pairs() == [(0, 1), (1, 3), (2, 0), (4, 2)]
    assert len(greedy_build(PartitionSpec.blocks(3), 0)) == 0
    assert greedy_trace(PartitionSpec.blocks(2), 2) == [(0, 2), (4, 0)]


def test_residues_run_out_of_orbits():
    with pytest.raises(NoDisjointOrbit) as info:
        greedy_build(PartitionSpec.residues(5), 10)
    assert info.value.stage == 4


def test_orbit_graph_examples():
    g = orbit_graph(greedy_build(SINGLETONS, 4), SINGLETONS)
    assert sorted(g.simple_edges()) == [(0, 1), (0, 2), (1, 3), (2, 4)]
    assert orbit_graph(PartialInj(), SINGLETONS).simple_edges() == []
    assert orbit_graph(PartialInj([(0, 0)]), SINGLETONS).simple_edges() == []


def test_check_claims_examples():
    rep = check_claims(greedy_build(SINGLETONS, 100), SINGLETONS)
    assert rep["acyclic"] and rep["one_edge_per_pair"] and rep["violations"] == []
    b2 = PartitionSpec.blocks(2)
    rep = check_claims(PartialInj([(0, 2), (1, 3)]), b2)
    assert not rep["one_edge_per_pair"] and rep["acyclic"]
    rep = check_claims(PartialInj([(0, 2), (3, 1)]), b2)
    assert rep["acyclic"] and not rep["one_edge_per_pair"] and rep["violations"]


def test_mixed_partition_pieces():
    odd = PeriodicSet(2, (1,), start=3)
    even = PeriodicSet(2, (0,), start=3)
    p = PartitionSpec.mixed([[0, 1, 2]], [odd, even])
    assert orbit_of(p, 1) == orbit_of(p, 2) == 0
    assert orbit_of(p, 5) == orbit_of(p, 9)
    assert p.piece_of(7) != p.piece_of(8)
    with pytest.raises(InvalidPartition):
        PartitionSpec.mixed([[3, 4]], [odd])


def test_builder_matches_literal_step():
    for p in (SINGLETONS, PartitionSpec.blocks(2), PartitionSpec.blocks(3)):
        h = PartialInj()
        b = GreedyBuilder(p)
        for _ in range(60):
            h = greedy_step(h, p)
            b.step()
        assert b.result() == h


# ------------------------------------------------------------------ properties

PARTITIONS = [SINGLETONS, PartitionSpec.blocks(2), PartitionSpec.blocks(3)]


@given(st.sampled_from(PARTITIONS), st.integers(0, 400))
def test_greedy_invariants(p, stages):
    h = greedy_build(p, stages)
    assert len(h) == stages
    assert all(a != v for a, v in h)
    assert all(orbit_of(p, a) != orbit_of(p, v) for a, v in h)
    covered = h.dom() | h.ran()
    assert set(range((stages + 1) // 2)) <= covered
    rep = check_claims(h, p)
    assert rep["acyclic"] and rep["one_edge_per_pair"]


B3 = ExactPerm.from_block([0, 2, 1])
C3 = block_cycle3()
WALK_WORDS = [
    w
    for w in enumerate_good([("x", GENERIC), ("b", GROUND), ("c", GROUND)], 4)
    if "x" in w.names() and w.names(GROUND)
]


@pytest.mark.parametrize("word", WALK_WORDS[::7], ids=str)
def test_walk_argument_finds_ground_fixed_points(word):
    p = PartitionSpec.blocks(3)
    rho = {"b": B3, "c": C3}
    h = greedy_build(p, 400)
    s = GenericState({"x": h})
    for alpha, beta in eval_relation(word, s, rho, 512):
        if alpha == beta:
            assert walk_witness(word, h, rho, "x", alpha) is not None
