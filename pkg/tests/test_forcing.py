from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cofinitary.errors import AlreadyDefined, ClosureConflict, KindMismatch, NotEmbedKind, SearchExhausted
from cofinitary.evaluate import GenericState, eval_relation, word_fixed_points
from cofinitary.forcing import (
    EMBED,
    Condition,
    DomainHit,
    FunctionHit,
    RangeHit,
    RelationClosure,
    TargetHit,
    WordAdd,
    apply_relations,
    common_lower_bound,
    empty_condition,
    extend_hit,
    forbidden_values,
    generic_run,
    is_condition,
    leq,
    meets,
    replay,
)
from cofinitary.perm import PeriodicMap, block_cycle3, block_swap
from cofinitary.words import GENERIC, GROUND, FiniteGroupTable, enumerate_good, parse_word

RHO = {"b": block_swap(), "c": block_cycle3()}
Z2 = FiniteGroupTable.cyclic(2, "t")
A = parse_word("a")


def free(pairs=(), words=()):
    return Condition(GenericState.from_triples(pairs), frozenset(words))


def embed(H, pairs=(), words=()):
    return Condition(GenericState.from_triples(pairs), frozenset(parse_word(w, helem=H.names) for w in words), EMBED, H)


def test_is_condition_examples():
    assert is_condition(empty_condition(), RHO)
    assert is_condition(embed(Z2, [("t", 3, 7)], ["t t"]), RHO)
    assert not is_condition(embed(Z2, [("t", 3, 7), ("t", 7, 5)], ["t t"]), RHO)


def test_leq_examples():
    c2 = free(words=[A])
    assert leq(c2, c2, RHO)
    assert not leq(free([("a", 5, 5)], [A]), c2, RHO)
    assert leq(free([("a", 5, 6)], [A]), c2, RHO)
    assert not leq(free(words=[]), c2, RHO)
    with pytest.raises(KindMismatch):
        leq(empty_condition(EMBED, Z2), c2, RHO)


def test_forbidden_values_examples():
    assert forbidden_values(free(words=[A]), RHO, "a", 5) == {5}
    assert forbidden_values(free([("a", 0, 1)], [A]), RHO, "a", 5) == {1, 5}
    assert forbidden_values(free(), RHO, "a", 5) == frozenset()
    with pytest.raises(AlreadyDefined):
        forbidden_values(free([("a", 5, 6)]), RHO, "a", 5)


def test_extend_hit_examples():
    c = free(words=[A])
    assert extend_hit(c, RHO, DomainHit("a", 5)).s.get("a").sorted_pairs() == [(5, 0)]
    assert extend_hit(c, RHO, RangeHit("a", 0)).s.get("a").sorted_pairs() == [(1, 0)]
    w = parse_word("a b", ground=RHO)
    d = extend_hit(c, RHO, WordAdd(w))
    assert d.s == c.s and d.F == c.F | {w}
    f = PeriodicMap.from_residues(2, {0: 1})
    assert extend_hit(c, RHO, FunctionHit("a", f)).s.get("a").sorted_pairs() == [(0, 1)]
    t = PeriodicMap.identity_on(3, [0])
    hit = extend_hit(c, RHO, TargetHit("a", t)).s.get("a").sorted_pairs()
    assert hit == [(0, 3)]


def test_extend_hit_reports_exhaustion():
    c = free(words=[A])
    with pytest.raises(SearchExhausted):
        extend_hit(c, RHO, FunctionHit("a", PeriodicMap.identity_on(1, [0])), bound=64)


def test_apply_relations_examples():
    c = embed(Z2, [("t", 3, 7)])
    closed = apply_relations(c, RHO, ["t"])
    assert closed.s.get("t").sorted_pairs() == [(3, 7), (7, 3)]
    assert apply_relations(closed, RHO, ["t"]) == closed
    assert leq(closed, c, RHO) and is_condition(closed, RHO)
    assert apply_relations(empty_condition(EMBED, Z2), RHO, ["t"]).s.size() == 0
    with pytest.raises(NotEmbedKind):
        apply_relations(free(), RHO, ["a"])
    assert extend_hit(c, RHO, RelationClosure(("t",))) == closed


def test_embed_domain_hit_uses_fresh_values():
    c = embed(Z2, [("t", 3, 7)], ["t"])
    d = extend_hit(c, RHO, DomainHit("t", 0))
    assert d.s.get("t").get(0) == 8


def test_embed_fresh_values_avoid_other_letters():
    S3 = FiniteGroupTable.symmetric3()
    schedule = [DomainHit("s", 2), RangeHit("sr", 1), DomainHit("sr2", 2), DomainHit("r", 3)]
    final = generic_run(empty_condition(EMBED, S3), RHO, schedule).final
    assert final.s.get("sr2").get(2) not in {3, 1}
    for name in S3.non_identity():
        assert is_condition(apply_relations(final, RHO, [name]), RHO)


def test_closure_of_a_shared_value_is_not_injective():
    # two letters sending 2 to 3 is a legal state, but closing it is not
    S3 = FiniteGroupTable.symmetric3()
    c = embed(S3, [("s", 2, 3), ("sr", 2, 1), ("sr2", 2, 3)])
    assert is_condition(c, RHO)
    with pytest.raises(ClosureConflict):
        apply_relations(c, RHO, ["r"])


def test_generic_run_examples():
    trace = generic_run(empty_condition(), RHO, [DomainHit("a", k) for k in range(8)])
    s_a = trace.final.s.get("a")
    assert s_a.dom() == set(range(8)) and len(s_a.ran()) == 8
    assert replay(trace.initial, trace.stages) == trace.final
    assert generic_run(empty_condition(), RHO, []).final == empty_condition()
    trace = generic_run(empty_condition(), RHO, [WordAdd(A), DomainHit("a", 0)])
    assert trace.final.s.get("a").sorted_pairs() == [(0, 1)]
    assert all(meets(trace.final, spec) for spec in trace.schedule)


def test_common_lower_bound():
    s = [("a", 0, 1)]
    c1, c2 = free(s, [A]), free(s, [parse_word("a a")])
    d = common_lower_bound(c1, c2)
    assert leq(d, c1, RHO) and leq(d, c2, RHO)


# ------------------------------------------------------------------ properties

WORDS = [w for w in enumerate_good([("a", GENERIC), ("d", GENERIC), ("b", GROUND), ("c", GROUND)], 3) if not w.is_ground_only()]


@st.composite
def conditions(draw, top=20):
    triples = []
    for name in ("a", "d"):
        args = draw(st.lists(st.integers(0, top), max_size=3, unique=True))
        vals = draw(st.lists(st.integers(0, top), min_size=len(args), max_size=len(args), unique=True))
        triples += [(name, x, y) for x, y in zip(args, vals)]
    words = draw(st.lists(st.sampled_from(WORDS), max_size=3))
    return free(triples, words)


@st.composite
def extension_of(draw, c, top=24):
    s = c.s
    for _ in range(draw(st.integers(0, 3))):
        name = draw(st.sampled_from(["a", "d"]))
        m = s.get(name)
        x = draw(st.integers(0, top).filter(lambda v: not m.has_arg(v)))
        y = draw(st.integers(0, top).filter(lambda v: not m.has_val(v)))
        s = s.with_pair(name, x, y)
    extra = draw(st.lists(st.sampled_from(WORDS), max_size=2))
    return Condition(s, c.F | frozenset(extra))


def _brute_leq(c1, c2, bound=512):
    if not c1.s.issuperset(c2.s) or not c1.F >= c2.F:
        return False
    for w in c2.F:
        new = {x for x, y in eval_relation(w, c1.s, RHO, bound) if x == y}
        old = {x for x, y in eval_relation(w, c2.s, RHO, bound) if x == y}
        if not new <= old:
            return False
    return True


@given(st.data())
def test_leq_matches_bounded_definition(data):
    c2 = data.draw(conditions())
    c1 = data.draw(extension_of(c2))
    assert leq(c1, c2, RHO) == _brute_leq(c1, c2)
    assert leq(c1, c1, RHO)


@given(st.data())
def test_leq_transitive_and_antisymmetric(data):
    c3 = data.draw(conditions())
    c2 = data.draw(extension_of(c3))
    c1 = data.draw(extension_of(c2))
    if leq(c1, c2, RHO) and leq(c2, c3, RHO):
        assert leq(c1, c3, RHO)
    if leq(c1, c2, RHO) and leq(c2, c1, RHO):
        assert c1 == c2


@given(conditions(), st.sampled_from(["a", "d"]), st.sampled_from(["domain", "range"]), st.integers(0, 30))
def test_forbidden_values_exact(c, name, direction, alpha):
    m = c.s.get(name)
    if (m.has_arg if direction == "domain" else m.has_val)(alpha):
        return
    forb = forbidden_values(c, RHO, name, alpha, direction)
    for beta in range(64):
        pair = (alpha, beta) if direction == "domain" else (beta, alpha)
        if (m.has_val if direction == "domain" else m.has_arg)(beta):
            ok = False
        else:
            ok = leq(Condition(c.s.with_pair(name, *pair), c.F), c, RHO)
        assert (beta not in forb) == ok


@given(conditions())
def test_run_freezes_fixed_points(c):
    schedule = [DomainHit(n, k) for k in range(6) for n in ("a", "d")]
    trace = generic_run(c, RHO, schedule)
    for w in c.F:
        assert word_fixed_points(w, trace.final.s, RHO) == word_fixed_points(w, c.s, RHO)
    assert leq(trace.final, c, RHO)
