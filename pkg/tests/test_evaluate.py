from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cofinitary.errors import UnknownLetter
from cofinitary.evaluate import (
    GenericState,
    eval_relation,
    eval_word,
    ground_perm,
    new_fixed_points,
    word_fixed_points,
)
from cofinitary.perm import FINITE, IDENTITY_ON_DOMAIN, PartialInj, block_cycle3, block_swap
from cofinitary.words import GENERIC, GROUND, enumerate_reduced, parse_word

RHO = {"b": block_swap(), "c": block_cycle3()}


def w(text):
    return parse_word(text, ground=RHO)


def state(**maps):
    return GenericState({k: PartialInj(v) for k, v in maps.items()})


def test_eval_word_examples():
    assert eval_word(w("b"), state(), RHO, 4) == 5
    assert eval_word(w("b a"), state(a=[(0, 2)]), RHO, 0) == 3
    assert eval_word(w("a a"), state(a=[(0, 2)]), RHO, 0) is None
    with pytest.raises(UnknownLetter):
        eval_word(parse_word("z", ground=["z"]), state(), RHO, 0)


def test_eval_relation_examples():
    assert eval_relation(w("b"), state(), RHO, 4) == {(0, 1), (1, 0), (2, 3), (3, 2)}
    assert eval_relation(w("a"), state(a=[(0, 2)]), RHO, 4) == {(0, 2)}
    assert eval_relation(w("a^-1"), state(a=[(0, 2)]), RHO, 4) == {(2, 0)}


def test_word_fixed_points_examples():
    assert word_fixed_points(w("b b"), state(), RHO).kind == IDENTITY_ON_DOMAIN
    rep = word_fixed_points(w("a"), state(a=[(5, 5)]), RHO)
    assert rep.kind == FINITE and rep.finite_points == {5}
    rep = word_fixed_points(w("a b a^-1"), state(a=[(0, 10)]), RHO)
    assert rep.kind == FINITE and rep.finite_points == frozenset()
    assert not any(x == y for x, y in eval_relation(w("a b a^-1"), state(a=[(0, 10)]), RHO, 64))


def test_ground_perm_is_a_homomorphism():
    u, v = w("b c"), w("c^-1 b")
    assert ground_perm(u * v, RHO) == ground_perm(u, RHO) * ground_perm(v, RHO)


# ------------------------------------------------------------------ properties

ALPHABET = [("a", GENERIC), ("d", GENERIC), ("b", GROUND), ("c", GROUND)]
WORDS = enumerate_reduced(ALPHABET, 3)


@st.composite
def states(draw, size=8, top=24):
    triples = []
    for name in ("a", "d"):
        args = draw(st.lists(st.integers(0, top), max_size=size // 2, unique=True))
        vals = draw(st.lists(st.integers(0, top), min_size=len(args), max_size=len(args), unique=True))
        triples += [(name, x, y) for x, y in zip(args, vals)]
    return GenericState.from_triples(triples)


@given(states(), st.sampled_from(WORDS))
def test_eval_matches_relation_oracle(s, word):
    rel = eval_relation(word, s, RHO, 64)
    mine = {(x, eval_word(word, s, RHO, x)) for x in range(64)}
    assert rel == {(x, y) for x, y in mine if y is not None and y < 64}


@given(states(), st.sampled_from(WORDS))
def test_eval_is_injective_and_inverse_reverses(s, word):
    rel = eval_relation(word, s, RHO, 64)
    assert len({y for _, y in rel}) == len(rel)
    assert eval_relation(word.inverse(), s, RHO, 64) == {(y, x) for x, y in rel}


@given(states(), st.sampled_from([x for x in WORDS if not x.is_ground_only()]))
def test_fixed_points_stable_across_bounds(s, word):
    rep = word_fixed_points(word, s, RHO)
    assert rep.kind == FINITE
    for bound in (64, 128, 256):
        fixed = {x for x, y in eval_relation(word, s, RHO, bound) if x == y}
        assert fixed == set(rep.finite_points)


@given(st.sampled_from([x for x in WORDS if x.is_ground_only()]))
def test_ground_fixed_points_witnessed(word):
    rep = word_fixed_points(word, GenericState(), RHO)
    p = ground_perm(word, RHO)
    if rep.kind == IDENTITY_ON_DOMAIN:
        assert p.is_identity()
    elif rep.kind == FINITE:
        assert all(p(n) != n for n in range(p.head_len + 4 * p.period) if n not in rep.finite_points)
    else:
        r = min(rep.witness_residues)
        n = rep.offset + r + 5 * rep.period
        assert p(n) == n


@given(states(), states(), st.sampled_from([x for x in WORDS if not x.is_ground_only()]))
def test_new_fixed_points_is_the_difference(s, extra, word):
    merged = []
    for name, x, y in extra.triples():
        m = s.get(name)
        if not m.has_arg(x) and not m.has_val(y) and all(t[1] != x and t[2] != y for t in merged if t[0] == name):
            merged.append((name, x, y))
    t = GenericState.from_triples(s.triples() + merged)
    before = word_fixed_points(word, s, RHO).finite_points
    after = word_fixed_points(word, t, RHO).finite_points
    assert new_fixed_points(word, s, t, RHO) == set(after - before)
