from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cofinitary.errors import EmptyWord, InvalidGroupTable, UnknownElement, WordSyntaxError
from cofinitary.words import (
    EPSILON,
    GROUND,
    HELEM,
    FiniteGroupTable,
    Letter,
    Word,
    enumerate_good,
    is_good,
    parse_word,
    reduce,
    relation_is_identity,
)

a, A = Letter("a", 1), Letter("a", -1)
b, B = Letter("b", 1), Letter("b", -1)


def test_reduce_examples():
    assert reduce([a, A]) == EPSILON
    assert reduce([a, b, B, a]) == Word((a, a))
    assert reduce([a, b]) == Word((a, b))


def test_word_rejects_unreduced_input():
    with pytest.raises(WordSyntaxError):
        Word((a, A))
    with pytest.raises(WordSyntaxError):
        parse_word("a^2")


def test_parse_and_print_round_trip():
    w = parse_word("a b^-1 c", ground=["b"])
    assert str(w) == "a b^-1 c"
    assert w[1].kind == GROUND
    assert parse_word("a a^-1 b") == Word((b,))


def test_is_good_examples():
    assert is_good(Word((a, a, a)))
    assert not is_good(Word((a, b, a)))
    assert is_good(Word((a, b)))
    # the base name decides, so a^-1 b a is not good
    assert not is_good(Word((A, b, a)))
    with pytest.raises(EmptyWord):
        is_good(EPSILON)


def test_enumerate_good_examples():
    assert enumerate_good(["a"], 1) == [Word((a,)), Word((A,))]
    assert enumerate_good(["a"], 2) == [Word((a,)), Word((A,)), Word((a, a)), Word((A, A))]
    assert enumerate_good(["a", "b"], 1) == [Word((x,)) for x in (a, A, b, B)]


def test_relation_is_identity_examples():
    z3 = FiniteGroupTable.cyclic(3)
    assert relation_is_identity(parse_word("g g g", helem=z3.names), z3)
    assert not relation_is_identity(parse_word("g", helem=z3.names), z3)
    z2 = FiniteGroupTable.cyclic(2, "t")
    assert relation_is_identity(parse_word("t t^-1 t t", helem=z2.names), z2)
    with pytest.raises(UnknownElement):
        relation_is_identity(parse_word("q"), z2)


def test_group_table_validation():
    assert FiniteGroupTable.symmetric3().order == 6
    with pytest.raises(InvalidGroupTable):
        FiniteGroupTable(("e", "x"), ((0, 1), (1, 1)))


# ------------------------------------------------------------------ properties

letters = st.sampled_from([a, A, b, B, Letter("c", 1, GROUND), Letter("c", -1, GROUND)])
raw_words = st.lists(letters, max_size=12)


@given(raw_words)
def test_reduce_idempotent_and_shortening(xs):
    w = reduce(xs)
    assert reduce(w.letters) == w
    assert len(w) <= len(xs)


@given(raw_words)
def test_word_times_inverse_is_empty(xs):
    w = reduce(xs)
    assert w * w.inverse() == EPSILON


def _brute_good(names, max_len):
    alphabet = [Letter(n, e) for n in sorted(names) for e in (1, -1)]
    out = set()
    for n in range(1, max_len + 1):
        for t in itertools.product(alphabet, repeat=n):
            w = reduce(t)
            if len(w) == n and is_good(w):
                out.add(w)
    return out


@pytest.mark.parametrize("names,max_len", [(["a"], 4), (["a", "b"], 3), (["a", "b", "c"], 2)])
def test_enumerate_good_complete_and_sound(names, max_len):
    got = enumerate_good(names, max_len)
    assert all(is_good(w) for w in got)
    assert set(got) == _brute_good(names, max_len)
    assert [len(w) for w in got] == sorted(len(w) for w in got)


S3 = FiniteGroupTable.symmetric3()
h_letters = st.builds(Letter, st.sampled_from(S3.names), st.sampled_from([1, -1]), st.just(HELEM))


@given(st.lists(h_letters, max_size=6), st.lists(h_letters, max_size=6))
def test_relation_respects_concatenation(u, v):
    wu, wv = reduce(u), reduce(v)
    expected = S3.mul[S3.product(wu)][S3.product(wv)] == S3.id_index
    assert relation_is_identity(wu * wv, S3) == expected
