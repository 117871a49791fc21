"""Evaluating words as partial injections of N.

Generic letters (and H letters, which play the same role in the embedding
poset) are read from a finite ``GenericState``; ground letters are total
eventually periodic permutations from a ground assignment.  Words are
evaluated right to left.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .errors import UnknownLetter
from .perm import (
    EMPTY,
    FINITE,
    IDENTITY_ON_DOMAIN,
    ExactPerm,
    FixedPointReport,
    PartialInj,
    PeriodicMap,
)
from .words import GROUND, Letter, Word

GroundAssignment = Mapping[str, ExactPerm]


class GenericState:
    """Immutable map from letter names to finite partial injections.

    Names that are absent evaluate as the empty map.
    """

    __slots__ = ("_maps", "_key")

    def __init__(self, maps: Mapping[str, PartialInj] | Iterable = ()):
        items = maps.items() if isinstance(maps, Mapping) else maps
        cleaned = {}
        for name, m in items:
            if not isinstance(m, PartialInj):
                m = PartialInj(m)
            if len(m):
                cleaned[name] = m
        self._maps = dict(sorted(cleaned.items()))
        self._key = tuple((k, v.pairs) for k, v in self._maps.items())

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[str, int, int]]) -> "GenericState":
        by_name: dict[str, list] = {}
        for name, a, b in triples:
            by_name.setdefault(name, []).append((a, b))
        return cls({k: PartialInj(v) for k, v in by_name.items()})

    def get(self, name: str) -> PartialInj:
        return self._maps.get(name, EMPTY)

    def __getitem__(self, name: str) -> PartialInj:
        return self.get(name)

    def names(self) -> list[str]:
        return list(self._maps)

    def items(self):
        return self._maps.items()

    def with_pair(self, name: str, arg: int, val: int) -> "GenericState":
        maps = dict(self._maps)
        maps[name] = self.get(name).insert(arg, val)
        if len(maps) != len(self._maps):
            return GenericState(maps)
        out = GenericState.__new__(GenericState)
        out._maps = maps
        out._key = tuple((k, v.pairs) for k, v in maps.items())
        return out

    def with_map(self, name: str, m: PartialInj) -> "GenericState":
        maps = dict(self._maps)
        maps[name] = m
        return GenericState(maps)

    def triples(self) -> list[tuple[str, int, int]]:
        return [(k, a, b) for k, m in self._maps.items() for a, b in m.sorted_pairs()]

    def size(self) -> int:
        return sum(len(m) for m in self._maps.values())

    def issuperset(self, other: "GenericState") -> bool:
        return all(self.get(k).issuperset(m) for k, m in other.items())

    def difference(self, other: "GenericState") -> list[tuple[str, int, int]]:
        return [t for t in self.triples() if (t[1], t[2]) not in other.get(t[0])]

    def values_used(self) -> set[int]:
        out: set[int] = set()
        for m in self._maps.values():
            out |= m.dom() | m.ran()
        return out

    def __eq__(self, other):
        return isinstance(other, GenericState) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GenericState({ {k: v.sorted_pairs() for k, v in self._maps.items()} })"


@lru_cache(maxsize=None)
def _inverse(p: ExactPerm) -> ExactPerm:
    return p.inverse()


def _ground(x: Letter, rho: GroundAssignment) -> ExactPerm:
    try:
        p = rho[x.name]
    except KeyError:
        raise UnknownLetter(x.name) from None
    return p if x.exp == 1 else _inverse(p)


def apply_letter(x: Letter, v: int, s: GenericState, rho: GroundAssignment) -> Optional[int]:
    if x.kind == GROUND:
        return _ground(x, rho)(v)
    m = s.get(x.name)
    return m.get(v) if x.exp == 1 else m.preimage(v)


def eval_word(w: Word, s: GenericState, rho: GroundAssignment, alpha: int) -> Optional[int]:
    return _run(reversed(w.letters), s, rho, alpha)


def _run(order: Iterable[Letter], s: GenericState, rho: GroundAssignment, v: int) -> Optional[int]:
    """Apply letters in the given order (already right-to-left)."""
    for x in order:
        if x.kind == GROUND:
            v = _ground(x, rho)(v)
        else:
            m = s.get(x.name)
            v = m.get(v) if x.exp == 1 else m.preimage(v)
            if v is None:
                return None
    return v


def ground_perm(w: Word, rho: GroundAssignment) -> ExactPerm:
    """The ground group element named by a ground-only word."""
    return _ground_perm(w.letters, tuple(sorted(rho.items(), key=lambda kv: kv[0])))


@lru_cache(maxsize=65536)
def _ground_perm(letters: tuple, rho_items: tuple) -> ExactPerm:
    rho = dict(rho_items)
    p = ExactPerm.identity()
    for x in letters:
        if x.kind != GROUND:
            raise ValueError("word has non-ground letters")
        p = p.compose(_ground(x, rho))
    return p


def _rightmost_generic(w: Word) -> int:
    for j in range(len(w) - 1, -1, -1):
        if w.letters[j].kind != GROUND:
            return j
    return -1


def word_graph(w: Word, s: GenericState, rho: GroundAssignment) -> dict[int, int]:
    """The whole (finite) relation e_w for a word with at least one generic letter.

    Every evaluation passes the rightmost generic letter at a point of its
    finite domain, and everything to its right is a ground permutation, so
    the candidate arguments are exactly the pull-backs of that domain.
    """
    j = _rightmost_generic(w)
    if j < 0:
        raise ValueError("word_graph needs a generic letter; use ground_perm")
    x = w.letters[j]
    m = s.get(x.name)
    entry = m.dom() if x.exp == 1 else m.ran()
    suffix = w.letters[j + 1:]
    out = {}
    for y in entry:
        alpha = y
        for z in suffix:
            alpha = _ground(z.inverse(), rho)(alpha)
        beta = eval_word(w, s, rho, alpha)
        if beta is not None:
            out[alpha] = beta
    return out


def word_fixed_points(w: Word, s: GenericState, rho: GroundAssignment) -> FixedPointReport:
    if not w.letters:
        return FixedPointReport(IDENTITY_ON_DOMAIN)
    if w.is_ground_only():
        p = ground_perm(w, rho)
        if p.is_identity():
            return FixedPointReport(IDENTITY_ON_DOMAIN)
        return p.fixed_points()
    pts = frozenset(a for a, b in word_graph(w, s, rho).items() if a == b)
    return FixedPointReport(FINITE, pts, frozenset(), pts)


def new_fixed_points(w: Word, old: GenericState, new: GenericState, rho: GroundAssignment) -> set[int]:
    """Fixed points of e_w[new] that are not fixed points of e_w[old], for ``old`` inside ``new``.

    Such a point's evaluation uses a pair of ``new - old``; at the rightmost
    such use everything to the right runs in ``old``, which pins the start.
    """
    names = {x.name for x in w.letters if x.kind != GROUND}
    added: dict[str, list] = {}
    for name in names:
        before = old.get(name)
        after = new.get(name)
        if len(after) != len(before):
            added[name] = [p for p in after.pairs if p not in before.pairs]
    out: set[int] = set()
    if not added:
        return out
    letters = w.letters
    forward = letters[::-1]
    for j, x in enumerate(letters):
        if x.kind == GROUND or x.name not in added:
            continue
        back = [y.inverse() for y in letters[j + 1:]]
        for a, b in added[x.name]:
            gamma = _run(back, old, rho, a if x.exp == 1 else b)
            if gamma is not None and _run(forward, new, rho, gamma) == gamma:
                out.add(gamma)
    return out


def fixed_set(w: Word, s: GenericState, rho: GroundAssignment) -> frozenset:
    """Fixed points of a word containing a generic letter."""
    return frozenset(a for a, b in word_graph(w, s, rho).items() if a == b)


def _relation_by_source(pairs, exp: int) -> dict[int, list[int]]:
    if exp == -1:
        pairs = [(b, a) for a, b in pairs]
    by_source: dict[int, list[int]] = {}
    for a, b in pairs:
        by_source.setdefault(a, []).append(b)
    return by_source


@lru_cache(maxsize=1024)
def _ground_relation(p: ExactPerm, exp: int, universe: int) -> dict[int, list[int]]:
    """A ground letter as a relation on ``[0, universe)``; independent of the state, so cached."""
    return _relation_by_source([(n, p(n)) for n in range(universe)], exp)


def eval_relation(w: Word, s: GenericState, rho: GroundAssignment, bound: int) -> set[tuple[int, int]]:
    """Brute-force oracle: e_w intersected with ``[0, bound)^2``.

    Each letter is materialised as a finite relation on a universe large
    enough to hold every intermediate value of an evaluation that starts
    below ``bound``; the relations are then joined one letter at a time.  This
    deliberately shares no code with ``eval_word``.
    """
    if bound < 1:
        raise ValueError("bound must be positive")
    top = max([bound] + [v + 1 for v in s.values_used()])
    step = 0
    for x in w.letters:
        if x.kind == GROUND:
            if x.name not in rho:
                raise UnknownLetter(x.name)
            p = rho[x.name]
            step = max(step, p.max_displacement(), max(p.head, default=0) + 1)
    universe = top + (len(w) + 1) * step + 1

    def letter_relation(x: Letter) -> dict[int, list[int]]:
        if x.kind == GROUND:
            return _ground_relation(rho[x.name], x.exp, universe)
        return _relation_by_source(s.get(x.name).pairs, x.exp)

    rel = [(a, a) for a in range(bound)]
    for x in reversed(w.letters):
        lr = letter_relation(x)
        rel = [(a, d) for (a, b) in rel for d in lr.get(b, ())]
    return {(a, b) for a, b in rel if b < bound}


def substitute(w: Word, var: str, f: PeriodicMap, rho: GroundAssignment) -> PeriodicMap:
    """Evaluate a word in ground letters and the variable ``var`` with ``var := f``."""
    out = PeriodicMap((), 1, (0,))
    finv = None
    for x in w.letters:
        if x.kind == GROUND:
            m = _ground(x, rho).to_map()
        elif x.name == var:
            if x.exp == 1:
                m = f
            else:
                finv = finv or f.inverse()
                m = finv
        else:
            raise UnknownLetter(x.name)
        out = out.compose(m)
    return out
