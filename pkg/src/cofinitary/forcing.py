"""Conditions, the extension order, dense-set extensions and the generic-run scheduler.

A condition is a pair ``(s, F)``: a finite state ``s`` (one finite partial
injection per generic name) and a finite set ``F`` of good words whose
fixed-point sets are frozen by the extension order.  The ``embed`` kind uses
the elements of a finite group H as generic names and additionally requires
every relation word of ``F`` to evaluate inside the identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    AlreadyDefined,
    ClosureConflict,
    DuplicateArg,
    DuplicateVal,
    InvalidSpec,
    KindMismatch,
    NotEmbedKind,
    SearchExhausted,
    UnboundedForbidden,
)
from .evaluate import (
    GenericState,
    GroundAssignment,
    eval_word,
    ground_perm,
    new_fixed_points,
    word_graph,
)
from .perm import FINITE, ExactPerm, PartialInj, PeriodicMap
from .words import GROUND, HELEM, FiniteGroupTable, Letter, Word, is_good, is_relation_word

FREE = "free"
EMBED = "embed"

DEFAULT_SEARCH_BOUND = 1 << 16


@dataclass(frozen=True)
class Condition:
    s: GenericState = field(default_factory=GenericState)
    F: frozenset = frozenset()
    kind: str = FREE
    H: Optional[FiniteGroupTable] = None

    def __post_init__(self):
        if self.kind not in (FREE, EMBED):
            raise ValueError(f"unknown poset kind {self.kind!r}")
        if (self.kind == EMBED) != (self.H is not None):
            raise ValueError("embed conditions carry a group table, free ones do not")
        object.__setattr__(self, "F", frozenset(self.F))

    def with_state(self, s: GenericState) -> "Condition":
        return Condition(s, self.F, self.kind, self.H)

    def with_words(self, words: Iterable[Word]) -> "Condition":
        return Condition(self.s, self.F | frozenset(words), self.kind, self.H)

    def sorted_words(self) -> list[Word]:
        return sorted(self.F, key=Word.sort_key)

    @property
    def letter_kind(self) -> str:
        return HELEM if self.kind == EMBED else "A"


def empty_condition(kind: str = FREE, H: Optional[FiniteGroupTable] = None) -> Condition:
    return Condition(GenericState(), frozenset(), kind, H)


# ---------------------------------------------------------------- dense specs


@dataclass(frozen=True)
class DomainHit:
    name: str
    arg: int


@dataclass(frozen=True)
class RangeHit:
    name: str
    arg: int


@dataclass(frozen=True)
class WordAdd:
    word: Word


@dataclass(frozen=True)
class TargetHit:
    name: str
    target: PeriodicMap  # identity on the target set
    floor: int = 0


@dataclass(frozen=True)
class FunctionHit:
    name: str
    f: PeriodicMap
    floor: int = 0


@dataclass(frozen=True)
class RelationClosure:
    names: tuple


DenseSpec = Union[DomainHit, RangeHit, WordAdd, TargetHit, FunctionHit, RelationClosure]


def meets(c: Condition, spec: DenseSpec) -> bool:
    """Whether ``c`` lies in the dense set named by ``spec``.

    Hit specs with a floor are met by any pair at or above the floor, so a
    condition meeting one already meets every later spec with the same floor;
    schedules that want fresh hits raise the floor or rely on ``extend_hit``
    always adding a new pair.
    """
    if isinstance(spec, DomainHit):
        return c.s.get(spec.name).has_arg(spec.arg)
    if isinstance(spec, RangeHit):
        return c.s.get(spec.name).has_val(spec.arg)
    if isinstance(spec, WordAdd):
        return spec.word in c.F
    if isinstance(spec, TargetHit):
        t = spec.target
        return any(a >= spec.floor and t(a) is not None and t(b) is not None for a, b in c.s.get(spec.name))
    if isinstance(spec, FunctionHit):
        return any(a >= spec.floor and spec.f(a) == b for a, b in c.s.get(spec.name))
    if isinstance(spec, RelationClosure):
        return True
    raise InvalidSpec(f"unknown spec {spec!r}")


# ----------------------------------------------------------- order and validity


def _generic(x: Letter) -> bool:
    return x.kind != GROUND


def is_condition(c: Condition, rho: GroundAssignment) -> bool:
    for name, m in c.s.items():
        if len(m.dom()) != len(m) or len(m.ran()) != len(m):
            return False
        if c.kind == EMBED and name not in c.H.names:
            return False
    for w in c.F:
        if not w.letters or not is_good(w):
            return False
        for x in w.letters:
            if x.kind == GROUND:
                if x.name not in rho:
                    return False
            elif x.kind != c.letter_kind:
                return False
            elif c.kind == EMBED and x.name not in c.H.names:
                return False
    if c.kind == EMBED:
        for w in c.F:
            if is_relation_word(w, c.H):
                if any(a != b for a, b in word_graph(w, c.s, rho).items()):
                    return False
    return True


def frozen_words(c: Condition) -> list[Word]:
    """Words of F whose fixed-point sets the extension order freezes.

    In the embed poset a relation word is already required to be the
    identity on its domain, and that domain must grow as pairs are added;
    such words are governed by that clause instead of this one.
    """
    if c.kind == EMBED:
        return [w for w in c.F if not is_relation_word(w, c.H)]
    return list(c.F)


def leq(c1: Condition, c2: Condition, rho: GroundAssignment) -> bool:
    """``c1 <= c2``: c1 extends c2 and adds no fixed point to any frozen word of c2."""
    if c1.kind != c2.kind or c1.H != c2.H:
        raise KindMismatch(f"cannot compare {c1.kind} with {c2.kind}")
    if not c1.s.issuperset(c2.s) or not c1.F >= c2.F:
        return False
    changed = {name for name, m in c1.s.items() if len(m) != len(c2.s.get(name))}
    for w in frozen_words(c2):
        if not any(_generic(x) and x.name in changed for x in w.letters):
            continue
        if new_fixed_points(w, c2.s, c1.s, rho):
            return False
    return True


def common_lower_bound(c1: Condition, c2: Condition) -> Condition:
    """Two conditions with the same state are compatible; this is their meet."""
    if c1.s != c2.s or c1.kind != c2.kind or c1.H != c2.H:
        raise ValueError("conditions do not share their first coordinate")
    return Condition(c1.s, c1.F | c2.F, c1.kind, c1.H)


# ------------------------------------------------------------ forbidden values

_DEAD = "dead"
_FALLBACK = "fallback"
_CAND = "cand"


def _flip(w: Word, name: str) -> Word:
    return Word(tuple(Letter(x.name, -x.exp, x.kind) if _generic(x) and x.name == name else x for x in w.letters))


def _creates_fixed_point(w: Word, s: GenericState, rho, name: str, alpha: int, beta: int) -> bool:
    """Exact: does adding (alpha, beta) to ``name`` give e_w a new fixed point?

    Any new fixed point uses the new pair; at its first (rightmost) use the
    suffix is evaluated in the old state, which pins the starting point.
    """
    try:
        s2 = s.with_pair(name, alpha, beta)
    except (DuplicateArg, DuplicateVal):
        return True
    return bool(new_fixed_points(w, s, s2, rho))


def _forbidden_for_word(w: Word, s: GenericState, rho, name: str, alpha: int) -> set[int]:
    """Values beta for which (alpha, beta) added to ``name`` creates a new fixed point of e_w.

    Candidates come from a symbolic evaluation in the unknown beta; each
    candidate is then checked exactly.  Raises ``UnboundedForbidden`` when
    every beta outside a finite set would be forbidden.
    """
    letters = w.letters
    old_new = s.get(name)
    cands: set[int] = set()

    def ground(x: Letter) -> ExactPerm:
        return ground_perm(Word((x,)), rho)

    def backward(gamma: tuple, k: int):
        """Value the output of letter k must take for the path to end at gamma."""
        if gamma[0] != "c":
            return (_FALLBACK,)
        v = gamma[1]
        for i in range(k):
            y = letters[i]
            if not _generic(y):
                v = ground(y.inverse())(v)
                continue
            m = s.get(y.name)
            r = m.preimage(v) if y.exp == 1 else m.get(v)
            if r is not None:
                v = r
                continue
            if y.name == name:
                if y.exp == 1:
                    return (_CAND, v)
                if v == alpha:
                    return (_FALLBACK,)
            return (_DEAD,)
        return ("c", v)

    for j, x in enumerate(letters):
        if not (_generic(x) and x.name == name):
            continue
        suffix = Word(letters[j + 1:])
        if x.exp == 1:
            g0 = eval_word(suffix.inverse(), s, rho, alpha)
            if g0 is None:
                continue
            gamma = ("c", g0)
            v = ("s", ExactPerm.identity())
        else:
            if suffix.is_ground_only():
                gamma = ("s", ground_perm(suffix.inverse(), rho))
            else:
                cands.update(word_graph(suffix, s, rho).values())
                continue
            v = ("c", alpha)
        finished = True
        for k in range(j - 1, -1, -1):
            y = letters[k]
            if not _generic(y):
                p = ground(y)
                v = ("c", p(v[1])) if v[0] == "c" else ("s", p.compose(v[1]))
                continue
            m = s.get(y.name)
            new = y.name == name
            if v[0] == "c":
                n = v[1]
                r = m.get(n) if y.exp == 1 else m.preimage(n)
                if r is not None:
                    v = ("c", r)
                    continue
                if new and y.exp == 1 and n == alpha:
                    v = ("s", ExactPerm.identity())
                    continue
                if new and y.exp == -1:
                    cands.add(n)
                finished = False
                break
            g: ExactPerm = v[1]
            ginv = g.inverse()
            req = backward(gamma, k)
            if req[0] == "c":
                z = m.preimage(req[1]) if y.exp == 1 else m.get(req[1])
                if z is not None:
                    cands.add(ginv(z))
            elif req[0] == _CAND:
                cands.add(req[1])
            elif req[0] == _FALLBACK:
                cands.update(ginv(d) for d in (m.dom() if y.exp == 1 else m.ran()))
            if new:
                if y.exp == 1:
                    cands.add(ginv(alpha))
                else:
                    rep = g.fixed_points()
                    if not g.is_identity() and rep.kind == FINITE:
                        cands.update(rep.finite_points)
                    else:
                        v = ("c", alpha)
                        continue
            finished = False
            break
        if not finished:
            continue
        if gamma[0] == "c" and v[0] == "c":
            if gamma[1] == v[1]:
                raise UnboundedForbidden(f"word {w} gains a fixed point for almost every value")
        elif gamma[0] == "c":
            cands.add(v[1].inverse()(gamma[1]))
        elif v[0] == "c":
            cands.add(gamma[1].inverse()(v[1]))
        else:
            k = gamma[1].inverse().compose(v[1])
            rep = k.fixed_points()
            if k.is_identity() or rep.kind != FINITE:
                raise UnboundedForbidden(f"word {w} gains a fixed point for infinitely many values")
            cands.update(rep.finite_points)
    return {b for b in cands if not old_new.has_val(b) and _creates_fixed_point(w, s, rho, name, alpha, b)}


def forbidden_values(c: Condition, rho: GroundAssignment, name: str, arg: int, direction: str = "domain") -> frozenset:
    """Finite set of values that may not be paired with ``arg`` under ``name``.

    Any value outside the result yields an extension that is a partial
    injection and lies below ``c``.  The H-relation clause of the embed poset
    is not part of this set; ``extend_hit`` checks it separately.
    """
    m = c.s.get(name)
    if direction == "domain":
        if m.has_arg(arg):
            raise AlreadyDefined(f"{name}({arg}) is already defined")
        s, words, clash = c.s, frozen_words(c), m.ran()
    elif direction == "range":
        if m.has_val(arg):
            raise AlreadyDefined(f"{name}^-1({arg}) is already defined")
        s = c.s.with_map(name, m.inverse())
        words = [_flip(w, name) for w in frozen_words(c)]
        clash = m.dom()
    else:
        raise ValueError(f"direction must be 'domain' or 'range', not {direction!r}")
    out = set(clash)
    for w in words:
        if any(_generic(x) and x.name == name for x in w.letters):
            out |= _forbidden_for_word(w, s, rho, name, arg)
    return frozenset(out)


# -------------------------------------------------------------- relation closure


def apply_relations(c: Condition, rho: GroundAssignment, names: Iterable[str]) -> Condition:
    """Close the letters ``names`` under the relations of H.

    ``(a, x, y)`` is added when some H-word ``w`` with ``a w = 1`` in H has
    ``e_w[s](y) = x``.  For each starting point this is a reachability search
    over (point, group element) pairs.  The identity element is skipped: its
    closure would be the identity on all of N.
    """
    if c.kind != EMBED:
        raise NotEmbedKind("relations only exist in the embed poset")
    H = c.H
    targets = [a for a in dict.fromkeys(names) if H.index(a) != H.id_index]
    if not targets:
        return c
    steps = []
    for x, m in c.s.items():
        i = H.index(x)
        steps.append((m, i, H.inv[i]))
    points = sorted(c.s.values_used())
    wanted = {H.inv[H.index(a)]: a for a in targets}
    added: dict[str, set] = {a: set() for a in targets}
    for beta in points:
        seen = {(beta, H.id_index)}
        stack = [(beta, H.id_index)]
        while stack:
            p, g = stack.pop()
            for m, i, ii in steps:
                q = m.get(p)
                if q is not None and (q, H.mul[i][g]) not in seen:
                    seen.add((q, H.mul[i][g]))
                    stack.append((q, H.mul[i][g]))
                q = m.preimage(p)
                if q is not None and (q, H.mul[ii][g]) not in seen:
                    seen.add((q, H.mul[ii][g]))
                    stack.append((q, H.mul[ii][g]))
        for p, g in seen:
            if g in wanted:
                added[wanted[g]].add((p, beta))
    s = c.s
    for a in targets:
        try:
            s = s.with_map(a, s.get(a).union(PartialInj(sorted(added[a]))))
        except (DuplicateArg, DuplicateVal) as exc:
            raise ClosureConflict(f"closing {a} breaks injectivity: {exc}") from None
    return c.with_state(s)


# ---------------------------------------------------------------- extensions


def _least_not_in(forb: frozenset, start: int, bound: int, accept=None) -> int:
    b = start
    while b < bound:
        if b not in forb and (accept is None or accept(b)):
            return b
        b += 1
    raise SearchExhausted(bound)


def _extend(c: Condition, name: str, arg: int, val: int) -> Condition:
    return c.with_state(c.s.with_pair(name, arg, val))


def _admissible(c: Condition, rho, name: str, arg: int, val: int) -> bool:
    """Exact test that adding (arg, val) under ``name`` gives a condition below ``c``."""
    m = c.s.get(name)
    if m.has_arg(arg) or m.has_val(val):
        return False
    d = _extend(c, name, arg, val)
    for w in frozen_words(c):
        if any(_generic(x) and x.name == name for x in w.letters):
            if _creates_fixed_point(w, c.s, rho, name, arg, val):
                return False
    return c.kind == FREE or is_condition(d, rho)


def _check_name(c: Condition, name: str) -> None:
    if c.kind == EMBED and name not in c.H.names:
        raise InvalidSpec(f"{name!r} is not an element of H")


def extend_hit(c: Condition, rho: GroundAssignment, spec: DenseSpec, bound: int = DEFAULT_SEARCH_BOUND) -> Condition:
    """Deterministic extension of ``c`` meeting ``spec`` (least admissible witness)."""
    if isinstance(spec, WordAdd):
        w = spec.word
        if not w.letters or not is_good(w):
            raise InvalidSpec(f"{w} is not a good word")
        d = c.with_words([w])
        if not is_condition(d, rho):
            raise InvalidSpec(f"adding {w} does not give a condition")
        return d

    if isinstance(spec, RelationClosure):
        return apply_relations(c, rho, spec.names)

    if isinstance(spec, (DomainHit, RangeHit)):
        _check_name(c, spec.name)
        direction = "domain" if isinstance(spec, DomainHit) else "range"
        if c.kind == EMBED:
            c = apply_relations(c, rho, [spec.name])
        if meets(c, spec):
            return c
        forb = forbidden_values(c, rho, spec.name, spec.arg, direction)
        if c.kind == EMBED:
            # above every value of every letter, not only those of this one:
            # a value shared with another letter can make a later closure
            # non-injective
            start = max(c.s.values_used() | {spec.arg}) + 1

            def ok(v):
                pair = (spec.arg, v) if direction == "domain" else (v, spec.arg)
                return is_condition(_extend(c, spec.name, *pair), rho)
        else:
            start, ok = 0, None
        v = _least_not_in(forb, start, bound, ok)
        pair = (spec.arg, v) if direction == "domain" else (v, spec.arg)
        return _extend(c, spec.name, *pair)

    if isinstance(spec, TargetHit):
        _check_name(c, spec.name)
        m = c.s.get(spec.name)
        T = spec.target
        for beta in T.domain_from(spec.floor):
            if beta >= bound:
                break
            if m.has_arg(beta):
                continue
            forb = forbidden_values(c, rho, spec.name, beta)
            for gamma in T.domain_from(0):
                if gamma >= bound:
                    break
                if gamma in forb:
                    continue
                if c.kind == FREE or is_condition(_extend(c, spec.name, beta, gamma), rho):
                    return _extend(c, spec.name, beta, gamma)
        raise SearchExhausted(bound, detail=f"target hit for {spec.name}")

    if isinstance(spec, FunctionHit):
        _check_name(c, spec.name)
        f = spec.f
        for a in f.domain_from(spec.floor):
            if a >= bound:
                break
            if _admissible(c, rho, spec.name, a, f(a)):
                return _extend(c, spec.name, a, f(a))
        raise SearchExhausted(bound, detail=f"function hit for {spec.name}")

    raise InvalidSpec(f"unknown spec {spec!r}")


# ------------------------------------------------------------------- runs


@dataclass(frozen=True)
class StageRecord:
    index: int
    spec_index: int
    pairs: tuple  # (name, arg, val) triples added, sorted
    words: tuple  # words added, length-lexicographic


@dataclass
class RunTrace:
    initial: Condition
    schedule: list
    stages: list
    final: Condition


def delta(before: Condition, after: Condition, index: int, spec_index: int) -> StageRecord:
    pairs = tuple(after.s.difference(before.s))
    words = tuple(sorted(after.F - before.F, key=Word.sort_key))
    return StageRecord(index, spec_index, pairs, words)


def apply_delta(c: Condition, rec: StageRecord) -> Condition:
    s = c.s
    for name, a, b in rec.pairs:
        s = s.with_pair(name, a, b)
    return Condition(s, c.F | frozenset(rec.words), c.kind, c.H)


def replay(initial: Condition, stages: Sequence[StageRecord]) -> Condition:
    c = initial
    for rec in stages:
        c = apply_delta(c, rec)
    return c


def generic_run(
    initial: Condition,
    rho: GroundAssignment,
    schedule: Sequence[DenseSpec],
    bound: int = DEFAULT_SEARCH_BOUND,
) -> RunTrace:
    """Fold ``extend_hit`` over a finite schedule of dense sets."""
    c = initial
    stages = []
    for i, spec in enumerate(schedule):
        try:
            d = extend_hit(c, rho, spec, bound)
        except SearchExhausted as exc:
            raise exc.at_stage(i) from None
        stages.append(delta(c, d, i, i))
        c = d
    return RunTrace(initial, list(schedule), stages, c)


# ---------------------------------------------------------- schedule builders


def good_word_schedule(words: Iterable[Word]) -> list[WordAdd]:
    return [WordAdd(w) for w in words]


def hit_schedule(names: Sequence[str], below: int, domain: bool = True, range_: bool = True) -> list:
    """DomainHit/RangeHit for every name and every point below ``below``, interleaved by point."""
    out: list = []
    for alpha in range(below):
        for name in names:
            if domain:
                out.append(DomainHit(name, alpha))
            if range_:
                out.append(RangeHit(name, alpha))
    return out
