"""Reduced words over generic, ground and H-element letters.

Text syntax::

    word := term (" " term)*
    term := name ("^-1")?
    name := [a-z][a-z0-9]*

The empty string is the empty word.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import EmptyWord, InvalidGroupTable, UnknownElement, WordSyntaxError

GENERIC = "A"
GROUND = "B"
HELEM = "H"

_NAME = re.compile(r"[a-z][a-z0-9]*\Z")
_TERM = re.compile(r"([a-z][a-z0-9]*)(\^-1)?\Z")


class Letter(NamedTuple):
    name: str
    exp: int = 1
    kind: str = GENERIC

    @property
    def base(self) -> tuple[str, str]:
        return (self.kind, self.name)

    def inverse(self) -> "Letter":
        return Letter(self.name, -self.exp, self.kind)

    def sort_key(self):
        return (self.name, self.kind, -self.exp)

    def __str__(self):
        return self.name if self.exp == 1 else f"{self.name}^-1"


def _cancels(x: Letter, y: Letter) -> bool:
    return x.name == y.name and x.kind == y.kind and x.exp == -y.exp


@dataclass(frozen=True)
class Word:
    """Freely reduced word; build with ``reduce`` or ``parse_word``."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(self.letters)
        for x in letters:
            if not isinstance(x, Letter) or x.exp not in (1, -1) or not x.name:
                raise WordSyntaxError(f"bad letter {x!r}")
        for x, y in zip(letters, letters[1:]):
            if _cancels(x, y):
                raise WordSyntaxError(f"word is not reduced: {x}{y}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self):
        return " ".join(str(x) for x in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return reduce(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(x.inverse() for x in reversed(self.letters)))

    def names(self, kind: str | None = None) -> set[str]:
        return {x.name for x in self.letters if kind is None or x.kind == kind}

    def is_ground_only(self) -> bool:
        return all(x.kind == GROUND for x in self.letters)

    def sort_key(self):
        return (len(self.letters), tuple(x.sort_key() for x in self.letters))


EPSILON = Word(())


def reduce(letters: Iterable[Letter]) -> Word:
    """Free reduction with a stack."""
    out: list[Letter] = []
    for x in letters:
        if out and _cancels(out[-1], x):
            out.pop()
        else:
            out.append(x)
    return Word(tuple(out))


def letter(name: str, exp: int = 1, kind: str = GENERIC) -> Letter:
    return Letter(name, exp, kind)


def parse_word(text: str, ground: Iterable[str] = (), helem: Iterable[str] = ()) -> Word:
    """Parse the text syntax; names in ``ground``/``helem`` get those kinds, the rest are generic.

    The parsed word is freely reduced.
    """
    ground, helem = set(ground), set(helem)
    letters = []
    text = text.strip()
    if not text:
        return EPSILON
    for term in text.split(" "):
        m = _TERM.match(term)
        if m is None:
            raise WordSyntaxError(f"bad term {term!r} in {text!r}")
        name = m.group(1)
        kind = GROUND if name in ground else HELEM if name in helem else GENERIC
        letters.append(Letter(name, -1 if m.group(2) else 1, kind))
    return reduce(letters)


def is_good(w: Word) -> bool:
    """Power of a single letter, or first and last base names differ."""
    if not w.letters:
        raise EmptyWord("goodness is undefined for the empty word")
    bases = {x.base for x in w.letters}
    if len(bases) == 1:
        return True
    return w.letters[0].base != w.letters[-1].base


def _alphabet_letters(alphabet) -> list[Letter]:
    bases = set()
    for item in alphabet:
        if isinstance(item, str):
            bases.add((item, GENERIC))
        else:
            bases.add((item[0], item[1]))
    out = []
    for name, kind in sorted(bases):
        out.append(Letter(name, 1, kind))
        out.append(Letter(name, -1, kind))
    return out


def enumerate_reduced(alphabet, max_len: int, min_len: int = 1) -> list[Word]:
    """All reduced words with ``min_len <= length <= max_len``, length-lexicographic.

    ``alphabet`` holds names (generic) or ``(name, kind)`` pairs.
    """
    letters = _alphabet_letters(alphabet)
    out: list[Word] = []
    layer: list[tuple] = [()]
    for n in range(1, max_len + 1):
        nxt = []
        for prefix in layer:
            for x in letters:
                if prefix and _cancels(prefix[-1], x):
                    continue
                nxt.append(prefix + (x,))
        layer = nxt
        if n >= min_len:
            out.extend(Word(t) for t in layer)
    if min_len <= 0:
        out.insert(0, EPSILON)
    return out


def enumerate_good(alphabet, max_len: int) -> list[Word]:
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    return [w for w in enumerate_reduced(alphabet, max_len) if is_good(w)]


@dataclass(frozen=True)
class FiniteGroupTable:
    """Finite group as an explicit multiplication table over element indices.

    ``mul[i][j]`` is the index of ``names[i] * names[j]``; a word is read as the
    left-to-right product of its letters, which matches composition order
    when letters act as permutations.
    """

    names: tuple
    mul: tuple
    inv: tuple = ()
    id_index: int = -1

    def __post_init__(self):
        names = tuple(self.names)
        mul = tuple(tuple(int(x) for x in row) for row in self.mul)
        n = len(names)
        if n == 0:
            raise InvalidGroupTable("empty group")
        if len(set(names)) != n or not all(_NAME.match(x) for x in names):
            raise InvalidGroupTable("element names must be distinct identifiers")
        if len(mul) != n or any(len(row) != n or any(not 0 <= x < n for x in row) for row in mul):
            raise InvalidGroupTable("multiplication table has the wrong shape")
        ids = [e for e in range(n) if all(mul[e][x] == x == mul[x][e] for x in range(n))]
        if len(ids) != 1:
            raise InvalidGroupTable("no identity element")
        e = ids[0]
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if mul[x][y] == e and mul[y][x] == e]
            if len(ys) != 1:
                raise InvalidGroupTable(f"element {names[x]} has no inverse")
            inv.append(ys[0])
        for x, y, z in itertools.product(range(n), repeat=3):
            if mul[mul[x][y]][z] != mul[x][mul[y][z]]:
                raise InvalidGroupTable("multiplication is not associative")
        if self.inv and tuple(self.inv) != tuple(inv):
            raise InvalidGroupTable("inverse table disagrees with multiplication")
        if self.id_index >= 0 and self.id_index != e:
            raise InvalidGroupTable("declared identity is not the identity")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", tuple(inv))
        object.__setattr__(self, "id_index", e)

    @property
    def order(self) -> int:
        return len(self.names)

    @property
    def identity_name(self) -> str:
        return self.names[self.id_index]

    def non_identity(self) -> list[str]:
        return [x for i, x in enumerate(self.names) if i != self.id_index]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownElement(name) from None

    def product(self, w: Word | Sequence[Letter]) -> int:
        acc = self.id_index
        for x in w:
            i = self.index(x.name)
            acc = self.mul[acc][i if x.exp == 1 else self.inv[i]]
        return acc

    def as_dict(self) -> dict:
        return {"kind": "table", "names": list(self.names), "mul": [list(r) for r in self.mul]}

    @classmethod
    def cyclic(cls, n: int, gen: str = "g") -> "FiniteGroupTable":
        names = ["e"] + [gen if k == 1 else f"{gen}{k}" for k in range(1, n)]
        return cls(tuple(names), tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))

    @classmethod
    def symmetric3(cls) -> "FiniteGroupTable":
        """S3 as permutations of {0,1,2}; r = 3-cycle, s = a transposition."""
        r = (1, 2, 0)
        s = (1, 0, 2)
        e = (0, 1, 2)

        def comp(p, q):
            return tuple(p[q[i]] for i in range(3))

        elems = {"e": e, "r": r, "r2": comp(r, r), "s": s, "sr": comp(s, r), "sr2": comp(s, comp(r, r))}
        names = list(elems)
        perms = [elems[x] for x in names]
        mul = tuple(tuple(perms.index(comp(p, q)) for q in perms) for p in perms)
        return cls(tuple(names), mul)


def relation_is_identity(w: Word, H: FiniteGroupTable) -> bool:
    return H.product(w) == H.id_index


def is_relation_word(w: Word, H: FiniteGroupTable) -> bool:
    """Non-empty word made only of H letters whose product is the identity."""
    if not w.letters or any(x.kind != HELEM for x in w.letters):
        return False
    return relation_is_identity(w, H)
