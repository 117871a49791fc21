"""Exact arithmetic for eventually periodic maps of the naturals.

Two value types live here:

* ``ExactPerm``: a bijection of N given by a finite head table followed by a
  periodic window of displacements.  Closed under composition and inverse,
  with exactly decidable fixed-point sets.
* ``PeriodicMap``: the same layout, but entries may be undefined and the map
  need only be injective.  Used for partial maps being "hit", periodic target
  sets, and for substituting a partial map into a word.

``PartialInj`` is a finite injective partial map.

All three are immutable; every operation returns a new value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .errors import DuplicateArg, DuplicateVal, InvalidMap, InvalidPermutation

IDENTITY_ON_DOMAIN = "identity-on-domain"
FINITE = "finite"
INFINITE = "infinite"


@dataclass(frozen=True)
class FixedPointReport:
    kind: str
    finite_points: frozenset = frozenset()
    witness_residues: frozenset = frozenset()
    head_points: frozenset = frozenset()
    period: int = 1
    offset: int = 0

    def is_fixed(self, n: int) -> bool:
        """Exact membership test for the fixed-point set described."""
        if self.kind == FINITE:
            return n in self.finite_points
        if n in self.head_points:
            return True
        if n < self.offset:
            return False
        return (n - self.offset) % self.period in self.witness_residues

    def as_dict(self) -> dict:
        if self.kind == FINITE:
            return {"kind": FINITE, "points": sorted(self.finite_points)}
        if self.kind == IDENTITY_ON_DOMAIN:
            return {"kind": IDENTITY_ON_DOMAIN}
        return {
            "kind": INFINITE,
            "offset": self.offset,
            "period": self.period,
            "residues": sorted(self.witness_residues),
            "head_points": sorted(self.head_points),
        }


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def _canonical_layout(head: tuple, window: tuple) -> tuple[tuple, tuple]:
    """Minimal period, then shortest head.

    Entries are images (head) and displacements (window); ``None`` marks an
    undefined entry and is compared like any other value.
    """
    p = len(window)
    for q in _divisors(p):
        if window == window[:q] * (p // q):
            window = window[:q]
            break
    head = list(head)
    while head:
        n = len(head) - 1
        d = window[-1]
        img = head[-1]
        if (d is None and img is None) or (d is not None and img is not None and img == n + d):
            head.pop()
            window = (d,) + window[:-1]
        else:
            break
    return tuple(head), window


def _sample(fn: Callable[[int], Optional[int]], n0: int, period: int) -> tuple[tuple, tuple]:
    head = tuple(fn(n) for n in range(n0))
    window = []
    for n in range(n0, n0 + period):
        v = fn(n)
        window.append(None if v is None else v - n)
    return head, tuple(window)


@dataclass(frozen=True)
class ExactPerm:
    """Bijection of N: ``n -> head[n]`` below ``len(head)``, then periodic displacements.

    The stored form is always canonical (minimal period, shortest head), so
    two values are equal exactly when they denote the same permutation.
    """

    head: tuple = ()
    period: int = 1
    window: tuple = (0,)

    def __post_init__(self):
        head = tuple(int(x) for x in self.head)
        window = tuple(int(x) for x in self.window)
        if self.period < 1 or len(window) != self.period:
            raise InvalidPermutation(f"window length {len(window)} does not match period {self.period}")
        _check_bijective(head, window)
        head, window = _canonical_layout(head, window)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "period", len(window))

    @property
    def head_len(self) -> int:
        return len(self.head)

    @classmethod
    def identity(cls) -> "ExactPerm":
        return cls((), 1, (0,))

    @classmethod
    def from_block(cls, pattern: Iterable[int]) -> "ExactPerm":
        """Apply a permutation of ``0..size-1`` to every consecutive block."""
        pattern = list(pattern)
        if sorted(pattern) != list(range(len(pattern))):
            raise InvalidPermutation(f"block pattern {pattern} is not a permutation")
        return cls((), len(pattern), tuple(pattern[r] - r for r in range(len(pattern))))

    @classmethod
    def from_table(cls, pairs: Iterable[tuple[int, int]]) -> "ExactPerm":
        """Finite permutation table, identity elsewhere."""
        table = dict(pairs)
        if sorted(table) != sorted(table.values()):
            raise InvalidPermutation("table is not a permutation of its support")
        n0 = max(table, default=-1) + 1
        return cls(tuple(table.get(n, n) for n in range(n0)), 1, (0,))

    @classmethod
    def from_function(cls, fn: Callable[[int], int], n0: int, period: int) -> "ExactPerm":
        head, window = _sample(fn, n0, period)
        return cls(head, period, window)

    def __call__(self, n: int) -> int:
        if n < 0:
            raise ValueError("negative argument")
        n0 = len(self.head)
        if n < n0:
            return self.head[n]
        return n + self.window[(n - n0) % self.period]

    def is_identity(self) -> bool:
        return not self.head and self.window == (0,)

    def max_displacement(self) -> int:
        return max(abs(d) for d in self.window)

    def compose(self, other: "ExactPerm") -> "ExactPerm":
        """``self ∘ other``: apply ``other`` first."""
        n0 = max(other.head_len, self.head_len - min(other.window), 0)
        period = math.lcm(self.period, other.period)
        return ExactPerm.from_function(lambda n: self(other(n)), n0, period)

    __mul__ = compose

    def inverse(self) -> "ExactPerm":
        n0, p = self.head_len, self.period
        starts = [n0 + r + self.window[r] for r in range(p)]
        m0 = max([0] + [s + 1 for s in starts] + [h + 1 for h in self.head])
        head_inv = {v: i for i, v in enumerate(self.head)}
        by_class = {(s - n0) % p: r for r, s in enumerate(starts)}

        def pre(m: int) -> int:
            if m in head_inv:
                return head_inv[m]
            r = by_class[(m - n0) % p]
            return m - self.window[r]

        return ExactPerm.from_function(pre, m0, p)

    __invert__ = inverse

    def fixed_points(self) -> FixedPointReport:
        head_points = frozenset(i for i, v in enumerate(self.head) if v == i)
        residues = frozenset(r for r, d in enumerate(self.window) if d == 0)
        if residues:
            return FixedPointReport(INFINITE, frozenset(), residues, head_points, self.period, self.head_len)
        return FixedPointReport(FINITE, head_points, frozenset(), head_points, self.period, self.head_len)

    def to_map(self) -> "PeriodicMap":
        return PeriodicMap(self.head, self.period, self.window)

    def as_dict(self) -> dict:
        return {"kind": "head_periodic", "head": list(self.head), "period": self.period, "window": list(self.window)}


def _check_bijective(head: tuple, window: tuple) -> None:
    n0, p = len(head), len(window)
    if any(h < 0 for h in head):
        raise InvalidPermutation("negative head image")
    starts = [n0 + r + window[r] for r in range(p)]
    if any(s < 0 for s in starts):
        raise InvalidPermutation("tail produces a negative image")
    if sorted(s % p for s in starts) != list(range(p)):
        raise InvalidPermutation("window residues are unbalanced: tail is not a bijection onto a cofinite set")
    missing = sorted(v for s in starts for v in range(s % p, s, p))
    if sorted(head) != missing:
        raise InvalidPermutation("head images do not exactly fill the values the tail misses")


def is_bijective(head: Iterable[int], period: int, window: Iterable[int]) -> bool:
    head, window = tuple(head), tuple(window)
    if period < 1 or len(window) != period:
        return False
    try:
        _check_bijective(head, window)
    except InvalidPermutation:
        return False
    return True


def ep_apply(p: ExactPerm, n: int) -> int:
    return p(n)


def ep_compose(p: ExactPerm, q: ExactPerm) -> ExactPerm:
    return p.compose(q)


def ep_inverse(p: ExactPerm) -> ExactPerm:
    return p.inverse()


def ep_fixed_points(p: ExactPerm) -> FixedPointReport:
    return p.fixed_points()


@dataclass(frozen=True)
class PeriodicMap:
    """Eventually periodic partial injection of N.

    Same layout as ``ExactPerm``; ``None`` entries are undefined.  An entry of
    ``window`` is a displacement.
    """

    head: tuple = ()
    period: int = 1
    window: tuple = (None,)

    def __post_init__(self):
        head = tuple(None if x is None else int(x) for x in self.head)
        window = tuple(None if x is None else int(x) for x in self.window)
        if self.period < 1 or len(window) != self.period:
            raise InvalidMap(f"window length {len(window)} does not match period {self.period}")
        n0, p = len(head), len(window)
        if any(h is not None and h < 0 for h in head):
            raise InvalidMap("negative head image")
        starts = {r: n0 + r + d for r, d in enumerate(window) if d is not None}
        if any(s < 0 for s in starts.values()):
            raise InvalidMap("tail produces a negative image")
        classes = [s % p for s in starts.values()]
        if len(set(classes)) != len(classes):
            raise InvalidMap("tail is not injective")
        images = [h for h in head if h is not None]
        if len(set(images)) != len(images):
            raise InvalidMap("head is not injective")
        for h in images:
            for s in starts.values():
                if h >= s and (h - s) % p == 0:
                    raise InvalidMap(f"head image {h} collides with the tail")
        head, window = _canonical_layout(head, window)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "period", len(window))

    @property
    def head_len(self) -> int:
        return len(self.head)

    @classmethod
    def empty(cls) -> "PeriodicMap":
        return cls((), 1, (None,))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "PeriodicMap":
        table = dict(pairs)
        n0 = max(table, default=-1) + 1
        return cls(tuple(table.get(n) for n in range(n0)), 1, (None,))

    @classmethod
    def from_residues(cls, modulus: int, displacements: dict, start: int = 0) -> "PeriodicMap":
        """``n -> n + displacements[n % modulus]`` for ``n >= start`` in the listed classes."""
        def fn(n):
            if n < start or n % modulus not in displacements:
                return None
            return n + displacements[n % modulus]
        n0 = start
        head, window = _sample(fn, n0, modulus)
        return cls(head, modulus, window)

    @classmethod
    def identity_on(cls, modulus: int, residues: Iterable[int], start: int = 0) -> "PeriodicMap":
        """Identity restricted to a periodic set; doubles as a set descriptor."""
        return cls.from_residues(modulus, {r % modulus: 0 for r in residues}, start)

    @classmethod
    def from_function(cls, fn: Callable[[int], Optional[int]], n0: int, period: int) -> "PeriodicMap":
        head, window = _sample(fn, n0, period)
        return cls(head, period, window)

    def __call__(self, n: int) -> Optional[int]:
        if n < 0:
            return None
        n0 = len(self.head)
        if n < n0:
            return self.head[n]
        d = self.window[(n - n0) % self.period]
        return None if d is None else n + d

    def is_empty(self) -> bool:
        return all(h is None for h in self.head) and all(d is None for d in self.window)

    def is_finite(self) -> bool:
        return all(d is None for d in self.window)

    def domain(self, below: int) -> Iterator[int]:
        """Domain points ``< below`` in increasing order."""
        for n in range(below):
            if self(n) is not None:
                yield n

    def domain_from(self, start: int) -> Iterator[int]:
        """Domain points ``>= start`` in increasing order (possibly unending)."""
        n0 = len(self.head)
        n = start
        while n < n0:
            if self.head[n] is not None:
                yield n
            n += 1
        if self.is_finite():
            return
        while True:
            if self.window[(n - n0) % self.period] is not None:
                yield n
            n += 1

    def pairs(self, below: int) -> list[tuple[int, int]]:
        return [(n, self(n)) for n in self.domain(below)]

    def compose(self, other: "PeriodicMap") -> "PeriodicMap":
        """``self ∘ other`` where defined."""
        defined = [d for d in other.window if d is not None]
        n0 = max(other.head_len, self.head_len - min(defined, default=0), 0)
        period = math.lcm(self.period, other.period)

        def fn(n):
            m = other(n)
            return None if m is None else self(m)

        return PeriodicMap.from_function(fn, n0, period)

    __mul__ = compose

    def inverse(self) -> "PeriodicMap":
        n0, p = self.head_len, self.period
        starts = {r: n0 + r + d for r, d in enumerate(self.window) if d is not None}
        m0 = max([0] + [s + 1 for s in starts.values()] + [h + 1 for h in self.head if h is not None])
        head_inv = {v: i for i, v in enumerate(self.head) if v is not None}
        by_class = {s % p: (r, s) for r, s in starts.items()}

        def pre(m):
            if m in head_inv:
                return head_inv[m]
            hit = by_class.get(m % p)
            if hit is None or m < hit[1]:
                return None
            return m - self.window[hit[0]]

        return PeriodicMap.from_function(pre, m0, p)

    __invert__ = inverse

    def restrict(self, keep: "PeriodicMap") -> "PeriodicMap":
        """Restrict the domain to the domain of ``keep``."""
        return self.compose(keep.domain_identity())

    def domain_identity(self) -> "PeriodicMap":
        return PeriodicMap(
            tuple(None if h is None else i for i, h in enumerate(self.head)),
            self.period,
            tuple(None if d is None else 0 for d in self.window),
        )

    def fixed_points(self) -> FixedPointReport:
        """Classify the fixed points on the domain.

        ``identity-on-domain`` covers the empty map as well.
        """
        head_points = frozenset(i for i, v in enumerate(self.head) if v == i)
        residues = frozenset(r for r, d in enumerate(self.window) if d == 0)
        defined_head = [i for i, v in enumerate(self.head) if v is not None]
        if len(head_points) == len(defined_head) and all(d in (0, None) for d in self.window):
            return FixedPointReport(IDENTITY_ON_DOMAIN, head_points, residues, head_points, self.period, self.head_len)
        if residues:
            return FixedPointReport(INFINITE, frozenset(), residues, head_points, self.period, self.head_len)
        return FixedPointReport(FINITE, head_points, frozenset(), head_points, self.period, self.head_len)

    def differs_infinitely_from(self, g: "PeriodicMap | ExactPerm") -> bool:
        """Whether ``self \\ g`` (as sets of pairs) is infinite."""
        if isinstance(g, ExactPerm):
            g = g.to_map()
        n0 = max(self.head_len, g.head_len)
        for n in range(n0, n0 + math.lcm(self.period, g.period)):
            v = self(n)
            if v is not None and v != g(n):
                return True
        return False

    def as_dict(self) -> dict:
        return {"kind": "periodic_map", "head": list(self.head), "period": self.period, "window": list(self.window)}


class PartialInj:
    """Finite injective partial map of N, stored as a set of pairs."""

    __slots__ = ("_fwd", "_bwd", "_pairs")

    def __init__(self, pairs: Iterable[tuple[int, int]] = ()):
        fwd: dict[int, int] = {}
        bwd: dict[int, int] = {}
        for a, v in pairs:
            a, v = int(a), int(v)
            if a < 0 or v < 0:
                raise ValueError("partial injections live on the naturals")
            if a in fwd:
                if fwd[a] == v:
                    continue
                raise DuplicateArg(f"argument {a} already mapped to {fwd[a]}")
            if v in bwd:
                raise DuplicateVal(f"value {v} already the image of {bwd[v]}")
            fwd[a] = v
            bwd[v] = a
        self._fwd = fwd
        self._bwd = bwd
        self._pairs = frozenset(fwd.items())

    @property
    def pairs(self) -> frozenset:
        return self._pairs

    def get(self, n: int) -> Optional[int]:
        return self._fwd.get(n)

    def preimage(self, n: int) -> Optional[int]:
        return self._bwd.get(n)

    __call__ = get

    def dom(self) -> set[int]:
        return set(self._fwd)

    def ran(self) -> set[int]:
        return set(self._bwd)

    def has_arg(self, n: int) -> bool:
        return n in self._fwd

    def has_val(self, n: int) -> bool:
        return n in self._bwd

    def insert(self, arg: int, val: int) -> "PartialInj":
        if arg in self._fwd:
            raise DuplicateArg(f"argument {arg} already mapped to {self._fwd[arg]}")
        if val in self._bwd:
            raise DuplicateVal(f"value {val} already the image of {self._bwd[val]}")
        if arg < 0 or val < 0:
            raise ValueError("partial injections live on the naturals")
        out = PartialInj.__new__(PartialInj)
        out._fwd = {**self._fwd, arg: val}
        out._bwd = {**self._bwd, val: arg}
        out._pairs = self._pairs | {(arg, val)}
        return out

    def union(self, other: "PartialInj") -> "PartialInj":
        return PartialInj(list(self._fwd.items()) + list(other._fwd.items()))

    def inverse(self) -> "PartialInj":
        return PartialInj((v, a) for a, v in self._fwd.items())

    def issuperset(self, other: "PartialInj") -> bool:
        return self._pairs >= other._pairs

    def max_value(self) -> int:
        return max(list(self._fwd) + list(self._bwd), default=-1)

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self._fwd.items())

    def to_map(self) -> PeriodicMap:
        return PeriodicMap.from_pairs(self._fwd.items())

    def __len__(self):
        return len(self._fwd)

    def __iter__(self):
        return iter(self.sorted_pairs())

    def __contains__(self, pair):
        return pair in self._pairs

    def __eq__(self, other):
        return isinstance(other, PartialInj) and self._pairs == other._pairs

    def __hash__(self):
        return hash(self._pairs)

    def __repr__(self):
        return f"PartialInj({self.sorted_pairs()})"


EMPTY = PartialInj()


def pinj_insert(s: PartialInj, arg: int, val: int) -> PartialInj:
    return s.insert(arg, val)


# catalog members used throughout tests and configs
def block_swap() -> ExactPerm:
    return ExactPerm((), 2, (1, -1))


def block_cycle3() -> ExactPerm:
    return ExactPerm((), 3, (1, 1, -2))
