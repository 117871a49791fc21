"""Orbit partitions of N, the greedy orbit-connecting permutation, and its orbit graph.

Every partition in the catalog is stored in one normal form: a finite head
of orbit labels followed by a window of labels repeated with a fixed period.
A window label is either *global* (the same orbit in every period, so the
orbit is infinite) or *local* (a fresh orbit in each period, so the orbit is
finite).  Orbits are indexed in increasing order of their least element.
"""

from __future__ import annotations

import bisect
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import InvalidPartition, NoDisjointOrbit
from .perm import PartialInj

GLOBAL = "g"
LOCAL = "l"


@dataclass(frozen=True)
class PeriodicSet:
    """``{n >= start : n % modulus in residues}`` together with finitely many extra points."""

    modulus: int
    residues: tuple
    start: int = 0
    extra: tuple = ()

    def __post_init__(self):
        if self.modulus < 1 or self.start < 0:
            raise InvalidPartition("periodic set needs modulus >= 1 and start >= 0")
        res = tuple(sorted({int(r) % self.modulus for r in self.residues}))
        if not res:
            raise InvalidPartition("an unbounded piece needs at least one residue")
        object.__setattr__(self, "residues", res)
        object.__setattr__(self, "extra", tuple(sorted({int(x) for x in self.extra})))

    def __contains__(self, n: int) -> bool:
        return (n >= self.start and n % self.modulus in self.residues) or n in self.extra

    def as_dict(self) -> dict:
        return {"modulus": self.modulus, "residues": list(self.residues), "start": self.start, "extra": list(self.extra)}


@dataclass(frozen=True)
class PartitionSpec:
    """A partition of N into orbits.

    ``head`` labels the points ``0..len(head)-1``; beyond it the labels of
    ``window`` repeat with period ``len(window)``.  Labels are pairs
    ``(GLOBAL, key)`` or ``(LOCAL, key)``; head labels may also be any other
    hashable, naming a finite orbit inside the head.  ``descriptor`` keeps the
    constructor arguments for display and serialisation, and ``pieces`` the
    named pieces of a mixed partition.
    """

    head: tuple
    window: tuple
    descriptor: tuple = ()
    pieces: tuple = ()
    _minima: tuple = field(default=(), compare=False, repr=False)
    _local_first: tuple = field(default=(), compare=False, repr=False)
    _rank: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.window:
            raise InvalidPartition("window must be non-empty")
        for lab in self.window:
            if not (isinstance(lab, tuple) and len(lab) == 2 and lab[0] in (GLOBAL, LOCAL)):
                raise InvalidPartition(f"bad window label {lab!r}")
        for lab in self.head:
            if isinstance(lab, tuple) and len(lab) == 2 and lab[0] == LOCAL:
                raise InvalidPartition("local labels only make sense in the window")
        n0, period = len(self.head), len(self.window)
        seen: set = set()
        minima = []
        # Every global key occurs within the head or the first period, and
        # from the second period on only local first occurrences are new minima.
        for n in range(n0 + period):
            key = self._key(n)
            if key not in seen:
                seen.add(key)
                minima.append(n)
        local_first = []
        seen_local: set = set()
        for r, lab in enumerate(self.window):
            if lab[0] == LOCAL and lab[1] not in seen_local:
                seen_local.add(lab[1])
                local_first.append(r)
        object.__setattr__(self, "_minima", tuple(minima))
        object.__setattr__(self, "_local_first", tuple(local_first))
        object.__setattr__(self, "_rank", {})

    # -- normal form ------------------------------------------------------
    @property
    def period(self) -> int:
        return len(self.window)

    def _key(self, n: int):
        if n < 0:
            raise ValueError("orbits partition the naturals")
        n0 = len(self.head)
        if n < n0:
            lab = self.head[n]
            return lab if isinstance(lab, tuple) and lab and lab[0] == GLOBAL else ("h", lab)
        q, r = divmod(n - n0, self.period)
        lab = self.window[r]
        return lab if lab[0] == GLOBAL else (LOCAL, q, lab[1])

    def orbit_count(self) -> Optional[int]:
        """Number of orbits, or ``None`` when there are infinitely many."""
        return None if self._local_first else len(self._minima)

    def is_minimum(self, n: int) -> bool:
        return self.min_of_orbit(self.orbit_of(n)) == n

    # -- orbit indices ----------------------------------------------------
    def _first_occurrence(self, n: int) -> int:
        key = self._key(n)
        n0 = len(self.head)
        if n < n0 + self.period:
            for m in self._minima:
                if self._key(m) == key:
                    return m
        if key[0] == GLOBAL:
            for m in self._minima:
                if self._key(m) == key:
                    return m
        q, r = divmod(n - n0, self.period)
        first = next(i for i, lab in enumerate(self.window) if lab == self.window[r])
        return n0 + q * self.period + first

    def orbit_of(self, n: int) -> int:
        m = self._first_occurrence(n)
        return self._rank_of_min(m)

    def _rank_of_min(self, m: int) -> int:
        base = len(self.head) + self.period
        if m < base:
            return bisect.bisect_left(self._minima, m)
        q, r = divmod(m - base, self.period)
        return len(self._minima) + q * len(self._local_first) + self._local_first.index(r)

    def min_of_orbit(self, i: int) -> int:
        if i < 0:
            raise IndexError("orbit index must be non-negative")
        if i < len(self._minima):
            return self._minima[i]
        if not self._local_first:
            raise IndexError(f"there are only {len(self._minima)} orbits")
        q, k = divmod(i - len(self._minima), len(self._local_first))
        return len(self.head) + self.period * (q + 1) + self._local_first[k]

    def orbit_points(self, i: int, below: int) -> list[int]:
        """Elements of orbit ``i`` below ``below`` (the whole orbit if it is finite)."""
        key = self._key(self.min_of_orbit(i))
        return [n for n in range(self.min_of_orbit(i), below) if self._key(n) == key]

    def piece_of(self, n: int) -> Optional[tuple]:
        """For mixed partitions: ``("bounded", i)`` or ``("unbounded", j)``; otherwise ``None``."""
        key = self._key(n)
        if key[0] == GLOBAL and isinstance(key[1], tuple) and key[1][0] in ("bounded", "unbounded"):
            return key[1]
        if key[0] == "h" and isinstance(key[1], tuple) and key[1][:1] == ("bounded",):
            return key[1]
        return None

    def as_dict(self) -> dict:
        kind, *args = self.descriptor or ("explicit_periodic",)
        out: dict = {"kind": kind}
        if kind in ("blocks",):
            out["size"] = args[0]
        elif kind == "residues":
            out["modulus"] = args[0]
        elif kind == "explicit_periodic":
            out["head"] = [_label_json(x) for x in self.head]
            out["window"] = [_label_json(x) for x in self.window]
        elif kind == "mixed":
            out["bounded"] = [sorted(b) for b in args[0]]
            out["unbounded"] = [u.as_dict() for u in args[1]]
        return out

    # -- catalog ----------------------------------------------------------
    @classmethod
    def singletons(cls) -> "PartitionSpec":
        return cls((), ((LOCAL, 0),), ("singletons",))

    @classmethod
    def blocks(cls, size: int) -> "PartitionSpec":
        if size < 1:
            raise InvalidPartition("block size must be positive")
        return cls((), ((LOCAL, 0),) * size, ("blocks", size))

    @classmethod
    def residues(cls, modulus: int) -> "PartitionSpec":
        if modulus < 1:
            raise InvalidPartition("modulus must be positive")
        return cls((), tuple((GLOBAL, r) for r in range(modulus)), ("residues", modulus))

    @classmethod
    def explicit_periodic(cls, head: Iterable, window: Iterable) -> "PartitionSpec":
        """Head labels are ints (finite head orbits) or ``("g", k)``; window labels are
        ``("g", k)`` for an infinite orbit or ``("l", k)`` for a fresh orbit per period."""
        head = tuple(_label(x, head=True) for x in head)
        window = tuple(_label(x, head=False) for x in window)
        return cls(head, window, ("explicit_periodic",))

    @classmethod
    def mixed(cls, bounded: Iterable[Iterable[int]], unbounded: Iterable[PeriodicSet]) -> "PartitionSpec":
        """Finite pieces and periodic pieces, each one orbit; points in no piece are singletons."""
        bounded = [frozenset(int(x) for x in b) for b in bounded]
        unbounded = list(unbounded)
        if any(not b for b in bounded):
            raise InvalidPartition("bounded pieces must be non-empty")
        period = 1
        n0 = 0
        for b in bounded:
            n0 = max(n0, max(b) + 1)
        for u in unbounded:
            period = math.lcm(period, u.modulus)
            n0 = max(n0, u.start, max(u.extra, default=-1) + 1)

        def owners(n: int) -> list:
            out = [("bounded", i) for i, b in enumerate(bounded) if n in b]
            out += [("unbounded", j) for j, u in enumerate(unbounded) if n in u]
            return out

        for n in range(n0 + period):
            if len(owners(n)) > 1:
                raise InvalidPartition(f"pieces overlap at {n}")
        head = []
        for n in range(n0):
            own = owners(n)
            head.append((GLOBAL, own[0]) if own and own[0][0] == "unbounded" else own[0] if own else ("single", n))
        window = []
        for r in range(period):
            own = owners(n0 + r)
            window.append((GLOBAL, own[0]) if own else (LOCAL, ("single", r)))
        return cls(tuple(head), tuple(window), ("mixed", tuple(bounded), tuple(unbounded)))


def _label(x, head: bool):
    if isinstance(x, (list, tuple)) and len(x) == 2 and x[0] in (GLOBAL, LOCAL):
        return (x[0], x[1] if not isinstance(x[1], list) else tuple(x[1]))
    if head and isinstance(x, int):
        return x
    raise InvalidPartition(f"bad orbit label {x!r}")


def _label_json(x):
    return list(x) if isinstance(x, tuple) else x


def orbit_of(p: PartitionSpec, n: int) -> int:
    return p.orbit_of(n)


def min_of_orbit(p: PartitionSpec, i: int) -> int:
    return p.min_of_orbit(i)


def next_disjoint_orbit(p: PartitionSpec, used: Iterable[int], start: int = 0) -> int:
    """Least orbit index ``>= start`` whose orbit avoids ``used``."""
    hit = {p.orbit_of(n) for n in used}
    i = start
    while i in hit:
        i += 1
    count = p.orbit_count()
    if count is not None and i >= count:
        raise NoDisjointOrbit(f"all {count} orbits meet the used set")
    return i


# ---------------------------------------------------------------- greedy h

def _least_missing(keys, start: int = 0) -> int:
    n = start
    while n in keys:
        n += 1
    return n


def greedy_step(h: PartialInj, p: PartitionSpec) -> PartialInj:
    """One stage of the greedy construction, computed from scratch."""
    fwd = dict(h.pairs)
    bwd = {v: a for a, v in fwd.items()}
    xi = min(_least_missing(fwd), _least_missing(bwd))
    used = set(fwd) | set(bwd) | {xi}
    eta = next_disjoint_orbit(p, used)
    zeta = p.min_of_orbit(eta)
    return h.insert(xi, zeta) if xi not in fwd else h.insert(zeta, xi)


class GreedyBuilder:
    """Incremental greedy construction; ``step`` matches ``greedy_step`` exactly.

    Both "least point missing from dom/ran" pointers and the set of orbits
    already met only ever grow, so each stage costs amortised O(1) orbit
    lookups.
    """

    def __init__(self, p: PartitionSpec):
        self.p = p
        self.fwd: dict[int, int] = {}
        self.bwd: dict[int, int] = {}
        self.pairs: list[tuple[int, int]] = []
        self._dom_ptr = 0
        self._ran_ptr = 0
        self._hit: set[int] = set()
        self._orbit_ptr = 0

    def _use(self, n: int) -> None:
        self._hit.add(self.p.orbit_of(n))

    def step(self) -> tuple[int, int]:
        self._dom_ptr = _least_missing(self.fwd, self._dom_ptr)
        self._ran_ptr = _least_missing(self.bwd, self._ran_ptr)
        xi = min(self._dom_ptr, self._ran_ptr)
        self._use(xi)
        while self._orbit_ptr in self._hit:
            self._orbit_ptr += 1
        count = self.p.orbit_count()
        if count is not None and self._orbit_ptr >= count:
            raise NoDisjointOrbit(f"all {count} orbits meet the used set", stage=len(self.pairs))
        zeta = self.p.min_of_orbit(self._orbit_ptr)
        pair = (xi, zeta) if xi not in self.fwd else (zeta, xi)
        self.fwd[pair[0]] = pair[1]
        self.bwd[pair[1]] = pair[0]
        self._use(zeta)
        self.pairs.append(pair)
        return pair

    def result(self) -> PartialInj:
        return PartialInj(self.pairs)


def greedy_build(p: PartitionSpec, stages: int) -> PartialInj:
    b = GreedyBuilder(p)
    for _ in range(stages):
        b.step()
    return b.result()


def greedy_trace(p: PartitionSpec, stages: int) -> list[tuple[int, int]]:
    """The pairs in the order the stages added them."""
    b = GreedyBuilder(p)
    for _ in range(stages):
        b.step()
    return list(b.pairs)


# ---------------------------------------------------------------- orbit graph

@dataclass(frozen=True)
class OrbitGraph:
    vertices: frozenset
    edges: Counter

    def simple_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def as_dict(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": [[i, j, k] for (i, j), k in sorted(self.edges.items())],
        }


def orbit_graph(h: PartialInj, p: PartitionSpec) -> OrbitGraph:
    """One edge per pair of ``h`` whose ends lie in different orbits."""
    vertices = set()
    edges: Counter = Counter()
    for a, b in h.sorted_pairs():
        i, j = p.orbit_of(a), p.orbit_of(b)
        vertices.update((i, j))
        if i != j:
            edges[(min(i, j), max(i, j))] += 1
    return OrbitGraph(frozenset(vertices), edges)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True


def check_claims(h: PartialInj, p: PartitionSpec) -> dict:
    """Check that the orbit graph is a forest and that no two orbits share two h-pairs.

    Acyclicity is judged on the underlying simple graph; repeated edges are
    reported separately.  Pairs inside a single orbit are listed as
    violations as well, but do not affect the two flags.
    """
    g = orbit_graph(h, p)
    violations = []
    for a, b in h.sorted_pairs():
        if p.orbit_of(a) == p.orbit_of(b):
            violations.append({"claim": "crosses_orbits", "pair": [a, b]})
    one_edge = True
    for e, k in sorted(g.edges.items()):
        if k > 1:
            one_edge = False
            violations.append({"claim": "one_edge_per_pair", "edge": list(e), "multiplicity": k})
    uf = _UnionFind()
    acyclic = True
    for i, j in g.simple_edges():
        if not uf.union(i, j):
            acyclic = False
            violations.append({"claim": "acyclic", "edge": [i, j]})
    return {"acyclic": acyclic, "one_edge_per_pair": one_edge, "violations": violations}


# ---------------------------------------------------------------- walk argument

def walk_witness(w, h: PartialInj, rho, var: str, alpha: int) -> Optional[tuple[int, int]]:
    """For a fixed point ``alpha`` of ``w`` with ``var := h``, find a ground segment fixing a point.

    ``w`` is split cyclically into maximal runs of ground letters separated
    by ``var`` letters.  Returns ``(run_index, point)`` for the first run
    whose composite fixes the point at which the evaluation enters it, or
    ``None`` if no run does (which the tree structure of the orbit graph
    rules out for good words).
    """
    from .evaluate import _ground

    letters = w.letters
    trace = [alpha]
    v = alpha
    for x in reversed(letters):
        if x.name == var:
            v = h.get(v) if x.exp == 1 else h.preimage(v)
        else:
            v = _ground(x, rho)(v)
        if v is None:
            raise ValueError(f"{alpha} is not in the domain of the word")
        trace.append(v)
    if v != alpha:
        raise ValueError(f"{alpha} is not a fixed point")
    # positions are in evaluation order: step k applies letters[-1-k]
    order = list(reversed(letters))
    var_steps = [k for k, x in enumerate(order) if x.name == var]
    if not var_steps:
        return (0, alpha)
    runs = []
    for idx, k in enumerate(var_steps):
        nxt = var_steps[idx + 1] if idx + 1 < len(var_steps) else var_steps[0] + len(order)
        runs.append((k + 1, nxt))
    for idx, (lo, hi) in enumerate(runs):
        if hi == lo:
            continue
        entry = trace[lo % len(order)]
        exit_ = trace[hi % len(order)]
        if entry == exit_:
            return (idx, entry)
    return None
