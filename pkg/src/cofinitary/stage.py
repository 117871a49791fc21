"""One stage of the construction of a maximal cofinitary group with prescribed orbits.

The partition has finitely many bounded pieces and finitely many unbounded
periodic pieces.  The new permutation ``h`` is built separately on each
piece.  On a bounded piece it is a cyclic shift of the piece.  On an
unbounded piece ``U`` it is a generic permutation built in *local
coordinates*: the order isomorphism between N and ``U`` turns ``U`` into a
copy of N, every piece gets its own generic letter ``h<j>``, and a single
run of the forcing scheduler builds all of them at once.

The candidate ``f`` (a global eventually periodic partial map) decides
which extra dense sets are scheduled:

* case 2: ``f`` maps infinitely many points of some piece ``U_j`` into
  ``U_j`` and ``f`` restricted there passes the hitability certificate; the
  letter of ``U_j`` is made to agree with it again and again;
* case 3: ``f`` maps infinitely many points of ``U_j`` into a different
  piece ``U_k``; the letter of ``U_k`` is made to move points of the image
  of ``f`` to points of the image, and the composite
  ``f^-1 . h_k . f`` is then certified and hit if it passes;
* case 1: otherwise, only the words and the domain/range hits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .analysis import Certificate, hitable_certificate
from .errors import InvalidPartition
from .evaluate import GroundAssignment
from .forcing import (
    DEFAULT_SEARCH_BOUND,
    Condition,
    FunctionHit,
    RunTrace,
    TargetHit,
    empty_condition,
    extend_hit,
    delta,
    good_word_schedule,
    hit_schedule,
)
from .errors import SearchExhausted
from .orbits import PartitionSpec, PeriodicSet
from .perm import PartialInj, PeriodicMap
from .words import GENERIC, GROUND, enumerate_good


class PieceCoords:
    """Order isomorphism between N and an unbounded periodic piece."""

    def __init__(self, piece: PeriodicSet):
        self.piece = piece
        m = piece.modulus
        self.base = max(piece.start, max(piece.extra, default=-1) + 1)
        self.head = [n for n in range(self.base) if n in piece]
        self.row = [n for n in range(self.base, self.base + m) if n in piece]
        self._head_index = {n: i for i, n in enumerate(self.head)}

    @property
    def density(self) -> tuple[int, int]:
        """Points per period and the period."""
        return len(self.row), self.piece.modulus

    def to_global(self, k: int) -> int:
        if k < len(self.head):
            return self.head[k]
        q, r = divmod(k - len(self.head), len(self.row))
        return self.row[r] + q * self.piece.modulus

    def to_local(self, n: int) -> Optional[int]:
        if n < self.base:
            return self._head_index.get(n)
        q, rem = divmod(n - self.base, self.piece.modulus)
        try:
            r = self.row.index(self.base + rem)
        except ValueError:
            return None
        return len(self.head) + q * len(self.row) + r


def _pieces(p: PartitionSpec) -> tuple[list[frozenset], list[PeriodicSet]]:
    kind = p.descriptor[0] if p.descriptor else "explicit_periodic"
    if kind == "mixed":
        return list(p.descriptor[1]), list(p.descriptor[2])
    if kind == "residues":
        m = p.descriptor[1]
        return [], [PeriodicSet(m, (r,)) for r in range(m)]
    raise InvalidPartition(f"a stage step needs finitely many pieces, not a {kind} partition")


def _tail_window(f: PeriodicMap, pieces: list[PeriodicSet]) -> tuple[int, int]:
    """A start point and a period beyond which membership questions repeat."""
    shift = max([0] + [abs(d) for d in f.window if d is not None])
    start = f.head_len + shift
    period = f.period
    for u in pieces:
        start = max(start, u.start + shift, max(u.extra, default=-1) + 1 + shift)
        period = math.lcm(period, u.modulus)
    return start, period


def crosses_infinitely(f: PeriodicMap, src: PeriodicSet, dst: PeriodicSet, pieces: list[PeriodicSet]) -> bool:
    """Whether ``f`` maps infinitely many points of ``src`` into ``dst``."""
    start, period = _tail_window(f, pieces)
    for n in range(start, start + period):
        if n in src:
            v = f(n)
            if v is not None and v in dst:
                return True
    return False


def local_map(f: PeriodicMap, coords: PieceCoords, pieces: list[PeriodicSet]) -> PeriodicMap:
    """``f`` restricted to points of a piece that it maps back into the same piece, in local coordinates."""
    start, period = _tail_window(f, pieces)
    per, m = coords.density
    index_period = period // m * per
    n0 = coords.to_local(next(n for n in range(start, start + m + 1) if n in coords.piece))

    def fn(k):
        v = f(coords.to_global(k))
        return None if v is None else coords.to_local(v)

    return PeriodicMap.from_function(fn, n0, index_period)


def local_image_set(f: PeriodicMap, src: PeriodicSet, coords: PieceCoords, pieces: list[PeriodicSet]) -> PeriodicMap:
    """Identity on the local coordinates of ``f(src)`` inside the piece of ``coords``."""
    start, period = _tail_window(f, pieces)
    per, m = coords.density
    index_period = period // m * per
    # the image of the tail of src is periodic; look far enough past its start
    hi = start + 2 * period
    image = {f(n) for n in range(hi + period) if n in src and f(n) is not None}
    n0 = coords.to_local(next(n for n in range(hi, hi + m + 1) if n in coords.piece))
    return PeriodicMap.from_function(lambda k: k if coords.to_global(k) in image else None, n0, index_period)


@dataclass
class StageResult:
    case: int
    letters: dict
    schedule: list
    trace: RunTrace
    h: PartialInj
    certificates: list = field(default_factory=list)
    chosen: tuple = ()


def _cyclic_shift(piece: frozenset) -> list[tuple[int, int]]:
    pts = sorted(piece)
    return [(a, pts[(i + 1) % len(pts)]) for i, a in enumerate(pts)]


def _run(c: Condition, rho, schedule, start_index: int, bound: int, stages: list) -> Condition:
    for i, spec in enumerate(schedule, start=start_index):
        try:
            d = extend_hit(c, rho, spec, bound)
        except SearchExhausted as exc:
            raise exc.at_stage(i) from None
        stages.append(delta(c, d, i, i))
        c = d
    return c


def stage_step(
    partition: PartitionSpec,
    f: PeriodicMap,
    rho: GroundAssignment,
    hits: int = 8,
    depth: int = 2,
    function_hits: int = 8,
    cert_depth: int = 2,
    bound: int = DEFAULT_SEARCH_BOUND,
) -> StageResult:
    """Build ``h`` on every piece for one candidate ``f``.

    ``rho`` is the ground group in local coordinates; it acts on every
    unbounded piece through that piece's order isomorphism.  ``hits`` bounds
    the domain/range hits per piece, ``depth`` the length of the words whose
    fixed points are frozen, and ``function_hits`` the number of agreement
    (or target) hits scheduled in cases 2 and 3.
    """
    bounded, unbounded = _pieces(partition)
    coords = [PieceCoords(u) for u in unbounded]
    letters = {j: f"h{j}" for j in range(len(unbounded))}
    ground = [(name, GROUND) for name in sorted(rho)]
    words = []
    for j, name in letters.items():
        words += [w for w in enumerate_good([(name, GENERIC)] + ground, depth) if name in w.names()]
    schedule: list = good_word_schedule(words)
    certs: list[Certificate] = []
    case, chosen = 1, ()
    case_specs: list = []

    for j, u in enumerate(unbounded):
        if crosses_infinitely(f, u, u, unbounded):
            fj = local_map(f, coords[j], unbounded)
            cert = hitable_certificate(fj, rho, cert_depth)
            certs.append(cert)
            if cert.passed:
                case, chosen = 2, (j,)
                case_specs = [FunctionHit(letters[j], fj)] * function_hits
                break
    if case == 1:
        for j, k in ((j, k) for j in range(len(unbounded)) for k in range(len(unbounded)) if j != k):
            if crosses_infinitely(f, unbounded[j], unbounded[k], unbounded):
                case, chosen = 3, (j, k)
                target = local_image_set(f, unbounded[j], coords[k], unbounded)
                case_specs = [TargetHit(letters[k], target)] * function_hits
                break

    schedule += case_specs
    stages: list = []
    initial = empty_condition()
    c = _run(initial, rho, schedule, 0, bound, stages)

    if case == 3:
        j, k = chosen
        hk = c.s.get(letters[k])
        finv = f.inverse()
        pairs = []
        for y0, y1 in hk.sorted_pairs():
            src, dst = finv(coords[k].to_global(y0)), finv(coords[k].to_global(y1))
            if src is None or dst is None:
                continue
            a0, a1 = coords[j].to_local(src), coords[j].to_local(dst)
            if a0 is not None and a1 is not None:
                pairs.append((a0, a1))
        composite = PartialInj(pairs).to_map()
        cert = hitable_certificate(composite, rho, cert_depth)
        certs.append(cert)
        if cert.passed:
            extra = [FunctionHit(letters[j], composite)] * function_hits
            c = _run(c, rho, extra, len(schedule), bound, stages)
            schedule += extra

    tail = hit_schedule(list(letters.values()), hits)
    c = _run(c, rho, tail, len(schedule), bound, stages)
    schedule += tail

    h_pairs = []
    for piece in bounded:
        h_pairs += _cyclic_shift(piece)
    for j, name in letters.items():
        h_pairs += [(coords[j].to_global(a), coords[j].to_global(b)) for a, b in c.s.get(name).sorted_pairs()]
    trace = RunTrace(initial, schedule, stages, c)
    return StageResult(case, letters, schedule, trace, PartialInj(h_pairs), certs, chosen)
