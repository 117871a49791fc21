"""Depth-bounded certificates about ground groups and partial maps.

A certificate never claims an unbounded property: it records the depth it
examined and the exact verdict for every word up to that length.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import UnsupportedDescriptor
from .evaluate import GenericState, GroundAssignment, eval_word, ground_perm, substitute
from .perm import FINITE, IDENTITY_ON_DOMAIN, INFINITE, ExactPerm, FixedPointReport, PartialInj, PeriodicMap
from .words import EPSILON, GENERIC, GROUND, Word, enumerate_reduced

IDENTITY = "identity"

MapDescriptor = Union[PeriodicMap, PartialInj, ExactPerm]


def _verdict(report: FixedPointReport, identity: bool = False) -> dict:
    if identity or report.kind == IDENTITY_ON_DOMAIN:
        return {"kind": IDENTITY}
    if report.kind == FINITE:
        return {"kind": FINITE, "points": sorted(report.finite_points)}
    return {
        "kind": INFINITE,
        "residues": sorted(report.witness_residues),
        "period": report.period,
        "offset": report.offset,
    }


@dataclass
class Certificate:
    subject: dict
    depth: int
    verdicts: dict = field(default_factory=dict)
    passed: bool = True
    counterexamples: list = field(default_factory=list)
    relations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "subject": self.subject,
            "depth": self.depth,
            "passed": self.passed,
            "verdicts": [{"word": w, **v} for w, v in self.verdicts.items()],
            "counterexamples": self.counterexamples,
            "relations": self.relations,
        }


def _ground_alphabet(rho: GroundAssignment) -> list[tuple[str, str]]:
    return [(name, GROUND) for name in sorted(rho)]


def cofinitary_certificate(rho: GroundAssignment, depth: int) -> Certificate:
    """Classify every reduced ground word of length ``1..depth``.

    Passes when each word is the identity or has finitely many fixed points.
    Words of length two or more that evaluate to the identity are listed as
    relations: they show the generated group is not free on the given
    letters.  A generator that is itself the identity permutation is a
    degenerate representation and is judged by its fixed points like any
    other permutation, so it fails.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    cert = Certificate({"kind": "ground", "generators": {k: rho[k].as_dict() for k in sorted(rho)}}, depth)
    for w in enumerate_reduced(_ground_alphabet(rho), depth):
        p = ground_perm(w, rho)
        identity = p.is_identity() and len(w) > 1
        v = _verdict(p.fixed_points(), identity)
        cert.verdicts[str(w)] = v
        if identity:
            cert.relations.append(str(w))
        elif v["kind"] == INFINITE:
            cert.passed = False
            cert.counterexamples.append({"word": str(w), "reason": "infinitely many fixed points"})
    return cert


def as_periodic_map(f) -> PeriodicMap:
    if isinstance(f, PeriodicMap):
        return f
    if isinstance(f, (PartialInj, ExactPerm)):
        return f.to_map()
    raise UnsupportedDescriptor(f"cannot read {type(f).__name__} as an eventually periodic partial map")


def hitable_certificate(f: MapDescriptor, rho: GroundAssignment, depth: int, var: str = "x") -> Certificate:
    """Depth-bounded hitability check for ``f`` relative to the group generated by ``rho``.

    (i) ``f`` must differ from every ground word of length ``<= depth``
    (the empty word included) at infinitely many points.  (ii) Every reduced
    word over ``var`` and the ground letters that contains ``var`` and has at
    most ``depth`` letters must, after substituting ``f``, be the identity on
    its domain or have finitely many fixed points.  Ground-only words get a
    verdict too but never disqualify.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if var in rho:
        raise ValueError(f"variable {var!r} clashes with a ground letter")
    fm = as_periodic_map(f)
    cert = Certificate(
        {"kind": "hitable", "map": fm.as_dict(), "generators": {k: rho[k].as_dict() for k in sorted(rho)}},
        depth,
    )
    for g in [EPSILON] + enumerate_reduced(_ground_alphabet(rho), depth):
        if not fm.differs_infinitely_from(ground_perm(g, rho)):
            cert.passed = False
            cert.counterexamples.append({"word": str(g), "reason": "agrees with a group element almost everywhere"})
    alphabet = [(var, GENERIC)] + _ground_alphabet(rho)
    for w in enumerate_reduced(alphabet, depth):
        if var not in w.names():
            p = ground_perm(w, rho)
            cert.verdicts[str(w)] = _verdict(p.fixed_points(), p.is_identity())
            continue
        v = _verdict(substitute(w, var, fm, rho).fixed_points())
        cert.verdicts[str(w)] = v
        if v["kind"] == INFINITE:
            cert.passed = False
            cert.counterexamples.append({"word": str(w), "reason": "infinitely many fixed points"})
    return cert


def _prefix_states(s: GenericState) -> list[GenericState]:
    triples = s.triples()
    return [GenericState.from_triples(triples[:k]) for k in range(len(triples) + 1)]


def spectrum(
    w: Word,
    states: Union[GenericState, Sequence[GenericState]],
    rho: GroundAssignment,
    bound: int,
) -> list[int]:
    """Number of fixed points of ``e_w`` below ``bound`` along a growing sequence of states.

    Given a single state, its prefixes (in sorted triple order, starting
    from the empty state) are used.
    """
    if isinstance(states, GenericState):
        states = _prefix_states(states)
    return [sum(1 for a in range(bound) if eval_word(w, s, rho, a) == a) for s in states]
