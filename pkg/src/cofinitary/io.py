"""JSON readers and writers for configs, schedules, conditions and traces.

Every reader raises ``InvalidConfig`` on malformed input so the command
line can map it to its input-error exit code.  Writers produce canonical
text: sorted keys where order carries no meaning, compact separators, and no
timestamps, so equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from .errors import CofinitaryError, InvalidConfig, UnsupportedDescriptor
from .evaluate import GenericState
from .forcing import (
    EMBED,
    FREE,
    Condition,
    DomainHit,
    FunctionHit,
    RangeHit,
    RelationClosure,
    TargetHit,
    WordAdd,
    good_word_schedule,
    hit_schedule,
)
from .orbits import PartitionSpec, PeriodicSet
from .perm import ExactPerm, PartialInj, PeriodicMap, block_cycle3, block_swap
from .words import GENERIC, GROUND, HELEM, FiniteGroupTable, Word, enumerate_good, parse_word

SCHEMA_VERSION = 1


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)


def _need(d: dict, key: str, kind=None):
    if not isinstance(d, dict) or key not in d:
        raise InvalidConfig(f"missing field {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise InvalidConfig(f"field {key!r} has the wrong type")
    return v


def _guard(fn):
    """Turn value errors from constructors into ``InvalidConfig``."""

    def wrapped(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InvalidConfig:
            raise
        except (CofinitaryError, ValueError, TypeError, KeyError) as exc:
            raise InvalidConfig(f"{fn.__name__}: {exc}") from exc

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


# ------------------------------------------------------------- permutations

CATALOG = {
    "identity": ExactPerm.identity,
    "b2": block_swap,
    "b3cycle": block_cycle3,
}


@_guard
def perm_from_rule(rule) -> ExactPerm:
    """Catalog name, or a rule record: identity, block, head_periodic, table_over_identity."""
    if isinstance(rule, str):
        if rule not in CATALOG:
            raise InvalidConfig(f"unknown catalog permutation {rule!r}")
        return CATALOG[rule]()
    kind = _need(rule, "rule", str)
    if kind == "identity":
        return ExactPerm.identity()
    if kind == "block":
        return ExactPerm.from_block(_need(rule, "pattern", list))
    if kind == "head_periodic":
        window = _need(rule, "window", list)
        return ExactPerm(tuple(rule.get("head", [])), int(rule.get("period", len(window))), tuple(window))
    if kind == "table_over_identity":
        return ExactPerm.from_table(tuple(p) for p in _need(rule, "pairs", list))
    raise InvalidConfig(f"unknown permutation rule {kind!r}")


def perm_to_dict(p: ExactPerm) -> dict:
    return {"rule": "head_periodic", "head": list(p.head), "period": p.period, "window": list(p.window)}


@_guard
def ground_from_config(ground) -> dict:
    if ground is None:
        return {}
    if not isinstance(ground, dict):
        raise InvalidConfig("ground must map letter names to permutation rules")
    return {str(k): perm_from_rule(v) for k, v in sorted(ground.items())}


# ------------------------------------------------------------- partial maps

@_guard
def map_from_descriptor(d) -> PeriodicMap:
    """Eventually periodic partial map: periodic_map, residues, identity_on or pairs."""
    if isinstance(d, PeriodicMap):
        return d
    if not isinstance(d, dict):
        raise UnsupportedDescriptor(f"unsupported map descriptor {d!r}")
    kind = d.get("kind")
    if kind == "periodic_map":
        window = _need(d, "window", list)
        return PeriodicMap(tuple(d.get("head", [])), int(d.get("period", len(window))), tuple(window))
    if kind == "residues":
        disp = {int(k): int(v) for k, v in _need(d, "displacements", dict).items()}
        return PeriodicMap.from_residues(int(_need(d, "modulus")), disp, int(d.get("start", 0)))
    if kind == "identity_on":
        return PeriodicMap.identity_on(int(_need(d, "modulus")), _need(d, "residues", list), int(d.get("start", 0)))
    if kind == "pairs":
        return PartialInj(tuple(p) for p in _need(d, "pairs", list)).to_map()
    raise UnsupportedDescriptor(f"unsupported map descriptor kind {kind!r}")


def map_to_dict(m: PeriodicMap) -> dict:
    return m.as_dict()


# ------------------------------------------------------------- groups

@_guard
def group_from_config(g) -> Optional[FiniteGroupTable]:
    if g is None:
        return None
    if g == "S3":
        return FiniteGroupTable.symmetric3()
    if isinstance(g, dict) and "cyclic" in g:
        return FiniteGroupTable.cyclic(int(g["cyclic"]), str(g.get("generator", "g")))
    if isinstance(g, dict) and "table" in g:
        t = g["table"]
        return FiniteGroupTable(tuple(_need(t, "names", list)), tuple(tuple(r) for r in _need(t, "mul", list)))
    raise InvalidConfig(f"unknown group {g!r}")


def group_to_dict(H: Optional[FiniteGroupTable]):
    return None if H is None else {"table": {"names": list(H.names), "mul": [list(r) for r in H.mul]}}


# ------------------------------------------------------------- partitions

@_guard
def partition_from_config(d) -> PartitionSpec:
    kind = _need(d, "kind", str)
    if kind == "singletons":
        return PartitionSpec.singletons()
    if kind == "blocks":
        return PartitionSpec.blocks(int(_need(d, "size")))
    if kind == "residues":
        return PartitionSpec.residues(int(_need(d, "modulus")))
    if kind == "explicit_periodic":
        return PartitionSpec.explicit_periodic(d.get("head", []), _need(d, "window", list))
    if kind == "mixed":
        unbounded = [
            PeriodicSet(int(_need(u, "modulus")), tuple(_need(u, "residues", list)), int(u.get("start", 0)), tuple(u.get("extra", [])))
            for u in d.get("unbounded", [])
        ]
        return PartitionSpec.mixed(d.get("bounded", []), unbounded)
    raise InvalidConfig(f"unknown partition kind {kind!r}")


# ------------------------------------------------------------- words and specs

class Alphabet:
    """Letter kinds by name, used to parse word text."""

    def __init__(self, ground: Iterable[str] = (), helem: Iterable[str] = ()):
        self.ground = sorted(ground)
        self.helem = sorted(helem)

    def parse(self, text: str) -> Word:
        try:
            return parse_word(text, self.ground, self.helem)
        except CofinitaryError as exc:
            raise InvalidConfig(str(exc)) from exc

    def letters(self, names: Iterable[str]) -> list[tuple[str, str]]:
        out = []
        for n in names:
            kind = GROUND if n in self.ground else HELEM if n in self.helem else GENERIC
            out.append((n, kind))
        return out


def spec_to_dict(spec) -> dict:
    if isinstance(spec, DomainHit):
        return {"kind": "domain_hit", "name": spec.name, "arg": spec.arg}
    if isinstance(spec, RangeHit):
        return {"kind": "range_hit", "name": spec.name, "arg": spec.arg}
    if isinstance(spec, WordAdd):
        return {"kind": "word_add", "word": str(spec.word)}
    if isinstance(spec, TargetHit):
        return {"kind": "target_hit", "name": spec.name, "target": spec.target.as_dict(), "floor": spec.floor}
    if isinstance(spec, FunctionHit):
        return {"kind": "function_hit", "name": spec.name, "f": spec.f.as_dict(), "floor": spec.floor}
    if isinstance(spec, RelationClosure):
        return {"kind": "relation_closure", "names": list(spec.names)}
    raise InvalidConfig(f"unknown spec {spec!r}")


@_guard
def spec_from_dict(d: dict, alphabet: Alphabet):
    kind = _need(d, "kind", str)
    if kind == "domain_hit":
        return DomainHit(str(_need(d, "name")), int(_need(d, "arg")))
    if kind == "range_hit":
        return RangeHit(str(_need(d, "name")), int(_need(d, "arg")))
    if kind == "word_add":
        return WordAdd(alphabet.parse(_need(d, "word", str)))
    if kind == "target_hit":
        return TargetHit(str(_need(d, "name")), map_from_descriptor(_need(d, "target")), int(d.get("floor", 0)))
    if kind == "function_hit":
        return FunctionHit(str(_need(d, "name")), map_from_descriptor(_need(d, "f")), int(d.get("floor", 0)))
    if kind == "relation_closure":
        return RelationClosure(tuple(_need(d, "names", list)))
    raise InvalidConfig(f"unknown spec kind {kind!r}")


@_guard
def expand_schedule(items, alphabet: Alphabet) -> list:
    """Expand spec records and recipe records into a flat list of specs.

    Recipes: ``good_words`` (names, max_len), ``hits`` (names, below,
    domain, range), ``function_hits`` (name, f, count) and ``target_hits``
    (name, target, count).
    """
    if not isinstance(items, list):
        raise InvalidConfig("schedule must be a list")
    out: list = []
    for item in items:
        if not isinstance(item, dict):
            raise InvalidConfig(f"bad schedule entry {item!r}")
        recipe = item.get("recipe")
        if recipe is None:
            out.append(spec_from_dict(item, alphabet))
        elif recipe == "good_words":
            names = _need(item, "names", list)
            words = enumerate_good(alphabet.letters(names), int(_need(item, "max_len")))
            if not item.get("ground_only", True):
                words = [w for w in words if not w.is_ground_only()]
            out += good_word_schedule(words)
        elif recipe == "hits":
            out += hit_schedule(
                _need(item, "names", list),
                int(_need(item, "below")),
                bool(item.get("domain", True)),
                bool(item.get("range", True)),
            )
        elif recipe == "function_hits":
            f = map_from_descriptor(_need(item, "f"))
            out += [FunctionHit(str(_need(item, "name")), f, int(item.get("floor", 0)))] * int(_need(item, "count"))
        elif recipe == "target_hits":
            t = map_from_descriptor(_need(item, "target"))
            out += [TargetHit(str(_need(item, "name")), t, int(item.get("floor", 0)))] * int(_need(item, "count"))
        else:
            raise InvalidConfig(f"unknown schedule recipe {recipe!r}")
    return out


# ------------------------------------------------------------- conditions

def condition_to_dict(c: Condition) -> dict:
    return {
        "kind": c.kind,
        "pairs": [list(t) for t in c.s.triples()],
        "words": [str(w) for w in c.sorted_words()],
    }


@_guard
def condition_from_dict(d: dict, alphabet: Alphabet, H: Optional[FiniteGroupTable] = None) -> Condition:
    kind = d.get("kind", FREE)
    if kind not in (FREE, EMBED):
        raise InvalidConfig(f"unknown poset kind {kind!r}")
    s = GenericState.from_triples((str(n), int(a), int(b)) for n, a, b in d.get("pairs", []))
    F = frozenset(alphabet.parse(w) for w in d.get("words", []))
    return Condition(s, F, kind, H if kind == EMBED else None)


def stage_line(rec) -> str:
    return dumps(
        {
            "record": "stage",
            "index": rec.index,
            "spec": rec.spec_index,
            "pairs": [list(t) for t in rec.pairs],
            "words": [str(w) for w in rec.words],
        }
    )


def read_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidConfig(f"cannot read {path}: {exc}") from exc
