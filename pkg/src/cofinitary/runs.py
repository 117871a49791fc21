"""Run configurations, trace artifacts and trace verification.

A trace is a JSON Lines file:

* a header record with the schema version, the run mode, the normalised
  configuration, the initial condition and the expanded schedule;
* one ``stage`` record per schedule entry with the pairs and words it added;
* an ``end`` record with the final state and mode-specific checks.

Nothing in a trace depends on the clock or on randomness, so building the
same configuration twice gives identical bytes, and ``verify_trace`` can
rebuild a trace from its own header and compare.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any, Optional

from .errors import InvalidConfig
from .forcing import (
    DEFAULT_SEARCH_BOUND,
    EMBED,
    FREE,
    Condition,
    StageRecord,
    apply_delta,
    empty_condition,
    generic_run,
    is_condition,
    leq,
)
from .io import (
    SCHEMA_VERSION,
    Alphabet,
    condition_from_dict,
    condition_to_dict,
    dumps,
    expand_schedule,
    ground_from_config,
    group_from_config,
    map_from_descriptor,
    partition_from_config,
    spec_to_dict,
    stage_line,
)
from .orbits import GreedyBuilder, check_claims
from .stage import stage_step

MODES = ("generic", "embed", "greedy-h", "stage-step")


@dataclass
class RunConfig:
    mode: str
    ground: dict = field(default_factory=dict)
    group: Any = None
    partition: Optional[dict] = None
    schedule: list = field(default_factory=list)
    initial: Optional[dict] = None
    stages: int = 0
    search_bound: int = DEFAULT_SEARCH_BOUND
    f: Optional[dict] = None
    hits: int = 8
    depth: int = 2
    function_hits: int = 8
    cert_depth: int = 2

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise InvalidConfig("a run config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**d)
        if cfg.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, not {cfg.mode!r}")
        for name in ("stages", "hits", "depth", "function_hits", "cert_depth"):
            v = getattr(cfg, name)
            if not isinstance(v, int) or v < 0:
                raise InvalidConfig(f"{name} must be a non-negative integer")
        if not isinstance(cfg.search_bound, int) or cfg.search_bound < 1:
            raise InvalidConfig("search_bound must be positive")
        if cfg.mode == "embed" and cfg.group is None:
            raise InvalidConfig("embed runs need a group")
        if cfg.mode in ("greedy-h", "stage-step") and cfg.partition is None:
            raise InvalidConfig(f"{cfg.mode} runs need a partition")
        if cfg.mode == "stage-step" and cfg.f is None:
            raise InvalidConfig("stage-step runs need a candidate map f")
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)


# ------------------------------------------------------------------ building

def _header(cfg: RunConfig, initial: Optional[Condition], schedule: list) -> str:
    return dumps(
        {
            "record": "header",
            "schema_version": SCHEMA_VERSION,
            "mode": cfg.mode,
            "config": cfg.to_dict(),
            "initial": None if initial is None else condition_to_dict(initial),
            "schedule": [spec_to_dict(s) for s in schedule],
        }
    )


def _check_names(schedule: list, rho: dict, H) -> None:
    for spec in schedule:
        name = getattr(spec, "name", None)
        if name is None:
            continue
        if name in rho:
            raise InvalidConfig(f"{name!r} is a ground letter and cannot be extended")
        if H is not None and name not in H.names:
            raise InvalidConfig(f"{name!r} is not an element of the group")


def _forcing_lines(cfg: RunConfig) -> list[str]:
    rho = ground_from_config(cfg.ground)
    H = group_from_config(cfg.group) if cfg.mode == "embed" else None
    alphabet = Alphabet(rho, H.names if H is not None else ())
    schedule = expand_schedule(cfg.schedule, alphabet)
    _check_names(schedule, rho, H)
    kind = EMBED if H is not None else FREE
    if cfg.initial is None:
        initial = empty_condition(kind, H)
    else:
        initial = condition_from_dict({**cfg.initial, "kind": kind}, alphabet, H)
    if not is_condition(initial, rho):
        raise InvalidConfig("the initial state is not a condition")
    trace = generic_run(initial, rho, schedule, cfg.search_bound)
    lines = [_header(cfg, initial, schedule)]
    lines += [stage_line(rec) for rec in trace.stages]
    lines.append(dumps({"record": "end", "stages": len(trace.stages), "final": condition_to_dict(trace.final)}))
    return lines


def _greedy_lines(cfg: RunConfig) -> list[str]:
    p = partition_from_config(cfg.partition)
    b = GreedyBuilder(p)
    lines = [_header(cfg, None, [])]
    for i in range(cfg.stages):
        a, v = b.step()
        lines.append(stage_line(StageRecord(i, i, (("h", a, v),), ())))
    h = b.result()
    claims = check_claims(h, p)
    lines.append(dumps({"record": "end", "stages": cfg.stages, "final": {"pairs": [list(x) for x in h.sorted_pairs()]}, "claims": claims}))
    return lines


def _stage_step_lines(cfg: RunConfig) -> list[str]:
    p = partition_from_config(cfg.partition)
    rho = ground_from_config(cfg.ground)
    f = map_from_descriptor(cfg.f)
    res = stage_step(p, f, rho, cfg.hits, cfg.depth, cfg.function_hits, cfg.cert_depth, cfg.search_bound)
    lines = [_header(cfg, res.trace.initial, res.schedule)]
    lines += [stage_line(rec) for rec in res.trace.stages]
    lines.append(
        dumps(
            {
                "record": "end",
                "stages": len(res.trace.stages),
                "final": condition_to_dict(res.trace.final),
                "case": res.case,
                "chosen": list(res.chosen),
                "certificates": [c.passed for c in res.certificates],
                "h": [list(x) for x in res.h.sorted_pairs()],
            }
        )
    )
    return lines


def build_lines(cfg: RunConfig) -> list[str]:
    if cfg.mode in ("generic", "embed"):
        return _forcing_lines(cfg)
    if cfg.mode == "greedy-h":
        return _greedy_lines(cfg)
    return _stage_step_lines(cfg)


def build_text(cfg: RunConfig) -> str:
    return "\n".join(build_lines(cfg)) + "\n"


# ------------------------------------------------------------------ verifying

VERIFY_OK = 0
VERIFY_MISMATCH = 1
VERIFY_UNREADABLE = 2


def _check_invariants(cfg: RunConfig, records: list[dict]) -> list[str]:
    """Re-check module invariants on the parsed stage and end records."""
    problems = []
    header, stages, end = records[0], records[1:-1], records[-1]
    if cfg.mode == "greedy-h":
        claims = end.get("claims", {})
        if not (claims.get("acyclic") and claims.get("one_edge_per_pair")):
            problems.append("orbit-graph claims fail")
        if any(a == b for a, b in end["final"]["pairs"]):
            problems.append("h has a fixed point")
        return problems
    rho = ground_from_config(cfg.ground)
    H = group_from_config(cfg.group) if cfg.mode == "embed" else None
    alphabet = Alphabet(rho, H.names if H is not None else ())
    c = condition_from_dict(header["initial"], alphabet, H)
    for rec in stages:
        words = tuple(alphabet.parse(w) for w in rec["words"])
        pairs = tuple((n, a, b) for n, a, b in rec["pairs"])
        d = apply_delta(c, StageRecord(rec["index"], rec["spec"], pairs, words))
        if not leq(d, c, rho):
            problems.append(f"stage {rec['index']} is not an extension")
        c = d
    if not is_condition(c, rho):
        problems.append("final state is not a condition")
    if condition_to_dict(c) != end["final"]:
        problems.append("replayed final state differs from the recorded one")
    return problems


def verify_text(text: str) -> tuple[int, str]:
    """Rebuild a trace from its header and compare; returns (exit code, message)."""
    lines = text.split("\n")
    try:
        header = json.loads(lines[0])
    except (json.JSONDecodeError, IndexError):
        return VERIFY_UNREADABLE, "header is not valid JSON"
    if not isinstance(header, dict) or header.get("record") != "header":
        return VERIFY_UNREADABLE, "first record is not a header"
    if header.get("schema_version") != SCHEMA_VERSION:
        return VERIFY_UNREADABLE, f"unsupported schema version {header.get('schema_version')!r}"
    try:
        cfg = RunConfig.from_dict(header.get("config"))
        expected = build_text(cfg)
    except InvalidConfig as exc:
        return VERIFY_UNREADABLE, f"header config is invalid: {exc}"
    except Exception as exc:  # the recorded run cannot be reproduced at all
        return VERIFY_MISMATCH, f"rebuilding the run failed: {exc}"
    if text != expected:
        if expected.startswith(text):
            return VERIFY_UNREADABLE, "trace is truncated"
        for i, (got, want) in enumerate(zip(text.split("\n"), expected.split("\n"))):
            if got != want:
                return VERIFY_MISMATCH, f"line {i + 1} differs from the rebuilt run"
        return VERIFY_MISMATCH, "trace has extra or missing lines"
    records = [json.loads(x) for x in expected.split("\n") if x]
    problems = _check_invariants(cfg, records)
    if problems:
        return VERIFY_MISMATCH, "; ".join(problems)
    return VERIFY_OK, f"ok: {len(records) - 2} stages reproduced"


def verify_trace(path) -> tuple[int, str]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        return VERIFY_UNREADABLE, f"cannot read {path}: {exc}"
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return VERIFY_MISMATCH, "trace is not valid UTF-8"
    return verify_text(text)
