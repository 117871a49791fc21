"""Command-line front end.

Exit codes: 0 success or property holds, 1 property failure (including a
search or greedy step that cannot continue), 2 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .analysis import cofinitary_certificate, hitable_certificate
from .errors import (
    ClosureConflict,
    CofinitaryError,
    InvalidConfig,
    NoDisjointOrbit,
    SearchExhausted,
    UnboundedForbidden,
)
from .io import SCHEMA_VERSION, dumps, ground_from_config, map_from_descriptor, partition_from_config, read_json
from .orbits import check_claims, greedy_build, orbit_graph
from .runs import RunConfig, build_text, verify_trace

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args) -> dict:
    if not args.config:
        raise InvalidConfig("--config is required")
    cfg = read_json(args.config)
    if not isinstance(cfg, dict):
        raise InvalidConfig("config must be a JSON object")
    for flag in ("depth", "stages", "bound"):
        v = getattr(args, flag, None)
        if v is not None:
            if v < 0:
                raise InvalidConfig(f"--{flag} must be non-negative")
            cfg["search_bound" if flag == "bound" else flag] = v
    return cfg


def _artifact(kind: str, body: dict) -> str:
    return dumps({"record": kind, "schema_version": SCHEMA_VERSION, **body}) + "\n"


def cmd_certify(args) -> int:
    cfg = _load(args)
    rho = ground_from_config(cfg.get("ground"))
    depth = cfg.get("depth", 2)
    if not isinstance(depth, int) or depth < 1:
        raise InvalidConfig("depth must be a positive integer")
    cert = cofinitary_certificate(rho, depth)
    _emit(_artifact("certificate", cert.as_dict()), args.out)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_hitable(args) -> int:
    cfg = _load(args)
    rho = ground_from_config(cfg.get("ground"))
    f = map_from_descriptor(cfg.get("f"))
    depth = cfg.get("depth", 3)
    if not isinstance(depth, int) or depth < 1:
        raise InvalidConfig("depth must be a positive integer")
    cert = hitable_certificate(f, rho, depth)
    _emit(_artifact("certificate", cert.as_dict()), args.out)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_build(args) -> int:
    cfg = _load(args)
    cfg["mode"] = args.mode
    run = RunConfig.from_dict(cfg)
    _emit(build_text(run), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    code, message = verify_trace(args.trace)
    print(message, file=sys.stderr)
    return code


def cmd_orbit_graph(args) -> int:
    cfg = _load(args)
    p = partition_from_config(cfg.get("partition"))
    stages = cfg.get("stages", 0)
    if not isinstance(stages, int) or stages < 0:
        raise InvalidConfig("stages must be a non-negative integer")
    h = greedy_build(p, stages)
    claims = check_claims(h, p)
    report = {"graph": orbit_graph(h, p).as_dict(), "claims": claims, "stages": stages}
    _emit(_artifact("orbit_graph", report), args.out)
    return EXIT_OK if claims["acyclic"] and claims["one_edge_per_pair"] else EXIT_FAIL


def _common(p: argparse.ArgumentParser, depth=False, stages=False, bound=False) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", help="output file (default: stdout)")
    if depth:
        p.add_argument("--depth", type=int, help="word length bound")
    if stages:
        p.add_argument("--stages", type=int, help="number of stages")
    if bound:
        p.add_argument("--bound", type=int, help="witness search bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cofinitary", description="Desk-scale cofinitary group constructions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="check that a ground group is cofinitary up to a word length")
    _common(p, depth=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("build", help="run a construction and write its trace")
    p.add_argument("mode", choices=["generic", "greedy-h", "embed", "stage-step"])
    _common(p, depth=True, stages=True, bound=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="rebuild a trace from its header and compare")
    p.add_argument("trace")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit-graph", help="greedy h over a partition and its orbit graph")
    _common(p, stages=True)
    p.set_defaults(func=cmd_orbit_graph)

    p = sub.add_parser("hitable", help="depth-bounded hitability certificate for a partial map")
    _common(p, depth=True)
    p.set_defaults(func=cmd_hitable)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (SearchExhausted, NoDisjointOrbit, ClosureConflict, UnboundedForbidden) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CofinitaryError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
