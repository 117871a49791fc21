from __future__ import annotations

import json
from pathlib import Path

import pytest

from cofinitary.analysis import cofinitary_certificate
from cofinitary.cli import main
from cofinitary.perm import block_cycle3, block_swap

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BUILDS = [
    ("greedy-h", "greedy_singletons.json"),
    ("greedy-h", "greedy_blocks3.json"),
    ("generic", "generic_small.json"),
    ("generic", "generic_empty.json"),
    ("embed", "embed_z3.json"),
    ("stage-step", "stage_step_case2.json"),
]


def _records(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def _build(tmp_path, mode, config, name="run.trace", *extra):
    out = tmp_path / name
    code = main(["build", mode, "--config", str(CONFIGS / config), "--out", str(out), *extra])
    return code, out


def test_certify_exit_codes(tmp_path):
    out = tmp_path / "cert.json"
    assert main(["certify", "--config", str(CONFIGS / "certify_b2.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True
    assert main(["certify", "--config", str(CONFIGS / "certify_identity.json"), "--out", str(out)]) == 1
    expected = cofinitary_certificate({"b": block_swap(), "c": block_cycle3()}, 6).passed
    code = main(["certify", "--config", str(CONFIGS / "certify_b2_b3cycle.json"), "--out", str(out)])
    assert code == (0 if expected else 1)


def test_certify_depth_flag_overrides_config(tmp_path):
    out = tmp_path / "cert.json"
    main(["certify", "--config", str(CONFIGS / "certify_b2.json"), "--depth", "1", "--out", str(out)])
    assert json.loads(out.read_text())["depth"] == 1


def test_greedy_trace_pairs(tmp_path):
    code, out = _build(tmp_path, "greedy-h", "greedy_singletons.json")
    assert code == 0
    stages = [r for r in _records(out) if r["record"] == "stage"]
    assert [tuple(r["pairs"][0][1:]) for r in stages] == [(0, 1), (2, 0), (1, 3), (4, 2)]


def test_greedy_residues_fail_with_stage(tmp_path, capsys):
    code, _ = _build(tmp_path, "greedy-h", "greedy_residues5.json")
    assert code == 1
    assert "stage 4" in capsys.readouterr().err


def test_generic_empty_schedule(tmp_path):
    code, out = _build(tmp_path, "generic", "generic_empty.json")
    assert code == 0
    end = _records(out)[-1]
    assert end["record"] == "end" and end["final"]["pairs"] == [] and end["stages"] == 0


@pytest.mark.parametrize("mode,config", BUILDS)
def test_build_is_deterministic_and_verifies(tmp_path, mode, config):
    code1, out1 = _build(tmp_path, mode, config, "a.trace")
    code2, out2 = _build(tmp_path, mode, config, "b.trace")
    assert code1 == code2 == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert main(["verify", str(out1)]) == 0


def test_verify_detects_changes(tmp_path):
    _, out = _build(tmp_path, "generic", "generic_small.json")
    lines = out.read_text().split("\n")
    stage = next(i for i, line in enumerate(lines) if '"pairs":[["a"' in line)
    rec = json.loads(lines[stage])
    rec["pairs"][0][2] += 1
    lines[stage] = json.dumps(rec, separators=(",", ":"), sort_keys=True)
    bad = tmp_path / "bad.trace"
    bad.write_text("\n".join(lines))
    assert main(["verify", str(bad)]) == 1


def test_verify_truncated_and_unreadable(tmp_path):
    _, out = _build(tmp_path, "generic", "generic_small.json")
    text = out.read_text()
    cut = tmp_path / "cut.trace"
    cut.write_text(text[: len(text) // 2])
    assert main(["verify", str(cut)]) == 2
    assert main(["verify", str(tmp_path / "missing.trace")]) == 2
    junk = tmp_path / "junk.trace"
    junk.write_text("not json\n")
    assert main(["verify", str(junk)]) == 2


def test_verify_rejects_unknown_schema(tmp_path):
    _, out = _build(tmp_path, "greedy-h", "greedy_singletons.json")
    lines = out.read_text().split("\n")
    header = json.loads(lines[0])
    header["schema_version"] = 99
    lines[0] = json.dumps(header)
    out.write_text("\n".join(lines))
    assert main(["verify", str(out)]) == 2


def test_bad_input_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["certify", "--config", str(bad)]) == 2
    assert main(["certify"]) == 2
    assert main(["build", "generic", "--config", str(tmp_path / "nope.json")]) == 2
    nogroup = tmp_path / "noembed.json"
    nogroup.write_text('{"schedule": []}')
    assert main(["build", "embed", "--config", str(nogroup)]) == 2
    assert main(["frobnicate"]) == 2
    unknown = tmp_path / "unknown.json"
    unknown.write_text('{"ground": {"b": "b7"}, "depth": 1}')
    assert main(["certify", "--config", str(unknown)]) == 2


def test_stage_count_flag(tmp_path):
    code, out = _build(tmp_path, "greedy-h", "greedy_singletons.json", "run.trace", "--stages", "10")
    assert code == 0
    assert _records(out)[-1]["stages"] == 10


def test_orbit_graph_and_hitable(tmp_path):
    out = tmp_path / "graph.json"
    assert main(["orbit-graph", "--config", str(CONFIGS / "orbit_graph_singletons.json"), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["claims"]["acyclic"] and len(report["graph"]["edges"]) == 100
    assert main(["hitable", "--config", str(CONFIGS / "hitable_evens.json"), "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"] is True


def test_stdout_output(capsys):
    assert main(["build", "greedy-h", "--config", str(CONFIGS / "greedy_singletons.json")]) == 0
    assert capsys.readouterr().out.startswith('{"config"')
