"""End-to-end exercises of the command-line pipeline via main(argv)."""

import json
import shutil

import pytest

from apiscope.cli import main
from apiscope.jsonio import read_json, write_json


@pytest.fixture()
def run_dir(tmp_path, fixtures_dir):
    """Full pipeline over the wechat fixtures, laid out as a run directory."""
    d = tmp_path / "run"
    d.mkdir()
    ir = str(fixtures_dir / "wechat-mini.ir.json")
    cat_src = fixtures_dir / "wechat-mini.catalog.json"
    runtime = str(fixtures_dir / "wechat-mini.runtime.json")
    profile = str(fixtures_dir / "wechat.profile.json")
    shutil.copy(cat_src, d / "catalog.json")
    assert main(["scan", "--ir", ir, "--catalog", str(cat_src), "-o", str(d / "candidates.json")]) == 0
    assert main(
        ["gen-tests", "--candidates", str(d / "candidates.json"), "--ir", ir, "-o", str(d / "suite.json")]
    ) == 0
    assert main(
        ["find-bridge", "--runtime", runtime, "--catalog", str(cat_src), "-o", str(d / "bridge.json")]
    ) == 0
    assert main(
        [
            "classify",
            "--runtime", runtime,
            "--profile", profile,
            "--suite", str(d / "suite.json"),
            "--bridge", str(d / "bridge.json"),
            "-o", str(d / "classified.json"),
        ]
    ) == 0
    assert main(
        ["audit", "--runtime", runtime, "--classified", str(d / "classified.json"), "-o", str(d / "audit.json")]
    ) == 0
    return d


def test_pipeline_artifacts(run_dir):
    candidates = read_json(run_dir / "candidates.json")
    assert [c["api_name"] for c in candidates] == ["notAnApi", "openUrl", "private_openUrl"]
    bridge = read_json(run_dir / "bridge.json")
    assert bridge["bridge"] == "NativeGlobal.invokeHandler"
    classified = read_json(run_dir / "classified.json")
    assert [a["api"] for a in classified["checked"]] == ["openUrl"]
    assert [a["api"] for a in classified["unchecked"]] == ["private_openUrl"]
    assert [a["api"] for a in classified["non_api"]] == ["notAnApi"]
    audit = read_json(run_dir / "audit.json")
    assert audit["total_unchecked"] == 1
    assert audit["total"]["count"] == 1


def test_gen_tests_with_manual_cases(run_dir, fixtures_dir, tmp_path):
    ir = str(fixtures_dir / "wechat-mini.ir.json")
    out = tmp_path / "suite-manual.json"
    code = main(
        [
            "gen-tests",
            "--candidates", str(run_dir / "candidates.json"),
            "--ir", ir,
            "--manual", str(fixtures_dir / "manual-cases.json"),
            "-o", str(out),
        ]
    )
    assert code == 0
    suite = read_json(out)
    origins = {c["origin"] for c in suite}
    assert origins == {"auto", "manual"}


def test_usage_command(fixtures_dir, tmp_path):
    out = tmp_path / "usage.json"
    code = main(
        [
            "usage",
            "--corpus", str(fixtures_dir / "corpus"),
            "--hidden", str(fixtures_dir / "wechat-mini.hidden.json"),
            "--namespace", "wx",
            "-o", str(out),
        ]
    )
    assert code == 0
    usage = read_json(out)
    assert usage["total"] == {"category": "Total", "using": 2, "apps": 4, "percent": "50.00"}


def test_evolve_command(fixtures_dir, tmp_path):
    out = tmp_path / "evolution.json"
    csv = tmp_path / "evolution.csv"
    code = main(
        [
            "evolve",
            "--versions",
            str(fixtures_dir / "evolution" / "v1.json"),
            str(fixtures_dir / "evolution" / "v2.json"),
            "-o", str(out),
            "--csv", str(csv),
        ]
    )
    assert code == 0
    obj = read_json(out)
    assert obj["transitions"][0]["became_hidden"] == ["captureScreen"]
    assert csv.read_text() == "version,documented,hidden\n1.0,3,2\n2.0,3,2\n"


def test_report_command_text_and_stdout(run_dir, tmp_path, capsys):
    out = tmp_path / "report.txt"
    assert main(["report", "--run", str(run_dir), "--format", "text", "-o", str(out)]) == 0
    text = out.read_text()
    assert "effectiveness" in text and "audit" in text
    assert main(["report", "--run", str(run_dir)]) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert set(doc) == {"effectiveness", "categories", "audit"}


# ---------------------------------------------------------------------------
# Error paths and exit codes
# ---------------------------------------------------------------------------

def test_malformed_json_exits_10(tmp_path, fixtures_dir, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code = main(
        ["scan", "--ir", str(bad), "--catalog", str(fixtures_dir / "wechat-mini.catalog.json"), "-o", str(tmp_path / "o.json")]
    )
    assert code == 10
    assert capsys.readouterr().err.startswith("error:")


def test_unknown_key_exits_11(tmp_path, fixtures_dir):
    obj = read_json(fixtures_dir / "wechat-mini.ir.json")
    obj["surprise"] = True
    bad = tmp_path / "extra.json"
    write_json(bad, obj)
    code = main(
        ["scan", "--ir", str(bad), "--catalog", str(fixtures_dir / "wechat-mini.catalog.json"), "-o", str(tmp_path / "o.json")]
    )
    assert code == 11


def test_unanchorable_catalog_exits_20(tmp_path, fixtures_dir):
    cat = read_json(fixtures_dir / "wechat-mini.catalog.json")
    for entry in cat["documented"]:
        entry["name"] = entry["name"] + "Gone"
    bad = tmp_path / "cat.json"
    write_json(bad, cat)
    code = main(
        ["scan", "--ir", str(fixtures_dir / "wechat-mini.ir.json"), "--catalog", str(bad), "-o", str(tmp_path / "o.json")]
    )
    assert code == 20


def test_manual_case_for_unknown_api_exits_23(run_dir, fixtures_dir, tmp_path):
    manual = tmp_path / "manual.json"
    write_json(manual, [{"api": "neverSeen", "payload": [["x", "1"]]}])
    code = main(
        [
            "gen-tests",
            "--candidates", str(run_dir / "candidates.json"),
            "--ir", str(fixtures_dir / "wechat-mini.ir.json"),
            "--manual", str(manual),
            "-o", str(tmp_path / "o.json"),
        ]
    )
    assert code == 23


def test_find_bridge_zero_k_exits_11(fixtures_dir, tmp_path):
    code = main(
        [
            "find-bridge",
            "--runtime", str(fixtures_dir / "wechat-mini.runtime.json"),
            "--catalog", str(fixtures_dir / "wechat-mini.catalog.json"),
            "-k", "0",
            "-o", str(tmp_path / "o.json"),
        ]
    )
    assert code == 11


def test_no_documented_apis_exits_30(fixtures_dir, tmp_path):
    cat = read_json(fixtures_dir / "wechat-mini.catalog.json")
    cat["documented"] = [{"name": "absentEverywhere", "category": "General"}]
    bad = tmp_path / "cat.json"
    write_json(bad, cat)
    code = main(
        [
            "find-bridge",
            "--runtime", str(fixtures_dir / "wechat-mini.runtime.json"),
            "--catalog", str(bad),
            "-o", str(tmp_path / "o.json"),
        ]
    )
    assert code == 30


def test_classify_bridge_mismatch_exits_11(run_dir, fixtures_dir, tmp_path):
    bridge = read_json(run_dir / "bridge.json")
    bridge["bridge"] = "SomeOther.entry"
    wrong = tmp_path / "bridge.json"
    write_json(wrong, bridge)
    code = main(
        [
            "classify",
            "--runtime", str(fixtures_dir / "wechat-mini.runtime.json"),
            "--profile", str(fixtures_dir / "wechat.profile.json"),
            "--suite", str(run_dir / "suite.json"),
            "--bridge", str(wrong),
            "-o", str(tmp_path / "o.json"),
        ]
    )
    assert code == 11


def test_report_incomplete_run_exits_60(run_dir, tmp_path, capsys):
    partial = tmp_path / "partial"
    shutil.copytree(run_dir, partial)
    (partial / "suite.json").unlink()
    code = main(["report", "--run", str(partial)])
    assert code == 60
    assert "gen-tests" in capsys.readouterr().err


def test_evolve_single_version_exits_51(fixtures_dir, tmp_path):
    code = main(
        ["evolve", "--versions", str(fixtures_dir / "evolution" / "v1.json"), "-o", str(tmp_path / "o.json")]
    )
    assert code == 51


def test_usage_empty_corpus_exits_50(fixtures_dir, tmp_path):
    empty = tmp_path / "corpus"
    empty.mkdir()
    argv = [
        "usage",
        "--corpus", str(empty),
        "--hidden", str(fixtures_dir / "wechat-mini.hidden.json"),
        "--namespace", "wx",
        "-o", str(tmp_path / "o.json"),
    ]
    assert main(argv) == 50
    assert main(argv + ["--allow-empty"]) == 0
    usage = read_json(tmp_path / "o.json")
    assert usage["total"]["apps"] == 0
    assert usage["total"]["percent"] == "0.00"


def test_no_arguments_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_seed_env_var_accepted(fixtures_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("APISCOPE_SEED", "1234")
    code = main(
        [
            "scan",
            "--ir", str(fixtures_dir / "wechat-mini.ir.json"),
            "--catalog", str(fixtures_dir / "wechat-mini.catalog.json"),
            "-o", str(tmp_path / "o.json"),
        ]
    )
    assert code == 0


# ---------------------------------------------------------------------------
# Determinism
# ---------------------------------------------------------------------------

def test_pipeline_outputs_are_byte_identical_across_runs(run_dir, fixtures_dir, tmp_path):
    ir = str(fixtures_dir / "wechat-mini.ir.json")
    cat = str(fixtures_dir / "wechat-mini.catalog.json")
    runtime = str(fixtures_dir / "wechat-mini.runtime.json")
    profile = str(fixtures_dir / "wechat.profile.json")
    for name, argv in {
        "candidates.json": ["scan", "--ir", ir, "--catalog", cat],
        "suite.json": ["gen-tests", "--candidates", str(run_dir / "candidates.json"), "--ir", ir],
        "bridge.json": ["find-bridge", "--runtime", runtime, "--catalog", cat],
        "classified.json": [
            "classify",
            "--runtime", runtime,
            "--profile", profile,
            "--suite", str(run_dir / "suite.json"),
            "--bridge", str(run_dir / "bridge.json"),
        ],
        "audit.json": ["audit", "--runtime", runtime, "--classified", str(run_dir / "classified.json")],
    }.items():
        again = tmp_path / name
        assert main(argv + ["-o", str(again)]) == 0
        assert again.read_bytes() == (run_dir / name).read_bytes(), name
