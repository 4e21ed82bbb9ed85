"""End-to-end and unit tests for the command-line pipeline driver."""

import hashlib
import json
import math
import shutil
import xml.etree.ElementTree as ET

import pytest

import hcat
from hcat.cli import (
    CONFIG_ENV_VAR,
    RunConfig,
    build_parser,
    load_config_file,
    main,
    parse_pairs,
    resolve_config,
    validate_config,
)
from hcat.errors import ConfigError


def digest(path):
    with open(path, "rb") as fh:
        return "sha256:" + hashlib.sha256(fh.read()).hexdigest()


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Run every command once, in dependency order, against one bundle."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    run = root / "run"
    steps = [
        ["synth", "--out", str(data), "--seed", "7"],
        ["ingest", "--records", str(data / "records.jsonl"),
         "--labels", str(data / "labels.csv"), "--out", str(run)],
        ["classify", "--labels", str(data / "labels.csv"), "--folds", "2",
         "--out", str(run)],
        ["users", "--edges", str(data / "edges.tsv"), "--out", str(run)],
        ["timeline", "--event-day", "2020-06-01", "--out", str(run)],
        ["homophily", "--edges", str(data / "edges.tsv"),
         "--shuffle-replicates", "2", "--out", str(run)],
        ["contagion", "--edges", str(data / "edges.tsv"),
         "--cascade-replicates", "2", "--min-exposed", "1", "--out", str(run)],
        ["report", "--out", str(run)],
    ]
    for argv in steps:
        rc = main(argv)
        assert rc == 0, f"command {argv[0]} exited {rc}"
    return {"data": data, "run": run}


def test_pipeline_stages_expected_artifacts(pipeline):
    run = pipeline["run"]
    expected = [
        # ingest
        "records.jsonl", "ingest_stats.csv", "ingest_manifest.json",
        # classify
        "model.txt", "labels.csv", "metrics.csv", "confusion.csv",
        "classify_manifest.json",
        # users
        "users.csv", "ego_stats.csv", "users_manifest.json",
        # timeline
        "daily.csv", "spikes.csv", "tail_hate.csv", "tail_counterspeech.csv",
        "behavior.csv", "timeline_manifest.json",
        # homophily
        "homophily_observed.csv", "homophily_baseline_mean.csv",
        "homophily_baseline_std.csv", "homophily_ratio.csv",
        "homophily_manifest.json",
        # contagion
        "cascade.csv", "risk.csv", "contagion_manifest.json",
        # report
        "daily.svg", "homophily.svg", "report_manifest.json",
    ]
    for name in expected:
        assert (run / name).is_file(), f"missing artifact {name}"


def test_manifests_verify_and_carry_no_timestamps(pipeline):
    run = pipeline["run"]
    manifests = sorted(run.glob("*_manifest.json"))
    assert len(manifests) == 7
    for path in manifests:
        raw = path.read_text(encoding="utf-8")
        doc = json.loads(raw)
        assert set(doc) == {
            "command", "version", "backend", "seeds", "parameters",
            "inputs", "outputs",
        }
        assert doc["version"] == hcat.__version__
        assert doc["backend"] in ("numba", "numpy")
        assert doc["seeds"] == {"master": doc["seeds"]["master"]}
        # digests must match the files on disk
        for section in ("inputs", "outputs"):
            for fpath, want in doc[section].items():
                assert digest(fpath) == want, f"{path.name}: stale digest for {fpath}"
        # serialized form is canonical, so identical runs are byte-identical
        assert raw == json.dumps(doc, indent=2, sort_keys=True) + "\n"
        assert "time" not in raw.lower() or "timestamp" not in raw.lower()


def test_synth_prints_artifact_paths(tmp_path, capsys):
    out = tmp_path / "bundle"
    assert main(["synth", "--out", str(out), "--seed", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == [
        str(out / "records.jsonl"),
        str(out / "labels.csv"),
        str(out / "edges.tsv"),
        str(out / "synth_manifest.json"),
    ]
    for line in lines:
        assert (tmp_path / line).is_file()


def test_synth_rerun_is_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["synth", "--out", str(a), "--seed", "11"]) == 0
    assert main(["synth", "--out", str(b), "--seed", "11"]) == 0
    for name in ("records.jsonl", "labels.csv", "edges.tsv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_spikes_table_rows(pipeline):
    lines = (pipeline["run"] / "spikes.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == ("label,event_day,window_days,before,after,"
                       "percent_change,defined")
    body = [line.split(",") for line in lines[1:]]
    assert [row[0] for row in body] == ["hate", "counterspeech", "neutral"]
    for row in body:
        assert row[1] == "2020-06-01"
        assert row[2] == "7"
        assert row[6] in ("0", "1")


def test_report_svgs_are_well_formed(pipeline):
    run = pipeline["run"]
    for name in ("daily.svg", "homophily.svg", "tail_hate.svg",
                 "tail_counterspeech.svg"):
        text = (run / name).read_text(encoding="utf-8")
        root = ET.fromstring(text)
        assert root.tag.endswith("svg")


def test_users_without_edges_skips_ego_table(pipeline, tmp_path):
    run = tmp_path / "no_edges"
    run.mkdir()
    for name in ("records.jsonl", "labels.csv"):
        shutil.copy(pipeline["run"] / name, run / name)
    assert main(["users", "--out", str(run)]) == 0
    assert (run / "users.csv").is_file()
    assert not (run / "ego_stats.csv").exists()
    doc = json.loads((run / "users_manifest.json").read_text(encoding="utf-8"))
    assert "edge_lines" not in doc["parameters"]
    assert doc["parameters"]["n_edges"] == 0


def test_homophily_rerun_via_env_config_matches_flags(pipeline, tmp_path, monkeypatch):
    data = pipeline["data"]
    run = pipeline["run"]
    before = {
        name: (run / name).read_bytes()
        for name in ("homophily_observed.csv", "homophily_baseline_mean.csv",
                     "homophily_baseline_std.csv", "homophily_ratio.csv",
                     "homophily_manifest.json")
    }
    ini = tmp_path / "hcat.ini"
    ini.write_text(
        "[paths]\n"
        f"edges = {data / 'edges.tsv'}\n"
        "[analysis]\n"
        "shuffle_replicates = 2\n"
        "[seeds]\n"
        "master = 0\n"
        "[output]\n"
        f"dir = {run}\n",
        encoding="utf-8",
    )
    monkeypatch.setenv(CONFIG_ENV_VAR, str(ini))
    assert main(["homophily"]) == 0
    for name, want in before.items():
        assert (run / name).read_bytes() == want, f"{name} changed across reruns"


def test_version_flag_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("hcat ")


def error_record(capsys):
    err = capsys.readouterr().err.strip()
    return json.loads(err.splitlines()[-1])


def test_missing_command_is_a_validation_error(capsys):
    assert main([]) == 1
    rec = error_record(capsys)
    assert rec["status"] == "error"
    assert rec["error"] == "validation"
    assert rec["exit_code"] == 1
    assert rec["command"] is None


def test_unknown_flag_is_a_validation_error(capsys):
    assert main(["synth", "--bogus"]) == 1
    assert error_record(capsys)["error"] == "validation"


def test_missing_records_file(tmp_path, capsys):
    rc = main(["ingest", "--records", str(tmp_path / "nope.jsonl"),
               "--out", str(tmp_path / "out")])
    assert rc == 1
    rec = error_record(capsys)
    assert rec["command"] == "ingest"
    assert "records file not found" in rec["message"]


def test_report_with_nothing_staged(tmp_path, capsys):
    run = tmp_path / "empty"
    run.mkdir()
    assert main(["report", "--out", str(run)]) == 1
    assert "nothing to report" in error_record(capsys)["message"]


def test_classify_requires_staged_records(tmp_path, capsys):
    assert main(["classify", "--labels", "unused.csv",
                 "--out", str(tmp_path)]) == 1
    msg = error_record(capsys)["message"]
    assert "missing artifact" in msg
    assert "run 'ingest' first" in msg


def test_ingest_refuses_to_overwrite_its_input(pipeline, tmp_path, capsys):
    run = tmp_path / "clash"
    run.mkdir()
    src = run / "records.jsonl"
    shutil.copy(pipeline["data"] / "records.jsonl", src)
    assert main(["ingest", "--records", str(src), "--out", str(run)]) == 1
    assert "pick another --out" in error_record(capsys)["message"]


def test_classify_without_matching_labels_is_a_data_error(pipeline, tmp_path, capsys):
    run = tmp_path / "unlabeled"
    # stage records without attaching any labels during ingest
    rc = main(["ingest", "--records", str(pipeline["data"] / "records.jsonl"),
               "--out", str(run)])
    assert rc == 0
    labels = tmp_path / "labels.csv"
    labels.write_text("tweet_id,label\nno-such-tweet,hate\n", encoding="utf-8")
    capsys.readouterr()
    rc = main(["classify", "--labels", str(labels), "--out", str(run)])
    assert rc == 2
    rec = error_record(capsys)
    assert rec["error"] == "data"
    assert "no labeled records to train on" in rec["message"]


# ------------------------------------------------------------------ units


def test_parse_pairs_accepts_aliases_and_whitespace():
    assert parse_pairs("hate:hate,counterspeech:hate") == [
        ("hate", "hate"), ("counterspeech", "hate")]
    assert parse_pairs("counter:hate") == [("counterspeech", "hate")]
    assert parse_pairs(" hate : hate , ") == [("hate", "hate")]


def test_parse_pairs_rejects_bad_strings():
    with pytest.raises(ConfigError, match="expected source:target"):
        parse_pairs("hate")
    with pytest.raises(ConfigError, match="must be hate or counterspeech"):
        parse_pairs("hate:neutral")
    with pytest.raises(ConfigError, match="no exposure pairs"):
        parse_pairs(" , ")


def test_load_config_file_coerces_types(tmp_path):
    ini = tmp_path / "good.ini"
    ini.write_text(
        "[paths]\nrecords = /x/records.jsonl\n"
        "[Analysis]\nfolds = 7\nswap_factor = 2.5\ninclude_dual = yes\n"
        "[Seeds]\nMaster = 11\n"
        "[output]\ndir = artifacts\n",
        encoding="utf-8",
    )
    out = load_config_file(str(ini))
    assert out == {
        "records": "/x/records.jsonl",
        "folds": 7,
        "swap_factor": 2.5,
        "include_dual": True,
        "seed": 11,
        "out_dir": "artifacts",
    }


def test_load_config_file_error_cases(tmp_path):
    unknown = tmp_path / "unknown.ini"
    unknown.write_text("[paths]\nbogus = x\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown config key"):
        load_config_file(str(unknown))

    bad_value = tmp_path / "bad.ini"
    bad_value.write_text("[analysis]\nfolds = seven\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="bad value"):
        load_config_file(str(bad_value))

    malformed = tmp_path / "malformed.ini"
    malformed.write_text("folds = 7\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="malformed config file"):
        load_config_file(str(malformed))

    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config_file(str(tmp_path / "missing.ini"))


def test_resolve_config_precedence(tmp_path, monkeypatch):
    ini = tmp_path / "env.ini"
    ini.write_text("[seeds]\nmaster = 5\n[analysis]\nfolds = 7\n",
                   encoding="utf-8")
    parser = build_parser()

    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    cfg = resolve_config(parser.parse_args(["synth"]))
    assert (cfg.seed, cfg.folds) == (0, 5)  # library defaults

    monkeypatch.setenv(CONFIG_ENV_VAR, str(ini))
    cfg = resolve_config(parser.parse_args(["synth"]))
    assert (cfg.seed, cfg.folds) == (5, 7)  # env-var config applies

    cfg = resolve_config(parser.parse_args(["synth", "--seed", "9"]))
    assert (cfg.seed, cfg.folds) == (9, 7)  # flag beats config file

    other = tmp_path / "flag.ini"
    other.write_text("[seeds]\nmaster = 6\n", encoding="utf-8")
    cfg = resolve_config(parser.parse_args(["synth", "--config", str(other)]))
    assert (cfg.seed, cfg.folds) == (6, 5)  # --config beats the env var


def test_include_dual_flag_three_states():
    parser = build_parser()
    assert parser.parse_args(["contagion"]).include_dual is None
    assert parser.parse_args(["contagion", "--include-dual"]).include_dual is True
    assert parser.parse_args(["contagion", "--no-include-dual"]).include_dual is False


def test_validate_config_rejects_bad_fields():
    assert validate_config(RunConfig()) is None  # defaults are valid
    bad = [
        {"window_start": "June 1"},
        {"window_start": "2020-07-01", "window_end": "2020-07-01"},
        {"features": "tfidf"},
        {"direction": "both"},
        {"mode": "global"},
        {"folds": 1},
        {"shuffle_replicates": 1},
        {"cascade_replicates": 1},
        {"swap_factor": -1.0},
        {"swap_factor": math.inf},
        {"n_max": -1},
        {"min_exposed": 0},
        {"window_days": 0},
        {"workers": 0},
        {"event_day": "tomorrow"},
        {"pairs": "hate"},
        {"out_dir": ""},
    ]
    for overrides in bad:
        cfg = RunConfig(**overrides)
        with pytest.raises(ConfigError):
            validate_config(cfg)
