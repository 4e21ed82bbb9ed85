"""Command-line pipeline driver.

Commands stage their artifacts in the configured output directory, so
a full run is::

    hcat synth --out data
    hcat ingest --records data/records.jsonl --labels data/labels.csv --out run
    hcat classify --labels data/labels.csv --out run
    hcat users --edges data/edges.tsv --out run
    hcat timeline --event-day 2020-06-01 --out run
    hcat homophily --edges data/edges.tsv --out run
    hcat contagion --edges data/edges.tsv --out run
    hcat report --out run

Settings come from defaults, then an INI-style config file (--config,
or the HCAT_CONFIG environment variable), then command-line flags.
Every command writes a ``<command>_manifest.json`` listing its input
and output files with content digests; manifests carry no timestamps,
so identical runs are byte-identical.

Exit codes: 0 success, 1 validation error, 2 data error, 3 internal
error. Failures print one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from types import SimpleNamespace

import numpy as np

from hcat import __version__, svg
from hcat.accel import active_backend
from hcat.cascade import build_cascade, contagion_report, write_cascade_csv, write_risk_csv
from hcat.errors import ConfigError, DataError, HcatError, SchemaError
from hcat.evaluation import cross_validate, write_confusion_csv, write_metrics_csv
from hcat.features import FeatureExtractor
from hcat.graph import (
    CATEGORY_NAMES,
    UserCategory,
    build_graph,
    categorize_users,
    ego_stats,
    load_edges,
    load_node_attributes,
    validate_graph,
    write_ego_stats_csv,
    write_node_attributes,
)
from hcat.homophily import (
    homophily_report,
    read_connectivity_matrix_csv,
    write_connectivity_csvs,
)
from hcat.ingest import filter_corpus, load_label_file, write_records, write_stats_csv
from hcat.keywords import BUILTIN_TOKEN, load_keywords
from hcat.model import Hyper, predict_batch, save_model, train
from hcat.records import (
    DEFAULT_WINDOW_END,
    DEFAULT_WINDOW_START,
    TweetLabel,
    day_to_ts,
    load_records,
    window_bounds,
)
from hcat.shuffle import ShuffleConfig
from hcat.stats import (
    LABEL_COLUMNS,
    behavior_profiles,
    compare_profiles,
    daily_counts,
    tail_distribution,
    window_change,
    write_comparisons_csv,
    write_daily_csv,
    write_tail_csv,
)
from hcat.synthdata import synth_corpus

CONFIG_ENV_VAR = "HCAT_CONFIG"

_FEATURE_SETS = ("hashtag", "linguistic", "combined")
_DIRECTIONS = ("out", "in", "union")
_MODES = ("edge", "ego")


@dataclass
class RunConfig:
    """Resolved settings for one command invocation."""

    records: str = ""
    labels: str = ""
    edges: str = ""
    attributes: str = ""
    keywords: str = BUILTIN_TOKEN
    window_start: str = DEFAULT_WINDOW_START
    window_end: str = DEFAULT_WINDOW_END
    features: str = "combined"
    folds: int = 5
    shuffle_replicates: int = 100
    cascade_replicates: int = 100
    swap_factor: float = 10.0
    direction: str = "out"
    mode: str = "edge"
    pairs: str = "hate:hate,counterspeech:hate"
    n_max: int = 0
    min_exposed: int = 50
    include_dual: bool = False
    event_day: str = ""
    window_days: int = 7
    workers: int = 1
    seed: int = 0
    out_dir: str = "out"


# (section, key) in the config file -> RunConfig field
_CONFIG_MAP = {
    ("paths", "records"): "records",
    ("paths", "labels"): "labels",
    ("paths", "edges"): "edges",
    ("paths", "attributes"): "attributes",
    ("paths", "keywords"): "keywords",
    ("window", "start"): "window_start",
    ("window", "end"): "window_end",
    ("analysis", "features"): "features",
    ("analysis", "folds"): "folds",
    ("analysis", "shuffle_replicates"): "shuffle_replicates",
    ("analysis", "cascade_replicates"): "cascade_replicates",
    ("analysis", "swap_factor"): "swap_factor",
    ("analysis", "direction"): "direction",
    ("analysis", "mode"): "mode",
    ("analysis", "pairs"): "pairs",
    ("analysis", "n_max"): "n_max",
    ("analysis", "min_exposed"): "min_exposed",
    ("analysis", "include_dual"): "include_dual",
    ("analysis", "event_day"): "event_day",
    ("analysis", "window_days"): "window_days",
    ("analysis", "workers"): "workers",
    ("seeds", "master"): "seed",
    ("output", "dir"): "out_dir",
}

_BOOL_WORDS = {"1": True, "true": True, "yes": True, "on": True,
               "0": False, "false": False, "no": False, "off": False}


def _coerce(field_name: str, raw: str):
    kind = RunConfig.__dataclass_fields__[field_name].type
    text = raw.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "bool":
            return _BOOL_WORDS[text.lower()]
    except (ValueError, KeyError):
        raise ConfigError(f"bad value {raw!r} for config key {field_name}") from None
    return text


def load_config_file(path: str) -> dict:
    """Parse the INI config into {field: value}, rejecting unknown keys."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path!r}: {exc}") from exc
    out: dict = {}
    for section in parser.sections():
        for key, raw in parser.items(section):
            field_name = _CONFIG_MAP.get((section.lower(), key.lower()))
            if field_name is None:
                raise ConfigError(f"unknown config key [{section}] {key}")
            out[field_name] = _coerce(field_name, raw)
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """defaults -> config file -> command-line flags."""
    cfg = RunConfig()
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR, "")
    if config_path:
        for field_name, value in load_config_file(config_path).items():
            setattr(cfg, field_name, value)
    for f in fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    return cfg


def parse_pairs(pair_text: str) -> list:
    """"s:s',s:s'" -> [(source_kind, target_kind), ...] as wire names."""
    pairs = []
    for chunk in pair_text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        halves = chunk.split(":")
        if len(halves) != 2:
            raise ConfigError(f"bad pair {chunk!r}; expected source:target")
        pair = []
        for half in halves:
            name = half.strip().lower()
            if name == "counter":
                name = "counterspeech"
            if name not in ("hate", "counterspeech"):
                raise ConfigError(f"pair side must be hate or counterspeech, got {half!r}")
            pair.append(name)
        pairs.append(tuple(pair))
    if not pairs:
        raise ConfigError("no exposure pairs configured")
    return pairs


def _require_file(path: str, what: str) -> str:
    if not path:
        raise ConfigError(f"no {what} configured")
    if not os.path.isfile(path):
        raise ConfigError(f"{what} not found: {path}")
    return path


def _staged(cfg: RunConfig, name: str) -> str:
    return os.path.join(cfg.out_dir, name)


def _require_staged(cfg: RunConfig, name: str, producer: str) -> str:
    path = _staged(cfg, name)
    if not os.path.isfile(path):
        raise ConfigError(f"missing artifact {path}; run '{producer}' first")
    return path


def validate_config(cfg: RunConfig) -> None:
    """Cross-field checks shared by every command."""
    for day, what in ((cfg.window_start, "window start"), (cfg.window_end, "window end")):
        try:
            day_to_ts(day)
        except ValueError:
            raise ConfigError(f"{what} {day!r} is not a YYYY-MM-DD date") from None
    if day_to_ts(cfg.window_start) >= day_to_ts(cfg.window_end):
        raise ConfigError(
            f"window start {cfg.window_start} must precede end {cfg.window_end}"
        )
    if cfg.features not in _FEATURE_SETS:
        raise ConfigError(f"features must be one of {_FEATURE_SETS}, got {cfg.features!r}")
    if cfg.direction not in _DIRECTIONS:
        raise ConfigError(f"direction must be one of {_DIRECTIONS}, got {cfg.direction!r}")
    if cfg.mode not in _MODES:
        raise ConfigError(f"mode must be one of {_MODES}, got {cfg.mode!r}")
    if cfg.folds < 2:
        raise ConfigError(f"folds must be >= 2, got {cfg.folds}")
    if cfg.shuffle_replicates < 2:
        raise ConfigError(f"shuffle_replicates must be >= 2, got {cfg.shuffle_replicates}")
    if cfg.cascade_replicates < 2:
        raise ConfigError(f"cascade_replicates must be >= 2, got {cfg.cascade_replicates}")
    if not (math.isfinite(cfg.swap_factor) and cfg.swap_factor >= 0):
        raise ConfigError(f"swap_factor must be finite and >= 0, got {cfg.swap_factor}")
    if cfg.n_max < 0:
        raise ConfigError(f"n_max must be >= 0 (0 = automatic), got {cfg.n_max}")
    if cfg.min_exposed < 1:
        raise ConfigError(f"min_exposed must be >= 1, got {cfg.min_exposed}")
    if cfg.window_days < 1:
        raise ConfigError(f"window_days must be >= 1, got {cfg.window_days}")
    if cfg.workers < 1:
        raise ConfigError(f"workers must be >= 1, got {cfg.workers}")
    if cfg.event_day:
        try:
            day_to_ts(cfg.event_day)
        except ValueError:
            raise ConfigError(f"event day {cfg.event_day!r} is not a YYYY-MM-DD date") from None
    parse_pairs(cfg.pairs)
    if not cfg.out_dir:
        raise ConfigError("no output directory configured")


def _digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return "sha256:" + h.hexdigest()


def _write_manifest(cfg, command: str, inputs, outputs, parameters: dict) -> str:
    doc = {
        "command": command,
        "version": __version__,
        "backend": active_backend(),
        "seeds": {"master": cfg.seed},
        "parameters": parameters,
        "inputs": {p: _digest(p) for p in inputs},
        "outputs": {p: _digest(p) for p in outputs},
    }
    path = _staged(cfg, f"{command}_manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True))
        fh.write("\n")
    return path


def _attach_labels(records, labels_map):
    """Per-record label: the label file wins over any inline label."""
    for rec in records:
        mapped = labels_map.get(rec.tweet_id)
        if mapped is not None:
            rec.label = mapped
    return records


# ---------------------------------------------------------------- commands


def cmd_synth(cfg: RunConfig) -> list:
    os.makedirs(cfg.out_dir, exist_ok=True)
    result = synth_corpus(
        cfg.out_dir, seed=cfg.seed, event_day=cfg.event_day or "2020-06-01"
    )
    outputs = [result["records"], result["labels"], result["edges"]]
    manifest = _write_manifest(
        cfg,
        "synth",
        [],
        outputs,
        {
            "event_day": result["event_day"],
            "n_users": result["n_users"],
            "tallies": result["tallies"],
        },
    )
    return outputs + [manifest]


def cmd_ingest(cfg: RunConfig) -> list:
    _require_file(cfg.records, "records file")
    if cfg.keywords != BUILTIN_TOKEN:
        _require_file(cfg.keywords, "keyword file")
    os.makedirs(cfg.out_dir, exist_ok=True)
    out_records = _staged(cfg, "records.jsonl")
    if os.path.abspath(out_records) == os.path.abspath(cfg.records):
        raise ConfigError("output records path equals the input; pick another --out")

    labels_map = None
    inputs = [cfg.records]
    if cfg.labels:
        labels_map = load_label_file(_require_file(cfg.labels, "label file"))
        inputs.append(cfg.labels)
    if cfg.keywords != BUILTIN_TOKEN:
        inputs.append(cfg.keywords)

    kw = load_keywords(cfg.keywords)
    window = window_bounds(cfg.window_start, cfg.window_end)
    retained, stats = filter_corpus(cfg.records, kw, labels_map, window)

    with open(out_records, "w", encoding="utf-8") as fh:
        write_records(retained, fh)
    out_stats = _staged(cfg, "ingest_stats.csv")
    with open(out_stats, "w", encoding="utf-8", newline="") as fh:
        write_stats_csv(stats, fh)

    manifest = _write_manifest(
        cfg,
        "ingest",
        inputs,
        [out_records, out_stats],
        {
            "window": [cfg.window_start, cfg.window_end],
            "keywords": cfg.keywords,
            "total": stats.total,
            "retained": stats.retained,
            "malformed": stats.malformed,
        },
    )
    return [out_records, out_stats, manifest]


def cmd_classify(cfg: RunConfig) -> list:
    staged_records = _require_staged(cfg, "records.jsonl", "ingest")
    _require_file(cfg.labels, "training label file")
    if cfg.keywords != BUILTIN_TOKEN:
        _require_file(cfg.keywords, "keyword file")

    records = load_records(staged_records)
    if not records:
        raise DataError("no records to classify")
    labels_map = load_label_file(cfg.labels)
    kw = load_keywords(cfg.keywords) if cfg.features in ("hashtag", "combined") else None
    extractor = FeatureExtractor(cfg.features, kw)

    feats = [extractor(rec.text) for rec in records]
    known = [labels_map.get(rec.tweet_id, rec.label) for rec in records]
    examples = [(fv, lbl) for fv, lbl in zip(feats, known) if lbl is not None]
    if not examples:
        raise DataError("no labeled records to train on")

    report = cross_validate(examples, n_folds=cfg.folds, hyper=Hyper(), seed=cfg.seed)
    model = train(examples, Hyper(), seed=cfg.seed)

    out_model = _staged(cfg, "model.txt")
    save_model(model, out_model)
    out_metrics = _staged(cfg, "metrics.csv")
    write_metrics_csv(report, out_metrics)
    out_confusion = _staged(cfg, "confusion.csv")
    write_confusion_csv(report, out_confusion)

    X = np.stack([fv.values for fv in feats])
    predicted = predict_batch(model, X)
    out_labels = _staged(cfg, "labels.csv")
    rows = sorted(
        (rec.tweet_id,
         (lbl if lbl is not None else TweetLabel(int(pred))).wire_name)
        for rec, lbl, pred in zip(records, known, predicted)
    )
    with open(out_labels, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["tweet_id", "label"])
        w.writerows(rows)

    outputs = [out_model, out_labels, out_metrics, out_confusion]
    manifest = _write_manifest(
        cfg,
        "classify",
        [staged_records, cfg.labels],
        outputs,
        {
            "features": cfg.features,
            "folds": cfg.folds,
            "n_examples": len(examples),
            "n_records": len(records),
            "macro_f1": round(report.macro_f1, 10),
        },
    )
    return outputs + [manifest]


def cmd_users(cfg: RunConfig) -> list:
    staged_records = _require_staged(cfg, "records.jsonl", "ingest")
    staged_labels = _require_staged(cfg, "labels.csv", "classify")
    records = _attach_labels(load_records(staged_records), load_label_file(staged_labels))
    if not records:
        raise DataError("no records to categorize")

    labels_by_user: dict = {}
    corpus_users = set()
    for rec in records:
        corpus_users.add(rec.user_id)
        if rec.label is not None:
            labels_by_user.setdefault(rec.user_id, []).append(rec.label)
    categories = categorize_users(labels_by_user)
    # every retained record matched a keyword, so its author is flagged
    attrs = {
        uid: (1, categories.get(uid, UserCategory.UNCATEGORIZED))
        for uid in corpus_users
    }

    inputs = [staged_records, staged_labels]
    edge_stats = None
    if cfg.edges:
        _require_file(cfg.edges, "edges file")
        inputs.append(cfg.edges)
        pairs, edge_stats = load_edges(cfg.edges)
        graph = build_graph(pairs, attrs)
    else:
        graph = build_graph([], attrs)
    validate_graph(graph)

    out_users = _staged(cfg, "users.csv")
    write_node_attributes(out_users, graph)
    outputs = [out_users]
    if cfg.edges:
        out_ego = _staged(cfg, "ego_stats.csv")
        write_ego_stats_csv(ego_stats(graph), out_ego)
        outputs.append(out_ego)

    params = {
        "n_users": graph.n_nodes,
        "n_edges": graph.n_edges,
        "categories": {
            name: int((graph.category == int(cat)).sum())
            for name, cat in zip(CATEGORY_NAMES,
                                 (UserCategory.HATE, UserCategory.COUNTERSPEECH,
                                  UserCategory.DUAL, UserCategory.NEUTRAL))
        },
    }
    if edge_stats is not None:
        params["edge_lines"] = edge_stats.total_lines
        params["edges_kept"] = edge_stats.kept
    manifest = _write_manifest(cfg, "users", inputs, outputs, params)
    return outputs + [manifest]


def cmd_timeline(cfg: RunConfig) -> list:
    staged_records = _require_staged(cfg, "records.jsonl", "ingest")
    staged_labels = _require_staged(cfg, "labels.csv", "classify")
    records = _attach_labels(load_records(staged_records), load_label_file(staged_labels))
    if not records:
        raise DataError("no records for the timeline")
    window = window_bounds(cfg.window_start, cfg.window_end)

    series = daily_counts(records, window)
    out_daily = _staged(cfg, "daily.csv")
    write_daily_csv(series, out_daily)
    outputs = [out_daily]

    if cfg.event_day:
        out_spikes = _staged(cfg, "spikes.csv")
        with open(out_spikes, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["label", "event_day", "window_days", "before", "after",
                        "percent_change", "defined"])
            for label in ("hate", "counterspeech", "neutral"):
                ch = window_change(series, label, cfg.event_day, cfg.window_days)
                w.writerow([
                    ch.label, ch.event_day, ch.window_days, ch.before_sum, ch.after_sum,
                    "nan" if math.isnan(ch.percent) else f"{ch.percent:.10g}",
                    int(ch.defined),
                ])
        outputs.append(out_spikes)

    for label, name in (("hate", "tail_hate.csv"), ("counterspeech", "tail_counterspeech.csv")):
        out_tail = _staged(cfg, name)
        write_tail_csv(tail_distribution(records, label), out_tail)
        outputs.append(out_tail)

    # pre-activation behavior: eventual hate users vs the rest
    first_hate: dict = {}
    for rec in sorted(records, key=lambda r: (r.timestamp, r.tweet_id)):
        if rec.label == TweetLabel.HATE and rec.user_id not in first_hate:
            first_hate[rec.user_id] = rec.timestamp
    all_users = {rec.user_id for rec in records}
    others = all_users - set(first_hate)
    comparisons = []
    if first_hate and others:
        prof_a = behavior_profiles(records, first_hate, first_hate, phase="pre")
        prof_b = behavior_profiles(records, others, {}, phase="pre")
        if prof_a.profiles and prof_b.profiles:
            comparisons = compare_profiles(prof_a, prof_b)
    out_behavior = _staged(cfg, "behavior.csv")
    write_comparisons_csv(comparisons, out_behavior)
    outputs.append(out_behavior)

    manifest = _write_manifest(
        cfg,
        "timeline",
        [staged_records, staged_labels],
        outputs,
        {
            "window": [cfg.window_start, cfg.window_end],
            "event_day": cfg.event_day,
            "window_days": cfg.window_days,
            "n_records": len(records),
        },
    )
    return outputs + [manifest]


def _load_analysis_graph(cfg: RunConfig, inputs: list):
    _require_file(cfg.edges, "edges file")
    attr_path = cfg.attributes or _require_staged(cfg, "users.csv", "users")
    _require_file(attr_path, "node attribute file")
    inputs.extend([cfg.edges, attr_path])
    pairs, edge_stats = load_edges(cfg.edges)
    graph = build_graph(pairs, load_node_attributes(attr_path))
    validate_graph(graph)
    return graph, edge_stats


def cmd_homophily(cfg: RunConfig) -> list:
    inputs: list = []
    graph, edge_stats = _load_analysis_graph(cfg, inputs)
    report = homophily_report(
        graph,
        replicates=cfg.shuffle_replicates,
        seed=cfg.seed,
        shuffle_config=ShuffleConfig(swap_attempts_factor=cfg.swap_factor),
        mode=cfg.mode,
    )
    outputs = write_connectivity_csvs(report, cfg.out_dir, prefix="homophily")
    manifest = _write_manifest(
        cfg,
        "homophily",
        inputs,
        outputs,
        {
            "replicates": cfg.shuffle_replicates,
            "swap_factor": cfg.swap_factor,
            "mode": cfg.mode,
            "degenerate": report.degenerate,
            "n_nodes": graph.n_nodes,
            "n_edges": graph.n_edges,
        },
    )
    return outputs + [manifest]


def cmd_contagion(cfg: RunConfig) -> list:
    inputs: list = []
    graph, _ = _load_analysis_graph(cfg, inputs)
    staged_records = _require_staged(cfg, "records.jsonl", "ingest")
    staged_labels = _require_staged(cfg, "labels.csv", "classify")
    inputs.extend([staged_records, staged_labels])
    records = _attach_labels(load_records(staged_records), load_label_file(staged_labels))
    window = window_bounds(cfg.window_start, cfg.window_end)
    cascade, _, build_stats = build_cascade(records, graph, window)

    pairs = parse_pairs(cfg.pairs)
    curves = contagion_report(
        graph,
        cascade,
        pairs,
        n_max=cfg.n_max or None,
        replicates=cfg.cascade_replicates,
        seed=cfg.seed,
        direction=cfg.direction,
        include_dual=cfg.include_dual,
        min_exposed=cfg.min_exposed,
    )

    out_cascade = _staged(cfg, "cascade.csv")
    write_cascade_csv(cascade, graph, out_cascade)
    out_risk = _staged(cfg, "risk.csv")
    write_risk_csv(curves, out_risk)
    outputs = [out_cascade, out_risk]
    manifest = _write_manifest(
        cfg,
        "contagion",
        inputs,
        outputs,
        {
            "pairs": ["{}:{}".format(*p) for p in pairs],
            "replicates": cfg.cascade_replicates,
            "direction": cfg.direction,
            "include_dual": cfg.include_dual,
            "n_max": cfg.n_max,
            "min_exposed": cfg.min_exposed,
            "n_events": len(cascade),
            "unresolved_users": build_stats.unresolved_users,
            "empty_curves": sum(int(c.empty) for c in curves),
        },
    )
    return outputs + [manifest]


def _read_daily_csv(path: str):
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["day"] + list(LABEL_COLUMNS):
            raise DataError(f"{path}: unexpected header {header!r}")
        days, rows = [], []
        for row in reader:
            if not row:
                continue
            days.append(row[0])
            rows.append([int(x) for x in row[1:]])
    return days, np.array(rows, dtype=np.int64).reshape(len(days), len(LABEL_COLUMNS))


def _read_tail_csv(path: str) -> dict:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["count", "users"]:
            raise DataError(f"{path}: unexpected header {header!r}")
        return {int(row[0]): int(row[1]) for row in reader if row}


def _read_risk_csv(path: str) -> list:
    """Rows regrouped into plottable per-pair curves."""
    by_pair: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["pair", "n", "exposed", "infected", "risk",
                      "baseline_mean", "baseline_std"]:
            raise DataError(f"{path}: unexpected header {header!r}")
        for row in reader:
            if not row:
                continue
            by_pair.setdefault(row[0], []).append(row)
    curves = []
    for pair, rows in by_pair.items():
        curves.append(
            SimpleNamespace(
                pair_name=pair,
                levels=np.array([int(r[1]) for r in rows], dtype=np.int64),
                risk=np.array([float(r[4]) for r in rows]),
                baseline_mean=np.array([float(r[5]) for r in rows]),
                baseline_std=np.array([float(r[6]) for r in rows]),
            )
        )
    return curves


_CATEGORY_ABBREV = {"hate": "H", "counterspeech": "C", "dual": "D", "neutral": "N"}


def cmd_report(cfg: RunConfig) -> list:
    inputs: list = []
    outputs: list = []

    daily_path = _staged(cfg, "daily.csv")
    if os.path.isfile(daily_path):
        inputs.append(daily_path)
        days, counts = _read_daily_csv(daily_path)
        out = _staged(cfg, "daily.svg")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(svg.daily_series_chart(days, counts, LABEL_COLUMNS))
        outputs.append(out)

    for name, title in (("tail_hate", "Hate tweets per user"),
                        ("tail_counterspeech", "Counterspeech tweets per user")):
        path = _staged(cfg, f"{name}.csv")
        if not os.path.isfile(path):
            continue
        inputs.append(path)
        hist = _read_tail_csv(path)
        if not hist:
            continue
        out = _staged(cfg, f"{name}.svg")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(svg.tail_chart(hist, title=title))
        outputs.append(out)

    ratio_path = _staged(cfg, "homophily_ratio.csv")
    if os.path.isfile(ratio_path):
        inputs.append(ratio_path)
        ratio = read_connectivity_matrix_csv(ratio_path)
        names = [
            f"{_CATEGORY_ABBREV[a]}>{_CATEGORY_ABBREV[b]}"
            for a in CATEGORY_NAMES
            for b in CATEGORY_NAMES
        ]
        out = _staged(cfg, "homophily.svg")
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(svg.ratio_bar_chart(names, [float(v) for v in ratio.ravel()]))
        outputs.append(out)

    risk_path = _staged(cfg, "risk.csv")
    if os.path.isfile(risk_path):
        inputs.append(risk_path)
        for curve in _read_risk_csv(risk_path):
            slug = curve.pair_name.replace("->", "_")
            out = _staged(cfg, f"risk_{slug}.svg")
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(svg.risk_chart(curve))
            outputs.append(out)

    if not outputs:
        raise ConfigError(
            f"nothing to report: no chartable CSV artifacts under {cfg.out_dir}"
        )
    manifest = _write_manifest(cfg, "report", inputs, outputs, {})
    return outputs + [manifest]


_COMMANDS = {
    "synth": cmd_synth,
    "ingest": cmd_ingest,
    "classify": cmd_classify,
    "users": cmd_users,
    "timeline": cmd_timeline,
    "homophily": cmd_homophily,
    "contagion": cmd_contagion,
    "report": cmd_report,
}


class _Parser(argparse.ArgumentParser):
    """argparse reserves exit code 2 for usage errors; remap to 1."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI config file (or set $" + CONFIG_ENV_VAR + ")")
    common.add_argument("--records", help="raw records JSONL")
    common.add_argument("--labels", help="tweet_id,label CSV of known labels")
    common.add_argument("--edges", help="follower edge list (src TAB dst = src follows dst)")
    common.add_argument("--attributes", help="node attribute CSV override")
    common.add_argument("--keywords", help="keyword file ('builtin' for the bundled list)")
    common.add_argument("--window-start", dest="window_start", help="first day, YYYY-MM-DD")
    common.add_argument("--window-end", dest="window_end", help="last day, YYYY-MM-DD")
    common.add_argument("--features", choices=_FEATURE_SETS)
    common.add_argument("--folds", type=int)
    common.add_argument("--shuffle-replicates", dest="shuffle_replicates", type=int)
    common.add_argument("--cascade-replicates", dest="cascade_replicates", type=int)
    common.add_argument("--swap-factor", dest="swap_factor", type=float)
    common.add_argument("--direction", choices=_DIRECTIONS)
    common.add_argument("--mode", choices=_MODES)
    common.add_argument("--pairs", help="exposure pairs, e.g. hate:hate,counterspeech:hate")
    common.add_argument("--n-max", dest="n_max", type=int, help="0 = automatic")
    common.add_argument("--min-exposed", dest="min_exposed", type=int)
    common.add_argument("--include-dual", dest="include_dual",
                        action=argparse.BooleanOptionalAction, default=None)
    common.add_argument("--event-day", dest="event_day", help="spike reference day")
    common.add_argument("--window-days", dest="window_days", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", dest="out_dir", help="artifact directory")

    parser = _Parser(prog="hcat", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hcat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "synth": "write a synthetic corpus bundle (records, labels, edges)",
        "ingest": "filter raw records by keyword and observation window",
        "classify": "train and evaluate the tweet classifier, label the corpus",
        "users": "categorize users; node attribute and ego degree tables",
        "timeline": "daily volumes, spike summary, activity tails, behavior shifts",
        "homophily": "category connectivity vs degree-preserving shuffled baseline",
        "contagion": "exposure risk curves vs cascade-shuffle baseline",
        "report": "render SVG charts from the emitted CSV artifacts",
    }
    for name, handler in _COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _fail(command, code: int, kind: str, exc: BaseException) -> int:
    record = {
        "status": "error",
        "command": command,
        "error": kind,
        "exit_code": code,
        "message": str(exc),
    }
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    command = None
    try:
        args = build_parser().parse_args(argv)
        command = args.command
        cfg = resolve_config(args)
        validate_config(cfg)
        for path in _COMMANDS[command](cfg):
            print(path)
        return 0
    except (ConfigError, SchemaError) as exc:
        return _fail(command, 1, "validation", exc)
    except DataError as exc:
        return _fail(command, 2, "data", exc)
    except HcatError as exc:
        return _fail(command, 3, "internal", exc)
    except Exception as exc:  # noqa: BLE001 - last-resort exit code mapping
        return _fail(command, 3, "internal", exc)


if __name__ == "__main__":
    sys.exit(main())
