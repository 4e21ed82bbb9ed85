"""Seeded synthetic data: graphs, cascades, corpora, and classifier sets.

Everything here is deterministic given its seed, so generated fixtures
double as oracles: tests regenerate them and check pipeline output
against the construction parameters.
"""

from __future__ import annotations

import json
import os

import numpy as np

from hcat.cascade import KIND_COUNTER, KIND_HATE, Cascade
from hcat.errors import ConfigError
from hcat.features import FeatureVector
from hcat.graph import CATEGORY_ORDER, SocialGraph, UserCategory
from hcat.keywords import load_keywords
from hcat.records import (
    DAY_SECONDS,
    TweetLabel,
    day_to_ts,
    default_window,
    format_timestamp,
)


def _node_ids(n: int) -> list:
    # zero-padded so lexicographic order equals numeric order
    return [f"u{i:07d}" for i in range(n)]


def _assemble(n, src, dst, covid_flag, category) -> SocialGraph:
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return SocialGraph(_node_ids(n), indptr, dst, covid_flag, category)


def random_directed_graph(
    n_nodes: int,
    n_edges: int,
    seed: int = 0,
    covid_fraction: float = 0.5,
    categories: str | None = None,
) -> SocialGraph:
    """Uniform simple directed graph (no self-loops, no duplicates).

    categories=None leaves nodes uncategorized; "uniform" assigns the
    four categories uniformly at random (which also marks every node
    covid-flagged, as categorized nodes must be).
    """
    if n_nodes < 2:
        raise ConfigError("need at least 2 nodes")
    max_edges = n_nodes * (n_nodes - 1)
    if n_edges > max_edges:
        raise ConfigError(f"{n_edges} edges exceed the {max_edges} possible")
    rng = np.random.Generator(np.random.PCG64(seed))

    keys = np.empty(0, dtype=np.int64)
    while keys.shape[0] < n_edges:
        want = n_edges - keys.shape[0]
        draw = rng.integers(0, max_edges, size=max(1000, int(1.3 * want)), dtype=np.int64)
        keys = np.unique(np.concatenate([keys, draw]))
    if keys.shape[0] > n_edges:
        pick = rng.choice(keys.shape[0], size=n_edges, replace=False)
        keys = keys[np.sort(pick)]
    # key = s * (n-1) + shifted target, skipping the diagonal
    src = keys // (n_nodes - 1)
    rem = keys % (n_nodes - 1)
    dst = rem + (rem >= src)

    covid = (rng.random(n_nodes) < covid_fraction).astype(np.int8)
    cat = np.full(n_nodes, int(UserCategory.UNCATEGORIZED), dtype=np.int8)
    if categories == "uniform":
        cat = rng.integers(0, len(CATEGORY_ORDER), size=n_nodes).astype(np.int8)
        covid = np.ones(n_nodes, dtype=np.int8)
    elif categories is not None:
        raise ConfigError(f"unknown categories mode {categories!r}")
    return _assemble(n_nodes, src, dst, covid, cat)


def planted_two_block_graph(
    n_nodes: int = 500,
    mean_out_degree: float = 10.0,
    within_factor: float = 5.0,
    minority_fraction: float = 0.15,
    seed: int = 0,
) -> SocialGraph:
    """Two-block graph with boosted within-block edge probability.

    The minority block is hateful, the rest counterspeech, every node
    covid-flagged. Per-node edge probabilities are scaled so the mean
    out-degree is as requested regardless of the block split.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n_a = max(2, int(round(n_nodes * minority_fraction)))
    block = np.zeros(n_nodes, dtype=np.int8)
    block[:n_a] = 0
    block[n_a:] = 1
    members = [np.flatnonzero(block == 0), np.flatnonzero(block == 1)]

    src_list = []
    dst_list = []
    for i in range(n_nodes):
        own = int(block[i])
        n_own = members[own].shape[0] - 1
        n_other = n_nodes - 1 - n_own
        # d = p_cross * (factor * n_own + n_other)
        p_cross = mean_out_degree / (within_factor * n_own + n_other)
        p_within = min(1.0, within_factor * p_cross)
        k_within = rng.binomial(n_own, p_within)
        k_cross = rng.binomial(n_other, min(1.0, p_cross))
        own_pool = members[own][members[own] != i]
        other_pool = members[1 - own]
        if k_within:
            src_list.append(np.full(k_within, i, dtype=np.int64))
            dst_list.append(rng.choice(own_pool, size=k_within, replace=False))
        if k_cross:
            src_list.append(np.full(k_cross, i, dtype=np.int64))
            dst_list.append(rng.choice(other_pool, size=k_cross, replace=False))
    src = np.concatenate(src_list) if src_list else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dst_list) if dst_list else np.empty(0, dtype=np.int64)

    covid = np.ones(n_nodes, dtype=np.int8)
    cat = np.where(
        block == 0, np.int8(UserCategory.HATE), np.int8(UserCategory.COUNTERSPEECH)
    ).astype(np.int8)
    return _assemble(n_nodes, src, dst, covid, cat)


def _cascade_from_events(events, graph, window_end) -> Cascade:
    events = sorted(events, key=lambda e: (e[0], e[1]))
    return Cascade(
        np.array([e[2] for e in events], dtype=np.int64),
        np.array([e[0] for e in events], dtype=np.int64),
        np.array([e[3] for e in events], dtype=np.int8),
        [e[1] for e in events],
        window_end,
        graph.n_nodes,
    )


def independent_cascade(
    graph: SocialGraph,
    n_events: int,
    seed: int = 0,
    kind: int = KIND_HATE,
    t_max: int = 10_000,
) -> Cascade:
    """Activations placed uniformly at random, ignoring the graph."""
    rng = np.random.Generator(np.random.PCG64(seed))
    n_events = min(n_events, graph.n_nodes)
    users = rng.choice(graph.n_nodes, size=n_events, replace=False)
    times = rng.integers(0, t_max, size=n_events, dtype=np.int64)
    events = [(int(times[j]), f"t{j:06d}", int(users[j]), kind) for j in range(n_events)]
    return _cascade_from_events(events, graph, t_max)


def simulate_hazard_cascade(
    graph: SocialGraph,
    seed: int = 0,
    base_hazard: float = 0.001,
    exposure_hazard: float = 0.015,
    n_steps: int = 20,
    kind: int = KIND_HATE,
    n_seed_users: int = 5,
) -> Cascade:
    """Discrete-time contagion: each already-activated followee adds a
    fixed per-step activation hazard on top of a small base rate.

    Activation times are the step indices, so exposure (strictly
    earlier activation) matches the simulation's one-step lag. The
    defaults keep a 500-node, degree-10 graph well under saturation
    (roughly a fifth of nodes activate), which preserves the contrast
    between the empirical curve and the time-shuffle null.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n = graph.n_nodes
    active_at = np.full(n, -1, dtype=np.int64)
    seeds = rng.choice(n, size=min(n_seed_users, n), replace=False)
    active_at[seeds] = 0

    src = graph.edge_sources()
    dst = graph.targets
    for step in range(1, n_steps + 1):
        was_active = (active_at >= 0) & (active_at < step)
        # exposures flow from followees (dst) back to followers (src)
        exposures = np.bincount(src[was_active[dst]], minlength=n)
        p = np.minimum(1.0, base_hazard + exposure_hazard * exposures)
        fire = (rng.random(n) < p) & (active_at < 0)
        active_at[fire] = step

    hit = np.flatnonzero(active_at >= 0)
    events = [
        (int(active_at[u]), f"t{j:06d}", int(u), kind) for j, u in enumerate(hit)
    ]
    return _cascade_from_events(events, graph, n_steps + 1)


def random_cascade(
    graph: SocialGraph,
    seed: int = 0,
    p_hate: float = 0.35,
    p_counter: float = 0.25,
    t_max: int = 100,
) -> Cascade:
    """Per-user independent hate/counter events at random small times."""
    rng = np.random.Generator(np.random.PCG64(seed))
    events = []
    j = 0
    for u in range(graph.n_nodes):
        r = rng.random()
        has_hate = r < p_hate
        has_counter = rng.random() < p_counter
        if has_hate:
            events.append((int(rng.integers(0, t_max)), f"t{j:06d}", u, KIND_HATE))
            j += 1
        if has_counter:
            events.append((int(rng.integers(0, t_max)), f"t{j:06d}", u, KIND_COUNTER))
            j += 1
    return _cascade_from_events(events, graph, t_max)


def separable_examples(
    n_per_class: int = 60, dim: int = 8, spread: float = 8.0, seed: int = 0
) -> list:
    """Three well-separated Gaussian blobs as (FeatureVector, label) pairs."""
    rng = np.random.Generator(np.random.PCG64(seed))
    centers = np.zeros((3, dim))
    for c in range(3):
        centers[c, c % dim] = spread
        centers[c, (c + 3) % dim] = -0.5 * spread
    out = []
    for c, label in enumerate((TweetLabel.HATE, TweetLabel.COUNTERSPEECH, TweetLabel.NEUTRAL)):
        pts = centers[c] + rng.normal(0.0, 1.0, size=(n_per_class, dim))
        for row in pts:
            out.append((FeatureVector(row.astype(np.float64), f"blobs-{dim}"), label))
    perm = rng.permutation(len(out))
    return [out[i] for i in perm]


def random_label_examples(n_per_class: int = 60, dim: int = 8, seed: int = 0) -> list:
    """Feature blobs with labels drawn uniformly, independent of position."""
    examples = separable_examples(n_per_class, dim=dim, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed + 1))
    labels = rng.integers(0, 3, size=len(examples))
    # guarantee every class appears
    labels[:3] = [0, 1, 2]
    return [(fv, TweetLabel(int(labels[i]))) for i, (fv, _) in enumerate(examples)]


_HATE_TEMPLATES = (
    "the {hate} are ruining everything, {covid} is their fault",
    "I am sick of the {hate} spreading {covid} everywhere!!",
    "blame the {hate} for all of this #outbreak",
    "these {hate} people brought the {covid} here, disgusting",
)
_COUNTER_TEMPLATES = (
    "stop blaming people for {covid}, hate is not the answer {counter}",
    "stand together against racism {counter} #solidarity",
    "viruses do not have a nationality, report hate {counter}",
    "proud of everyone pushing back on bigotry {counter} @support",
)
_NEUTRAL_TEMPLATES = (
    "daily {covid} case update for our region, stay safe",
    "new {covid} guidance published today https://health.example/info",
    "working from home again because of {covid}, week {week}",
    "my local clinic has {covid} tests available @clinic",
)
_NOMATCH_TEMPLATES = (
    "thinking about lunch options today",
    "the weather is lovely this afternoon",
    "great game last night, what a finish",
)


def synth_corpus(
    out_dir: str,
    seed: int = 0,
    n_records: int = 1000,
    n_users: int = 120,
    event_day: str = "2020-06-01",
) -> dict:
    """Write a small synthetic records/labels/edges bundle.

    Personas drive label mixes (hateful, counter, dual, neutral), the
    counter personas post extra volume in the week after *event_day*
    to plant a timeline spike, and a handful of records are unmatched,
    duplicated, or out of window to exercise the ingest filters.
    Returns the written paths plus the generation tallies.
    """
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.Generator(np.random.PCG64(seed))
    kw = load_keywords()
    hate_terms = [t for t in kw.hate_terms if not t.startswith("#")]
    counter_terms = list(kw.counter_terms)
    covid_terms = [t for t in kw.covid_terms if not t.startswith("#")]

    users = [f"u{i:04d}" for i in range(n_users)]
    personas = (
        ["hate"] * max(1, n_users // 8)
        + ["counter"] * max(1, n_users // 10)
        + ["dual"] * max(1, n_users // 20)
    )
    personas += ["neutral"] * (n_users - len(personas))
    personas = [personas[i] for i in rng.permutation(n_users)]

    w_start, w_end = default_window()
    event_ts = day_to_ts(event_day)

    def pick_time(persona: str, label: str) -> int:
        if label == "counterspeech" and rng.random() < 0.5:
            return int(event_ts + rng.integers(0, 7 * DAY_SECONDS))
        return int(w_start + rng.integers(0, w_end - w_start))

    # heavier users first: long-tail activity for the histogram export
    weights = 1.0 / (1.0 + np.arange(n_users))
    weights /= weights.sum()

    records = []
    labels = []
    tallies = {"hate": 0, "counterspeech": 0, "neutral": 0, "nomatch": 0,
               "duplicate": 0, "out_of_window": 0}
    for i in range(n_records):
        tid = f"t{i:06d}"
        u = int(rng.choice(n_users, p=weights))
        persona = personas[u]
        roll = rng.random()
        if roll < 0.06:
            text = str(rng.choice(_NOMATCH_TEMPLATES))
            records.append((tid, users[u], int(w_start + rng.integers(0, w_end - w_start)), text))
            tallies["nomatch"] += 1
            continue
        if persona == "hate":
            label = "hate" if rng.random() < 0.7 else "neutral"
        elif persona == "counter":
            label = "counterspeech" if rng.random() < 0.7 else "neutral"
        elif persona == "dual":
            label = ("hate", "counterspeech", "neutral")[int(rng.integers(0, 3))]
        else:
            label = "neutral"
        if label == "hate":
            text = str(rng.choice(_HATE_TEMPLATES)).format(
                hate=str(rng.choice(hate_terms)), covid=str(rng.choice(covid_terms))
            )
        elif label == "counterspeech":
            text = str(rng.choice(_COUNTER_TEMPLATES)).format(
                counter=str(rng.choice(counter_terms)), covid=str(rng.choice(covid_terms))
            )
        else:
            text = str(rng.choice(_NEUTRAL_TEMPLATES)).format(
                covid=str(rng.choice(covid_terms)), week=int(rng.integers(1, 60))
            )
        ts = pick_time(persona, label)
        if rng.random() < 0.02:
            ts = w_end + int(rng.integers(0, 30 * DAY_SECONDS))
            tallies["out_of_window"] += 1
        records.append((tid, users[u], ts, text))
        labels.append((tid, label))
        tallies[label] += 1
        if rng.random() < 0.02:
            records.append((tid, users[u], ts, text))
            tallies["duplicate"] += 1

    records_path = os.path.join(out_dir, "records.jsonl")
    with open(records_path, "w", encoding="utf-8") as fh:
        for tid, uid, ts, text in records:
            fh.write(
                json.dumps(
                    {"id": tid, "user_id": uid, "created_at": format_timestamp(ts), "text": text},
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )

    labels_path = os.path.join(out_dir, "labels.csv")
    with open(labels_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("tweet_id,label\n")
        for tid, label in labels:
            fh.write(f"{tid},{label}\n")

    # follower edges with mild persona assortativity plus junk lines
    edges_path = os.path.join(out_dir, "edges.tsv")
    seen = set()
    lines = []
    per_user = 6
    for u in range(n_users):
        same = [v for v in range(n_users) if v != u and personas[v] == personas[u]]
        for _ in range(per_user):
            if same and rng.random() < 0.4:
                v = int(same[int(rng.integers(0, len(same)))])
            else:
                v = int(rng.integers(0, n_users))
            if v == u or (u, v) in seen:
                continue
            seen.add((u, v))
            lines.append(f"{users[u]}\t{users[v]}")
    lines.append(f"{users[0]}\t{users[0]}")  # self-loop, dropped by the loader
    if lines:
        lines.append(lines[0])  # duplicate, dropped by the loader
    with open(edges_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")

    return {
        "records": records_path,
        "labels": labels_path,
        "edges": edges_path,
        "tallies": tallies,
        "n_users": n_users,
        "event_day": event_day,
    }
