"""Acceptance checks: ten pipeline-level properties, one line printed each.

Every check verifies package output against an independent route: a
set-materializing risk oracle, a full-enumeration rank test, plain-loop
metric recomputation, analytic null expectations, or byte comparison of
repeated runs. Timed checks warm the jit kernels first so compilation
is not billed to the measured section.
"""

import itertools
import time

import numpy as np
import pytest

from hcat.cascade import (
    KIND_COUNTER,
    KIND_HATE,
    compute_exposures,
    contagion_report,
    infection_risk,
)
from hcat.cli import main
from hcat.evaluation import cross_validate, eval_metrics
from hcat.graph import UserCategory
from hcat.homophily import connectivity_probabilities, homophily_report
from hcat.model import Hyper
from hcat.shuffle import ShuffleConfig, shuffle_with_stats
from hcat.stats import mann_whitney_u
from hcat.synthdata import (
    independent_cascade,
    planted_two_block_graph,
    random_cascade,
    random_directed_graph,
    random_label_examples,
    separable_examples,
    simulate_hazard_cascade,
)


def report(capsys, number: int, ok: bool, detail: str) -> None:
    line = f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'} - {detail}"
    with capsys.disabled():
        print(line)
    assert ok, line


# ------------------------------------------------------------- 1: shuffle


def test_criterion_01_shuffle_invariants(capsys):
    warm = random_directed_graph(50, 200, seed=0)
    shuffle_with_stats(warm, ShuffleConfig(seed=0))

    rng = np.random.default_rng(20260816)
    violations = []
    start = time.perf_counter()
    for trial in range(50):
        n = int(rng.integers(10, 10_001))
        cap = n * (n - 1)
        m = int(rng.integers(min(100, cap), min(100_000, cap) + 1))
        g = random_directed_graph(n, m, seed=trial)
        rewired, _ = shuffle_with_stats(g, ShuffleConfig(seed=trial + 1))

        src = np.repeat(np.arange(n, dtype=np.int64), np.diff(rewired.indptr))
        dst = rewired.targets
        covid = g.covid_flag.astype(np.int64)
        before = np.bincount(g.edge_sources(), weights=covid[g.targets], minlength=n)
        after = np.bincount(src, weights=covid[dst], minlength=n)
        keys = src * np.int64(n) + dst
        checks = {
            "out-degree": np.array_equal(np.diff(rewired.indptr), np.diff(g.indptr)),
            "in-degree": np.array_equal(
                np.bincount(dst, minlength=n), np.bincount(g.targets, minlength=n)
            ),
            "covid-out": np.array_equal(before, after),
            "no-self-loop": not np.any(src == dst),
            "no-duplicate": np.unique(keys).size == keys.size,
        }
        for name, good in checks.items():
            if not good:
                violations.append(f"trial {trial}: {name}")
    elapsed = time.perf_counter() - start

    ok = not violations and elapsed < 30.0
    detail = f"invariants held on 50 graphs in {elapsed:.1f}s (< 30s)"
    if violations:
        detail = "; ".join(violations[:3])
    report(capsys, 1, ok, detail)


# ------------------------------------------------- 2: null-model homophily


def test_criterion_02_null_homophily(capsys):
    hits = 0
    for t in range(100):
        g = random_directed_graph(500, 5000, seed=10_000 + t)
        rng = np.random.default_rng(t)
        cats = rng.integers(0, 2, size=500)
        mapping = {
            uid: (UserCategory.HATE if c == 0 else UserCategory.COUNTERSPEECH)
            for uid, c in zip(g.user_ids, cats)
        }
        rep = homophily_report(g.with_categories(mapping), replicates=100, seed=t)
        cells = [rep.ratio[a, b] for a in (0, 1) for b in (0, 1)]
        if all(np.isfinite(v) and 0.9 <= v <= 1.1 for v in cells):
            hits += 1
    ok = hits >= 95
    report(capsys, 2, ok,
           f"randomized labels kept all ratios in [0.9, 1.1] for {hits}/100 trials (>= 95)")


# ---------------------------------------------------- 3: planted homophily


def test_criterion_03_planted_homophily(capsys):
    g = planted_two_block_graph(500, 10.0, within_factor=5.0,
                                minority_fraction=0.15, seed=0)
    rep = homophily_report(g, replicates=100, seed=0)

    # independent floor: observed within-block share over the share the
    # configuration model would give it (the block's in-degree mass),
    # discounted by ten percent
    cat = g.category.astype(np.int64)
    src_cat = cat[g.edge_sources()]
    dst_cat = cat[g.targets]
    in_mass = g.in_degrees().astype(np.float64)
    parts = []
    ok = True
    for idx, name in ((0, "hate"), (1, "counterspeech")):
        sel = src_cat == idx
        obs_share = float(np.mean(dst_cat[sel] == idx))
        mass_share = float(in_mass[cat == idx].sum() / in_mass.sum())
        floor = (obs_share / mass_share) * 0.9
        got = float(rep.ratio[idx, idx])
        parts.append(f"{name} {got:.2f} >= {floor:.2f}")
        ok = ok and np.isfinite(got) and got >= floor
    report(capsys, 3, ok, "within-block ratios clear the model floor: " + ", ".join(parts))


# --------------------------------------- 4: risk curve vs set-based oracle


def brute_risk(graph, cascade, kind_s, kind_sp, n_max, direction, include_dual):
    """Set-materializing reimplementation of the exposure risk curve."""
    n = graph.n_nodes
    followees = [set(int(v) for v in graph.out_neighbors(i)) for i in range(n)]
    followers = [set() for _ in range(n)]
    for i in range(n):
        for j in followees[i]:
            followers[j].add(i)
    if direction == "out":
        neigh = followees
    elif direction == "in":
        neigh = followers
    else:
        neigh = [followees[i] | followers[i] for i in range(n)]

    first = {}
    for i in range(len(cascade)):
        first[(int(cascade.users[i]), int(cascade.kinds[i]))] = int(cascade.times[i])
    cutoff = []
    for u in range(n):
        ts = [first[(u, k)] for k in (0, 1) if (u, k) in first]
        cutoff.append(min(ts) if ts else cascade.window_end)

    exposure = []
    for u in range(n):
        cnt = 0
        for v in neigh[u]:
            tv = first.get((v, kind_s))
            if tv is not None and tv < cutoff[u]:
                cnt += 1
        exposure.append(cnt)

    infected = set()
    for u in range(n):
        if (u, kind_sp) in first and (include_dual or (u, 1 - kind_sp) not in first):
            infected.add(u)

    exposed_counts, infected_counts, risks = [], [], []
    for level in range(1, n_max + 1):
        exp_set = {u for u in range(n) if exposure[u] >= level}
        inf = len(exp_set & infected)
        exposed_counts.append(len(exp_set))
        infected_counts.append(inf)
        risks.append(float("nan") if not exp_set else inf / len(exp_set))
    return exposed_counts, infected_counts, risks


def test_criterion_04_risk_curves_match_set_oracle(capsys):
    rng = np.random.default_rng(4)
    directions = ("out", "in", "union")
    mismatches = 0
    curves = 0
    for trial in range(100):
        n = int(rng.integers(2, 21))
        m = int(rng.integers(0, min(40, n * (n - 1)) + 1))
        g = random_directed_graph(n, m, seed=200 + trial)
        casc = random_cascade(g, seed=300 + trial)
        direction = directions[trial % 3]
        include_dual = bool(trial % 2)
        for s, sp in ((KIND_HATE, KIND_HATE), (KIND_HATE, KIND_COUNTER)):
            curve = infection_risk(g, casc, s, sp, n_max=4,
                                   direction=direction, include_dual=include_dual)
            exp, inf, risk = brute_risk(g, casc, s, sp, 4,
                                        direction=direction, include_dual=include_dual)
            curves += 1
            same = (
                np.array_equal(curve.exposed, np.array(exp, dtype=np.int64))
                and np.array_equal(curve.infected, np.array(inf, dtype=np.int64))
                and np.array_equal(curve.risk, np.array(risk), equal_nan=True)
            )
            if not same:
                mismatches += 1
    ok = mismatches == 0
    report(capsys, 4, ok,
           f"{curves} risk curves on 100 random graphs equal the set-based oracle exactly")


# ------------------------------------------------ 5: contagion sensitivity


def test_criterion_05_contagion_detection_power(capsys):
    detect = 0
    calm = 0
    for t in range(100):
        g = random_directed_graph(500, 5000, seed=50_000 + t)

        hazard = simulate_hazard_cascade(g, seed=t)
        cur = contagion_report(g, hazard, [("hate", "hate")], n_max=1,
                               replicates=100, seed=t, min_exposed=1)[0]
        if cur.risk[0] > cur.baseline_mean[0] + 2.0 * cur.baseline_std[0]:
            detect += 1

        flat = independent_cascade(g, 400, seed=t)
        cur = contagion_report(g, flat, [("hate", "hate")], n_max=1,
                               replicates=100, seed=t, min_exposed=1)[0]
        if abs(cur.risk[0] - cur.baseline_mean[0]) <= 2.0 * cur.baseline_std[0]:
            calm += 1
    ok = detect >= 90 and calm >= 90
    report(capsys, 5, ok,
           f"hazard cascades detected {detect}/100, independent cascades quiet {calm}/100 (>= 90 each)")


# -------------------------------------------------- 6: rank-test exactness


def doubled_midranks(pooled):
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    out = [0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and pooled[order[j]] == pooled[order[i]]:
            j += 1
        two_mid = (i + 1) + j  # 2 * average of ranks i+1 .. j
        for k in range(i, j):
            out[order[k]] = two_mid
        i = j
    return out


def enumerated_two_sided_p(a, b):
    pooled = list(a) + list(b)
    two_ranks = doubled_midranks(pooled)
    n1 = len(a)
    observed = sum(two_ranks[:n1])
    le = ge = total = 0
    for comb in itertools.combinations(range(len(pooled)), n1):
        s = sum(two_ranks[i] for i in comb)
        total += 1
        if s <= observed:
            le += 1
        if s >= observed:
            ge += 1
    return min(1.0, 2.0 * min(le / total, ge / total))


def test_criterion_06_rank_test_exactness(capsys):
    rng = np.random.default_rng(6)
    worst = 0.0
    checked = 0
    for n1 in range(1, 10):
        for n2 in range(1, 11 - n1):  # every split with n1 + n2 <= 10
            for rep in range(12):
                if rep < 6:  # small integer grids force heavy ties
                    a = rng.integers(0, 4, size=n1).astype(float).tolist()
                    b = rng.integers(0, 4, size=n2).astype(float).tolist()
                else:
                    a = rng.normal(size=n1).tolist()
                    b = rng.normal(size=n2).tolist()
                got = mann_whitney_u(a, b).p
                want = enumerated_two_sided_p(a, b)
                worst = max(worst, abs(got - want))
                checked += 1
    textbook = abs(mann_whitney_u([1, 2, 3], [4, 5, 6]).p - 0.1)
    ok = worst <= 1e-12 and textbook <= 1e-12
    report(capsys, 6, ok,
           f"{checked} small-sample p-values within {worst:.1e} of enumeration (<= 1e-12)")


# ------------------------------------------------- 7: classifier sanity


def test_criterion_07_classifier_sanity(capsys):
    hyper = Hyper(batch_size=8, epochs=10, learning_rate=0.05)
    sep = cross_validate(separable_examples(60, dim=8, seed=0),
                         n_folds=5, hyper=hyper, seed=0)
    rnd = cross_validate(random_label_examples(60, dim=8, seed=0),
                         n_folds=5, hyper=hyper, seed=0)
    ok = sep.macro_f1 >= 0.95 and abs(rnd.macro_f1 - 1.0 / 3.0) <= 0.1
    report(capsys, 7, ok,
           f"separable macro-F1 {sep.macro_f1:.3f} (>= 0.95), "
           f"random-label macro-F1 {rnd.macro_f1:.3f} (1/3 +/- 0.1)")


# ------------------------------------------------- 8: metric identities


def test_criterion_08_metric_identities(capsys):
    rng = np.random.default_rng(8)
    worst = 0.0
    confusion_ok = True
    for _ in range(20):
        size = int(rng.integers(1, 60))
        y_true = rng.integers(0, 3, size=size).tolist()
        y_pred = rng.integers(0, 3, size=size).tolist()
        rep = eval_metrics(y_true, y_pred)

        conf = [[0] * 3 for _ in range(3)]
        for t, p in zip(y_true, y_pred):
            conf[t][p] += 1
        confusion_ok = confusion_ok and np.array_equal(rep.confusion, np.array(conf))
        for c in range(3):
            col = sum(conf[r][c] for r in range(3))
            row = sum(conf[c])
            prec = conf[c][c] / col if col else 0.0
            rec = conf[c][c] / row if row else 0.0
            f1 = 2.0 * prec * rec / (prec + rec) if prec + rec else 0.0
            worst = max(worst, abs(rep.precision[c] - prec),
                        abs(rep.recall[c] - rec), abs(rep.f1[c] - f1))
    ok = confusion_ok and worst <= 1e-12
    report(capsys, 8, ok,
           f"20 fixtures match plain-loop precision/recall/F1 within {worst:.1e} (<= 1e-12)")


# ------------------------------------------------------ 9: desk-scale time


def test_criterion_09_desk_scale_performance(capsys):
    warm = random_directed_graph(100, 500, seed=0, categories="uniform")
    shuffle_with_stats(warm, ShuffleConfig(seed=0))
    compute_exposures(warm, independent_cascade(warm, 50, seed=0), KIND_HATE)

    g = random_directed_graph(100_000, 1_000_000, seed=9, categories="uniform")

    t0 = time.perf_counter()
    rewired, _ = shuffle_with_stats(g, ShuffleConfig(seed=1))
    connectivity_probabilities(rewired)
    single = time.perf_counter() - t0

    t0 = time.perf_counter()
    homophily_report(g, replicates=100, seed=2)
    hundred = time.perf_counter() - t0

    cascade = independent_cascade(g, 50_000, seed=3)
    t0 = time.perf_counter()
    curves = contagion_report(g, cascade, [("hate", "hate")],
                              replicates=100, seed=4)
    risk_time = time.perf_counter() - t0

    ok = (single < 60.0 and hundred < 1200.0 and risk_time < 600.0
          and not curves[0].empty)
    report(capsys, 9, ok,
           f"1M-edge graph: 1 shuffle+connectivity {single:.1f}s (< 60s), "
           f"100 replicates {hundred:.0f}s (< 1200s), "
           f"risk + 100-replicate null {risk_time:.0f}s (< 600s)")


# --------------------------------------------------- 10: determinism


def test_criterion_10_end_to_end_determinism(capsys, tmp_path):
    runs = []
    for tag in ("first", "second"):
        data = tmp_path / tag / "data"
        out = tmp_path / tag / "run"
        steps = [
            ["synth", "--out", str(data), "--seed", "7"],
            ["ingest", "--records", str(data / "records.jsonl"),
             "--labels", str(data / "labels.csv"), "--out", str(out)],
            ["classify", "--labels", str(data / "labels.csv"), "--folds", "2",
             "--out", str(out)],
            ["users", "--edges", str(data / "edges.tsv"), "--out", str(out)],
            ["timeline", "--event-day", "2020-06-01", "--out", str(out)],
            ["homophily", "--edges", str(data / "edges.tsv"),
             "--shuffle-replicates", "2", "--out", str(out)],
            ["contagion", "--edges", str(data / "edges.tsv"),
             "--cascade-replicates", "2", "--min-exposed", "1",
             "--out", str(out)],
        ]
        for argv in steps:
            assert main(argv) == 0, f"{tag}: command {argv[0]} failed"
        runs.append((data, out))

    (data_a, out_a), (data_b, out_b) = runs
    names = sorted(p.name for p in out_a.glob("*.csv"))
    names_b = sorted(p.name for p in out_b.glob("*.csv"))
    mismatched = [
        name for name in names
        if (out_a / name).read_bytes() != (out_b / name).read_bytes()
    ]
    for name in ("records.jsonl", "labels.csv", "edges.tsv"):
        if (data_a / name).read_bytes() != (data_b / name).read_bytes():
            mismatched.append(f"data/{name}")
    ok = bool(names) and names == names_b and not mismatched
    detail = (f"two seeded runs produced {len(names)} byte-identical CSV artifacts"
              if ok else f"mismatched: {', '.join(mismatched) or 'artifact lists differ'}")
    report(capsys, 10, ok, detail)
