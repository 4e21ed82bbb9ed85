"""Category-to-category connectivity and its shuffled baseline.

Connectivity P[A][B] is the probability that an out-edge (a follow)
from a category-A user lands on a category-B user, conditioned on the
target being categorized at all. Ratios against the mean of
degree-preserving shuffles say how much more (or less) often groups
link than the rewired null expects.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from hcat.errors import ConfigError, DataError
from hcat.graph import CATEGORY_NAMES, CATEGORY_ORDER, SocialGraph
from hcat.shuffle import ShuffleConfig, shuffle_with_stats
from hcat.summaries import nan_mean_std_exact, spawn_seeds

N_CATEGORIES = len(CATEGORY_ORDER)

MATRIX_NAMES = ("observed", "baseline_mean", "baseline_std", "ratio")


@dataclass
class ConnectivityReport:
    observed: np.ndarray  # (4, 4)
    baseline_mean: np.ndarray
    baseline_std: np.ndarray
    ratio: np.ndarray
    replicates: int
    mode: str
    degenerate: bool

    def matrices(self) -> dict:
        return {
            "observed": self.observed,
            "baseline_mean": self.baseline_mean,
            "baseline_std": self.baseline_std,
            "ratio": self.ratio,
        }


def connectivity_probabilities(graph: SocialGraph, mode: str = "edge") -> np.ndarray:
    """4x4 matrix over (hate, counterspeech, dual, neutral).

    "edge" pools all edges of a source category; "ego" averages each
    node's own target-category fractions, weighting every active ego
    equally. Rows with no qualifying edges (or egos) are NaN.
    """
    if mode not in ("edge", "ego"):
        raise ConfigError(f"unknown connectivity mode {mode!r}")
    cat = graph.category.astype(np.int64)
    src_cat = cat[graph.edge_sources()]
    dst_cat = cat[graph.targets]
    both = (src_cat >= 0) & (dst_cat >= 0)

    if mode == "edge":
        counts = np.zeros((N_CATEGORIES, N_CATEGORIES), dtype=np.int64)
        if both.any():
            flat = src_cat[both] * N_CATEGORIES + dst_cat[both]
            counts = np.bincount(flat, minlength=N_CATEGORIES**2).reshape(
                N_CATEGORIES, N_CATEGORIES
            )
        denom = counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            P = np.where(denom > 0, counts / np.where(denom > 0, denom, 1), np.nan)
        return P

    # ego mode: per-node fractions over categorized followees
    node_counts = np.zeros((graph.n_nodes, N_CATEGORIES), dtype=np.int64)
    if both.any():
        np.add.at(node_counts, (graph.edge_sources()[both], dst_cat[both]), 1)
    totals = node_counts.sum(axis=1)
    P = np.full((N_CATEGORIES, N_CATEGORIES), np.nan)
    for a in range(N_CATEGORIES):
        egos = (cat == a) & (totals > 0)
        if egos.any():
            frac = node_counts[egos] / totals[egos, None]
            P[a] = frac.mean(axis=0)
    return P


def homophily_report(
    graph: SocialGraph,
    replicates: int = 100,
    seed: int = 0,
    shuffle_config: ShuffleConfig | None = None,
    mode: str = "edge",
) -> ConnectivityReport:
    """Observed connectivity vs the mean/std over shuffled replicates.

    Replicate seeds are spawned from the master seed, so the report is
    a pure function of (graph, replicates, seed, config, mode).
    """
    if replicates < 2:
        raise ConfigError(f"need at least 2 replicates, got {replicates}")
    if not (graph.category >= 0).any():
        raise DataError("no categorized nodes in graph")
    shuffle_config = shuffle_config or ShuffleConfig()

    observed = connectivity_probabilities(graph, mode=mode)

    samples = np.empty((replicates, N_CATEGORIES, N_CATEGORIES))
    degenerate = False
    for i, rep_seed in enumerate(spawn_seeds(seed, replicates)):
        cfg = dc_replace(shuffle_config, seed=rep_seed)
        rewired, stats = shuffle_with_stats(graph, cfg)
        degenerate = degenerate or stats.degenerate
        samples[i] = connectivity_probabilities(rewired, mode=mode)

    mean, std = nan_mean_std_exact(samples)

    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(mean > 0, observed / np.where(mean > 0, mean, 1), np.nan)

    return ConnectivityReport(
        observed, mean, std, ratio, replicates, mode, degenerate
    )


def write_connectivity_matrix_csv(matrix: np.ndarray, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["src_category"] + list(CATEGORY_NAMES))
        for a, name in enumerate(CATEGORY_NAMES):
            row = [name]
            for b in range(N_CATEGORIES):
                v = matrix[a, b]
                row.append("nan" if np.isnan(v) else f"{v:.10g}")
            w.writerow(row)


def write_connectivity_csvs(report: ConnectivityReport, out_dir: str, prefix: str = "connectivity") -> list:
    """One CSV per matrix; returns the written paths."""
    paths = []
    for name, matrix in report.matrices().items():
        path = os.path.join(out_dir, f"{prefix}_{name}.csv")
        write_connectivity_matrix_csv(matrix, path)
        paths.append(path)
    return paths


def read_connectivity_matrix_csv(path: str) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["src_category"] + list(CATEGORY_NAMES):
            raise DataError(f"{path}: unexpected header {header!r}")
        out = np.full((N_CATEGORIES, N_CATEGORIES), np.nan)
        for a, row in enumerate(reader):
            if a >= N_CATEGORIES or row[0] != CATEGORY_NAMES[a]:
                raise DataError(f"{path}: unexpected row {row!r}")
            out[a] = [float(x) for x in row[1:]]
    return out
