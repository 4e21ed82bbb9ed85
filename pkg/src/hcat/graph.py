"""Directed follower graph in CSR form plus node attributes.

An edge (src, dst) records that src follows dst, so content flows
from dst to src: dst's posts can expose src. Followers of a node are
its in-neighbors; followees are its out-neighbors. External ids are
arbitrary non-empty strings; internally nodes are dense indices in
lexicographic id order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Iterable, Mapping, Sequence

import numpy as np

from hcat.errors import DataError
from hcat.records import TweetLabel


class UserCategory(IntEnum):
    HATE = 0
    COUNTERSPEECH = 1
    DUAL = 2
    NEUTRAL = 3
    UNCATEGORIZED = -1

    @classmethod
    def parse(cls, text: str) -> "UserCategory":
        key = text.strip().lower()
        try:
            return _CATEGORY_NAMES[key]
        except KeyError:
            raise DataError(f"unknown user category {text!r}") from None

    @property
    def wire_name(self) -> str:
        return self.name.lower()


_CATEGORY_NAMES = {
    "hate": UserCategory.HATE,
    "hateful": UserCategory.HATE,
    "counterspeech": UserCategory.COUNTERSPEECH,
    "counter": UserCategory.COUNTERSPEECH,
    "dual": UserCategory.DUAL,
    "neutral": UserCategory.NEUTRAL,
    "uncategorized": UserCategory.UNCATEGORIZED,
    "none": UserCategory.UNCATEGORIZED,
    "": UserCategory.UNCATEGORIZED,
}

# categories that participate in connectivity matrices, fixed order
CATEGORY_ORDER = (
    UserCategory.HATE,
    UserCategory.COUNTERSPEECH,
    UserCategory.DUAL,
    UserCategory.NEUTRAL,
)
CATEGORY_NAMES = tuple(c.wire_name for c in CATEGORY_ORDER)


@dataclass
class SocialGraph:
    user_ids: list  # sorted external id strings
    indptr: np.ndarray  # (n+1,) int64
    targets: np.ndarray  # (m,) int64 internal indices, sorted per source
    covid_flag: np.ndarray  # (n,) int8, 1 when the user posted on-topic
    category: np.ndarray  # (n,) int8, UserCategory codes
    _id_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._id_index = {u: i for i, u in enumerate(self.user_ids)}

    @property
    def n_nodes(self) -> int:
        return len(self.user_ids)

    @property
    def n_edges(self) -> int:
        return int(self.targets.shape[0])

    def index_of(self, user_id: str) -> int:
        try:
            return self._id_index[user_id]
        except KeyError:
            raise DataError(f"user id {user_id!r} not in graph") from None

    def has_user(self, user_id: str) -> bool:
        return user_id in self._id_index

    def out_neighbors(self, node: int) -> np.ndarray:
        return self.targets[self.indptr[node] : self.indptr[node + 1]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.targets, minlength=self.n_nodes).astype(np.int64)

    def edge_sources(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_nodes, dtype=np.int64), self.out_degrees())

    def edge_array(self) -> np.ndarray:
        """(m, 2) array of (src, dst) internal indices in CSR order."""
        return np.column_stack([self.edge_sources(), self.targets])

    def covid_out_counts(self) -> np.ndarray:
        """Per-node count of covid-flagged followees (out-neighbors)."""
        flags = self.covid_flag[self.targets].astype(np.int64)
        out = np.zeros(self.n_nodes, dtype=np.int64)
        np.add.at(out, self.edge_sources(), flags)
        return out

    def edge_keys(self) -> np.ndarray:
        """Sorted src*n+dst keys; two graphs share an edge set iff equal."""
        return np.sort(self.edge_sources() * np.int64(self.n_nodes) + self.targets)

    def with_categories(self, categories: Mapping[str, UserCategory]) -> "SocialGraph":
        """Copy with categories from a user_id -> category map.

        Categorized nodes also get covid_flag set: a category comes
        from on-topic tweets, so a categorized silent covid_flag would
        be contradictory.
        """
        cat = np.full(self.n_nodes, int(UserCategory.UNCATEGORIZED), dtype=np.int8)
        covid = self.covid_flag.copy()
        for uid, c in categories.items():
            i = self._id_index.get(uid)
            if i is not None and c != UserCategory.UNCATEGORIZED:
                cat[i] = int(c)
                covid[i] = 1
        return replace(self, category=cat, covid_flag=covid)

    def with_covid_flags(self, flagged: Iterable[str]) -> "SocialGraph":
        """Copy with covid_flag additionally set for the given user ids."""
        fl = self.covid_flag.copy()
        for uid in flagged:
            i = self._id_index.get(uid)
            if i is not None:
                fl[i] = 1
        return replace(self, covid_flag=fl)


@dataclass
class EdgeLoadStats:
    total_lines: int = 0
    kept: int = 0
    self_loops: int = 0
    duplicates: int = 0
    malformed: int = 0
    errors: list = field(default_factory=list)  # (lineno, message)


def load_edges(path: str) -> tuple[list, EdgeLoadStats]:
    """Read tab-separated follower/followee id pairs.

    Self-loops, exact duplicates, and malformed lines are dropped and
    counted (malformed ones also land in stats.errors).
    """
    stats = EdgeLoadStats()
    pairs: list = []
    seen: set = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            stats.total_lines += 1
            parts = line.split("\t")
            if len(parts) != 2:
                parts = line.split()
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                stats.malformed += 1
                stats.errors.append((lineno, f"expected two ids, got {line!r}"))
                continue
            s, d = parts[0].strip(), parts[1].strip()
            if s == d:
                stats.self_loops += 1
                continue
            if (s, d) in seen:
                stats.duplicates += 1
                continue
            seen.add((s, d))
            pairs.append((s, d))
    stats.kept = len(pairs)
    return pairs, stats


def load_node_attributes(path: str) -> dict:
    """CSV with header user_id,covid_flag,category -> {id: (flag, category)}."""
    out: dict = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DataError(f"{path}: empty attribute file")
        if [h.strip().lower() for h in header] != ["user_id", "covid_flag", "category"]:
            raise DataError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, 2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns, got {row!r}")
            uid = row[0].strip()
            if not uid:
                raise DataError(f"{path}:{lineno}: empty user id")
            if row[1].strip() not in ("0", "1"):
                raise DataError(f"{path}:{lineno}: covid_flag must be 0 or 1, got {row[1]!r}")
            out[uid] = (int(row[1]), UserCategory.parse(row[2]))
    return out


def write_node_attributes(path: str, graph: SocialGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "covid_flag", "category"])
        for i in range(graph.n_nodes):
            w.writerow(
                [
                    graph.user_ids[i],
                    int(graph.covid_flag[i]),
                    UserCategory(int(graph.category[i])).wire_name,
                ]
            )


def write_edges(path: str, graph: SocialGraph) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        src = graph.edge_sources()
        for i in range(graph.n_edges):
            fh.write(f"{graph.user_ids[src[i]]}\t{graph.user_ids[graph.targets[i]]}\n")


def build_graph(
    edges: Sequence,
    attributes: Mapping | None = None,
) -> SocialGraph:
    """Assemble the CSR graph from (follower_id, followee_id) pairs.

    The node set is the union of edge endpoints and attribute keys.
    Pairs must already be clean (load_edges drops self-loops and
    duplicates; anything remaining raises).
    """
    ids = set()
    for s, d in edges:
        ids.add(s)
        ids.add(d)
    if attributes:
        ids.update(attributes)
    user_ids = sorted(ids)
    index = {u: i for i, u in enumerate(user_ids)}
    n = len(user_ids)
    m = len(edges)

    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    for k, (s, d) in enumerate(edges):
        src[k] = index[s]
        dst[k] = index[d]
    if m:
        if (src == dst).any():
            raise DataError("self-loop in edge sequence")
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        if ((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])).any():
            raise DataError("duplicate edge in edge sequence")

    indptr = np.zeros(n + 1, dtype=np.int64)
    if n:
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])

    covid = np.zeros(n, dtype=np.int8)
    cat = np.full(n, int(UserCategory.UNCATEGORIZED), dtype=np.int8)
    if attributes:
        for uid, (flag, c) in attributes.items():
            i = index[uid]
            covid[i] = flag
            cat[i] = int(c)
    return SocialGraph(user_ids, indptr, dst, covid, cat)


def load_graph(
    edges_path: str, attributes_path: str | None = None
) -> tuple[SocialGraph, EdgeLoadStats]:
    pairs, stats = load_edges(edges_path)
    attrs = load_node_attributes(attributes_path) if attributes_path else None
    return build_graph(pairs, attrs), stats


def validate_graph(graph: SocialGraph) -> None:
    """Raise DataError on any structural defect; cheap enough to run
    after every shuffle replicate in tests."""
    n, m = graph.n_nodes, graph.n_edges
    if graph.indptr.shape[0] != n + 1:
        raise DataError("indptr length mismatch")
    if graph.indptr[0] != 0 or graph.indptr[-1] != m:
        raise DataError("indptr endpoints wrong")
    if (np.diff(graph.indptr) < 0).any():
        raise DataError("indptr not monotone")
    if m:
        if graph.targets.min() < 0 or graph.targets.max() >= n:
            raise DataError("target index out of range")
    src = graph.edge_sources()
    if (src == graph.targets).any():
        raise DataError("self-loop present")
    if m and np.unique(src * np.int64(n) + graph.targets).shape[0] != m:
        raise DataError("duplicate edge present")
    if graph.covid_flag.shape[0] != n or graph.category.shape[0] != n:
        raise DataError("attribute array length mismatch")
    categorized = graph.category != int(UserCategory.UNCATEGORIZED)
    if (categorized & (graph.covid_flag == 0)).any():
        raise DataError("categorized node without covid_flag")


def categorize_users(labels_by_user: Mapping) -> dict:
    """Collapse each user's tweet labels to one category.

    Users with at least one hateful and at least one counter tweet are
    dual; otherwise one of those labels alone decides; users with only
    neutral tweets are neutral.
    """
    out: dict = {}
    for uid, labels in labels_by_user.items():
        has_hate = False
        has_counter = False
        any_label = False
        for lbl in labels:
            any_label = True
            if lbl == TweetLabel.HATE:
                has_hate = True
            elif lbl == TweetLabel.COUNTERSPEECH:
                has_counter = True
        if not any_label:
            out[uid] = UserCategory.UNCATEGORIZED
        elif has_hate and has_counter:
            out[uid] = UserCategory.DUAL
        elif has_hate:
            out[uid] = UserCategory.HATE
        elif has_counter:
            out[uid] = UserCategory.COUNTERSPEECH
        else:
            out[uid] = UserCategory.NEUTRAL
    return out


@dataclass
class EgoRow:
    count: int
    followers_mean: float
    followers_median: float
    followees_mean: float
    followees_median: float


@dataclass
class EgoStats:
    """Per-category degree summaries over categorized nodes."""

    rows: dict  # category wire name -> EgoRow
    total_categorized: int


def ego_stats(graph: SocialGraph) -> EgoStats:
    """Follower/followee degree summaries per user category."""
    indeg = graph.in_degrees()
    outdeg = graph.out_degrees()
    rows = {}
    total = 0
    for cat in CATEGORY_ORDER:
        mask = graph.category == int(cat)
        cnt = int(mask.sum())
        total += cnt
        if cnt == 0:
            rows[cat.wire_name] = EgoRow(0, 0.0, 0.0, 0.0, 0.0)
            continue
        rows[cat.wire_name] = EgoRow(
            cnt,
            float(indeg[mask].mean()),
            float(np.median(indeg[mask])),
            float(outdeg[mask].mean()),
            float(np.median(outdeg[mask])),
        )
    if total == 0:
        raise DataError("no categorized nodes")
    return EgoStats(rows, total)


def write_ego_stats_csv(stats: EgoStats, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(
            [
                "category",
                "count",
                "followers_mean",
                "followers_median",
                "followees_mean",
                "followees_median",
            ]
        )
        for name in CATEGORY_NAMES:
            r = stats.rows[name]
            w.writerow(
                [
                    name,
                    r.count,
                    f"{r.followers_mean:.6f}",
                    f"{r.followers_median:.6f}",
                    f"{r.followees_mean:.6f}",
                    f"{r.followees_median:.6f}",
                ]
            )
