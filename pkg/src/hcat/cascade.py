"""Activation cascades, exposure counting, and infection-risk curves.

A user activates at their first hateful or counter tweet. Exposure to
a source category s counts the distinct accounts a user follows that
activated into s strictly before the user's own activation (never
activating means exposure is censored at the end of the observation
window). The risk curve is, per exposure level n,

    risk(n) = |Infected ∩ Exposed(n)| / |Exposed(n)|

over the whole node universe, and its null baseline reshuffles event
times over the cascade's (user, kind) slots while the graph stays
fixed.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from hcat.accel import get_kernels
from hcat.errors import ConfigError, DataError
from hcat.graph import SocialGraph, UserCategory
from hcat.records import TweetLabel, TweetRecord, default_window, format_timestamp, parse_timestamp
from hcat.summaries import nan_mean_std_exact, spawn_seeds

INF_TIME = np.iinfo(np.int64).max

# event kinds: a cascade only records transitions into these
KIND_HATE = 0
KIND_COUNTER = 1
_KIND_OF_CATEGORY = {
    UserCategory.HATE: KIND_HATE,
    UserCategory.COUNTERSPEECH: KIND_COUNTER,
}
_KIND_NAMES = ("hate", "counterspeech")


@dataclass(frozen=True)
class ActivationEvent:
    user: int  # internal node index
    time: int  # epoch seconds
    kind: int  # KIND_HATE or KIND_COUNTER
    tweet_id: str = ""

    @property
    def kind_name(self) -> str:
        return _KIND_NAMES[self.kind]


@dataclass
class Cascade:
    """Activation events over one graph's node indexing.

    Parallel arrays sorted by (time, tweet_id); at most one event per
    (user, kind) pair.
    """

    users: np.ndarray  # int64 node indices
    times: np.ndarray  # int64 epoch seconds
    kinds: np.ndarray  # int8
    tweet_ids: list
    window_end: int
    n_nodes: int

    def __len__(self) -> int:
        return int(self.users.shape[0])

    def events(self) -> list:
        return [
            ActivationEvent(int(self.users[i]), int(self.times[i]), int(self.kinds[i]), self.tweet_ids[i])
            for i in range(len(self))
        ]

    def activation_times(self, kind: int, times: np.ndarray | None = None) -> np.ndarray:
        """Per-node activation time into *kind*, INF_TIME when absent.

        *times* substitutes a permuted time assignment over the same
        event slots (used by the null model).
        """
        t = self.times if times is None else times
        out = np.full(self.n_nodes, INF_TIME, dtype=np.int64)
        sel = self.kinds == kind
        out[self.users[sel]] = t[sel]
        return out

    def cutoff_times(self, times: np.ndarray | None = None) -> np.ndarray:
        """Per-node censoring instant: first activation of any kind,
        else the end of the window."""
        t = self.times if times is None else times
        out = np.full(self.n_nodes, self.window_end, dtype=np.int64)
        # later events never overwrite an earlier cutoff
        order = np.argsort(t, kind="stable")[::-1]
        out[self.users[order]] = t[order]
        return out

    def has_kind_mask(self, kind: int) -> np.ndarray:
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.users[self.kinds == kind]] = True
        return mask

    def infected_mask(self, kind: int, include_dual: bool = False) -> np.ndarray:
        """Users who transitioned into *kind*; dual users (who hold
        both kinds of events) are excluded unless requested."""
        mask = self.has_kind_mask(kind)
        if not include_dual:
            mask &= ~self.has_kind_mask(1 - kind)
        return mask

    def validate(self) -> None:
        if not (np.diff(self.times) >= 0).all():
            raise DataError("cascade events not sorted by time")
        pairs = self.users * 2 + self.kinds
        if np.unique(pairs).shape[0] != len(self):
            raise DataError("duplicate (user, kind) event")
        if len(self) and (self.times >= self.window_end).any():
            raise DataError("event at or after window end")


@dataclass
class CascadeBuildStats:
    n_records: int = 0
    n_users: int = 0
    n_events: int = 0
    unresolved_users: int = 0
    out_of_window_events: int = 0
    category_counts: dict = field(default_factory=dict)


def _as_kind(value) -> int:
    if isinstance(value, str):
        value = UserCategory.parse(value)
    if isinstance(value, UserCategory):
        if value not in _KIND_OF_CATEGORY:
            raise ConfigError(f"category {value.wire_name} has no activation events")
        return _KIND_OF_CATEGORY[value]
    if value in (KIND_HATE, KIND_COUNTER):
        return int(value)
    raise ConfigError(f"not an activation kind: {value!r}")


def build_cascade(
    records: Sequence[TweetRecord],
    graph: SocialGraph,
    window: tuple[int, int] | None = None,
) -> tuple[Cascade, dict, CascadeBuildStats]:
    """Derive activation events and user categories from labeled records.

    Returns (cascade, categories, stats) where categories maps every
    seen user id to hate / counterspeech / dual / neutral. Users not
    present in the graph are categorized but emit no events (counted
    in stats); so are events outside the window.
    """
    if not records:
        raise DataError("empty record stream")
    window = window or default_window()
    w_start, w_end = window

    ordered = sorted(records, key=lambda r: (r.timestamp, r.tweet_id))
    first_hate: dict = {}
    first_counter: dict = {}
    seen: dict = {}
    for rec in ordered:
        if rec.label is None:
            raise DataError(f"record {rec.tweet_id} has no label")
        seen[rec.user_id] = True
        if rec.label == TweetLabel.HATE and rec.user_id not in first_hate:
            first_hate[rec.user_id] = (rec.timestamp, rec.tweet_id)
        elif rec.label == TweetLabel.COUNTERSPEECH and rec.user_id not in first_counter:
            first_counter[rec.user_id] = (rec.timestamp, rec.tweet_id)

    categories: dict = {}
    for uid in seen:
        if uid in first_hate and uid in first_counter:
            categories[uid] = UserCategory.DUAL
        elif uid in first_hate:
            categories[uid] = UserCategory.HATE
        elif uid in first_counter:
            categories[uid] = UserCategory.COUNTERSPEECH
        else:
            categories[uid] = UserCategory.NEUTRAL

    stats = CascadeBuildStats(n_records=len(records), n_users=len(seen))
    counts: dict = {c.wire_name: 0 for c in
                    (UserCategory.HATE, UserCategory.COUNTERSPEECH, UserCategory.DUAL, UserCategory.NEUTRAL)}
    for c in categories.values():
        counts[c.wire_name] += 1
    stats.category_counts = counts

    raw: list = []
    unresolved: set = set()
    for table, kind in ((first_hate, KIND_HATE), (first_counter, KIND_COUNTER)):
        for uid, (t, tid) in table.items():
            if not graph.has_user(uid):
                unresolved.add(uid)
                continue
            if not (w_start <= t < w_end):
                stats.out_of_window_events += 1
                continue
            raw.append((t, tid, graph.index_of(uid), kind))
    stats.unresolved_users = len(unresolved)

    raw.sort(key=lambda e: (e[0], e[1]))
    users = np.array([e[2] for e in raw], dtype=np.int64)
    times = np.array([e[0] for e in raw], dtype=np.int64)
    kinds = np.array([e[3] for e in raw], dtype=np.int8)
    tweet_ids = [e[1] for e in raw]
    stats.n_events = len(raw)

    cascade = Cascade(users, times, kinds, tweet_ids, w_end, graph.n_nodes)
    cascade.validate()
    return cascade, categories, stats


def _exposure_endpoints(graph: SocialGraph, direction: str) -> tuple[np.ndarray, np.ndarray]:
    """(exposing, exposed) node arrays, one entry per exposure channel.

    "out": a user is exposed by accounts they follow; "in": by their
    followers; "union": by either, each distinct neighbor once.
    """
    src = graph.edge_sources()
    dst = graph.targets
    if direction == "out":
        return dst, src
    if direction == "in":
        return src, dst
    if direction == "union":
        exposed = np.concatenate([src, dst])
        exposing = np.concatenate([dst, src])
        keys = exposed * np.int64(graph.n_nodes) + exposing
        _, first = np.unique(keys, return_index=True)
        return exposing[first], exposed[first]
    raise ConfigError(f"unknown exposure direction {direction!r}")


def compute_exposures(
    graph: SocialGraph,
    cascade: Cascade,
    s,
    direction: str = "out",
    times: np.ndarray | None = None,
) -> np.ndarray:
    """Per-node count of distinct neighbors whose *s* activation
    precedes the node's cutoff (its own activation, or window end)."""
    kind = _as_kind(s)
    exposing, exposed = _exposure_endpoints(graph, direction)
    return _exposures_from_arrays(graph, cascade, kind, exposing, exposed, times)


def _exposures_from_arrays(graph, cascade, kind, exposing, exposed, times=None):
    t_act = cascade.activation_times(kind, times)
    cutoff = cascade.cutoff_times(times)
    source_mask = (t_act != INF_TIME).astype(np.uint8)
    kern = get_kernels()
    return kern.exposure_counts(
        exposing, exposed, source_mask, t_act, cutoff, np.int64(graph.n_nodes)
    )


@dataclass
class RiskCurve:
    source: str  # kind name of s
    target: str  # kind name of s'
    levels: np.ndarray  # int64, 1..L
    exposed: np.ndarray  # int64 counts per level
    infected: np.ndarray  # int64 counts per level
    risk: np.ndarray  # float64, NaN where exposed == 0
    baseline_mean: np.ndarray | None = None
    baseline_std: np.ndarray | None = None
    replicates: int = 0
    empty: bool = False

    @property
    def pair_name(self) -> str:
        return f"{self.source}->{self.target}"


def _level_counts(counts: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Number of entries of *counts* that are >= each level."""
    if counts.size == 0:
        return np.zeros(levels.shape[0], dtype=np.int64)
    hist = np.bincount(counts)
    tail = np.cumsum(hist[::-1])[::-1]  # tail[k] = #counts >= k
    out = np.zeros(levels.shape[0], dtype=np.int64)
    ok = levels < tail.shape[0]
    out[ok] = tail[levels[ok]]
    return out


def _risk_at_levels(counts, infected_mask, levels):
    exposed = _level_counts(counts, levels)
    infected = _level_counts(counts[infected_mask], levels)
    with np.errstate(invalid="ignore", divide="ignore"):
        risk = np.where(exposed > 0, infected / np.where(exposed > 0, exposed, 1), np.nan)
    return exposed, infected, risk


def resolve_n_max(
    graph: SocialGraph,
    cascade: Cascade,
    s,
    n_max: int | None = None,
    direction: str = "out",
    min_exposed: int = 50,
) -> int:
    """Explicit n_max passes through; otherwise the largest level
    keeping at least *min_exposed* users exposed (falling back to the
    largest non-empty level, and 0 when nobody is exposed at all)."""
    if n_max is not None:
        if n_max < 1:
            raise ConfigError(f"n_max must be >= 1, got {n_max}")
        return int(n_max)
    counts = compute_exposures(graph, cascade, s, direction=direction)
    top = int(counts.max()) if counts.size else 0
    if top == 0:
        return 0
    levels = np.arange(1, top + 1, dtype=np.int64)
    exposed = _level_counts(counts, levels)
    deep = np.flatnonzero(exposed >= min_exposed)
    if deep.size:
        return int(levels[deep[-1]])
    return int(levels[np.flatnonzero(exposed > 0)[-1]])


def infection_risk(
    graph: SocialGraph,
    cascade: Cascade,
    s,
    s_prime,
    n_max: int | None = None,
    direction: str = "out",
    include_dual: bool = False,
    min_exposed: int = 50,
) -> RiskCurve:
    """Empirical risk curve for the (s, s') pair.

    Levels with nobody exposed carry NaN risk; a curve with nobody
    exposed even at n=1 comes back empty with the flag set.
    """
    kind_s = _as_kind(s)
    kind_sp = _as_kind(s_prime)
    n_levels = resolve_n_max(graph, cascade, s, n_max, direction, min_exposed)
    if n_levels == 0:
        return RiskCurve(
            _KIND_NAMES[kind_s],
            _KIND_NAMES[kind_sp],
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.int64),
            np.empty(0, dtype=np.float64),
            empty=True,
        )
    levels = np.arange(1, n_levels + 1, dtype=np.int64)
    counts = compute_exposures(graph, cascade, s, direction=direction)
    infected_mask = cascade.infected_mask(kind_sp, include_dual=include_dual)
    exposed, infected, risk = _risk_at_levels(counts, infected_mask, levels)
    return RiskCurve(
        _KIND_NAMES[kind_s],
        _KIND_NAMES[kind_sp],
        levels,
        exposed,
        infected,
        risk,
        empty=bool(exposed[0] == 0) if exposed.size else True,
    )


def shuffled_risk(
    graph: SocialGraph,
    cascade: Cascade,
    s,
    s_prime,
    n_max: int | None = None,
    replicates: int = 100,
    seed: int = 0,
    direction: str = "out",
    include_dual: bool = False,
    min_exposed: int = 50,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(levels, baseline_mean, baseline_std) under the time-shuffle null.

    Each replicate redistributes the multiset of event times uniformly
    over the cascade's (user, kind) slots and recomputes the curve on
    the fixed graph.
    """
    if replicates < 2:
        raise ConfigError(f"need at least 2 replicates, got {replicates}")
    kind_s = _as_kind(s)
    kind_sp = _as_kind(s_prime)
    n_levels = resolve_n_max(graph, cascade, s, n_max, direction, min_exposed)
    levels = np.arange(1, n_levels + 1, dtype=np.int64)
    if n_levels == 0:
        z = np.empty(0, dtype=np.float64)
        return levels, z, z.copy()
    if len(cascade) < 2:
        warnings.warn("cascade has fewer than 2 events; the shuffle is vacuous", stacklevel=2)

    exposing, exposed_nodes = _exposure_endpoints(graph, direction)
    infected_mask = cascade.infected_mask(kind_sp, include_dual=include_dual)
    samples = np.empty((replicates, n_levels), dtype=np.float64)
    for i, rep_seed in enumerate(spawn_seeds(seed, replicates)):
        rng = np.random.Generator(np.random.PCG64(rep_seed))
        perm_times = cascade.times[rng.permutation(len(cascade))]
        counts = _exposures_from_arrays(
            graph, cascade, kind_s, exposing, exposed_nodes, times=perm_times
        )
        _, _, risk = _risk_at_levels(counts, infected_mask, levels)
        samples[i] = risk
    mean, std = nan_mean_std_exact(samples)
    return levels, mean, std


def contagion_report(
    graph: SocialGraph,
    cascade: Cascade,
    pairs: Iterable[tuple],
    n_max: int | None = None,
    replicates: int = 100,
    seed: int = 0,
    direction: str = "out",
    include_dual: bool = False,
    min_exposed: int = 50,
) -> list[RiskCurve]:
    """Empirical + baseline curves for each (s, s') pair.

    Pair order is preserved; each pair draws its null replicates from
    its own derived seed, so adding a pair never perturbs the others.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    pair_seeds = spawn_seeds(seed, len(pairs))
    curves = []
    for (s, s_prime), pair_seed in zip(pairs, pair_seeds):
        curve = infection_risk(
            graph, cascade, s, s_prime, n_max, direction, include_dual, min_exposed
        )
        if curve.levels.size:
            _, mean, std = shuffled_risk(
                graph,
                cascade,
                s,
                s_prime,
                n_max=int(curve.levels[-1]),
                replicates=replicates,
                seed=pair_seed,
                direction=direction,
                include_dual=include_dual,
                min_exposed=min_exposed,
            )
            curve.baseline_mean = mean
            curve.baseline_std = std
            curve.replicates = replicates
        curves.append(curve)
    return curves


def write_cascade_csv(cascade: Cascade, graph: SocialGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["user_id", "timestamp", "category"])
        for i in range(len(cascade)):
            w.writerow(
                [
                    graph.user_ids[int(cascade.users[i])],
                    format_timestamp(int(cascade.times[i])),
                    _KIND_NAMES[int(cascade.kinds[i])],
                ]
            )


def read_cascade_csv(path: str, graph: SocialGraph, window_end: int | None = None) -> Cascade:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["user_id", "timestamp", "category"]:
            raise DataError(f"{path}: unexpected header {header!r}")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 columns")
            uid, ts, cat = row
            rows.append((parse_timestamp(ts), str(lineno), graph.index_of(uid), _as_kind(cat)))
    rows.sort(key=lambda e: (e[0], e[1]))
    if window_end is None:
        window_end = default_window()[1]
    cascade = Cascade(
        np.array([r[2] for r in rows], dtype=np.int64),
        np.array([r[0] for r in rows], dtype=np.int64),
        np.array([r[3] for r in rows], dtype=np.int8),
        [r[1] for r in rows],
        window_end,
        graph.n_nodes,
    )
    cascade.validate()
    return cascade


def write_risk_csv(curves: Sequence[RiskCurve], path: str) -> None:
    """Long-format rows: pair,n,exposed,infected,risk,baseline_mean,baseline_std."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["pair", "n", "exposed", "infected", "risk", "baseline_mean", "baseline_std"])
        for curve in curves:
            for j in range(curve.levels.shape[0]):
                mean = curve.baseline_mean[j] if curve.baseline_mean is not None else np.nan
                std = curve.baseline_std[j] if curve.baseline_std is not None else np.nan
                w.writerow(
                    [
                        curve.pair_name,
                        int(curve.levels[j]),
                        int(curve.exposed[j]),
                        int(curve.infected[j]),
                        _fmt(curve.risk[j]),
                        _fmt(mean),
                        _fmt(std),
                    ]
                )


def _fmt(v: float) -> str:
    return "nan" if np.isnan(v) else f"{v:.10g}"
