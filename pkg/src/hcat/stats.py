"""Longitudinal tallies, spike quantification, rank tests, and
pre/post-activation behavior profiles."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from hcat.errors import ConfigError, DataError
from hcat.keywords import tokenize_words
from hcat.lexicon import sentiment_score
from hcat.records import (
    DAY_SECONDS,
    TweetLabel,
    TweetRecord,
    count_mentions,
    count_urls,
    day_of,
    day_to_ts,
    default_window,
)

__all__ = [
    "DailySeries",
    "daily_counts",
    "WindowChange",
    "window_change",
    "GroupComparison",
    "mann_whitney_u",
    "BehaviorProfile",
    "ProfileSet",
    "behavior_profiles",
    "compare_profiles",
    "sentiment_score",
    "tail_distribution",
    "write_daily_csv",
    "write_comparisons_csv",
    "write_tail_csv",
]

LABEL_COLUMNS = ("hate", "counterspeech", "neutral", "unlabeled")


@dataclass
class DailySeries:
    days: list  # contiguous YYYY-MM-DD strings
    counts: np.ndarray  # (n_days, 4) int64, columns as LABEL_COLUMNS
    window: tuple

    def column(self, label) -> np.ndarray:
        return self.counts[:, _label_column(label)]

    def day_index(self, day: str) -> int:
        try:
            return self._index[day]
        except AttributeError:
            self._index = {d: i for i, d in enumerate(self.days)}
            return self._index[day]


def _label_column(label) -> int:
    if isinstance(label, TweetLabel):
        return int(label)
    key = str(label).strip().lower()
    if key not in LABEL_COLUMNS:
        raise ConfigError(f"unknown label column {label!r}")
    return LABEL_COLUMNS.index(key)


def daily_counts(
    records: Iterable[TweetRecord], window: tuple[int, int] | None = None
) -> DailySeries:
    """Per-day per-label tweet counts, zero-filled across the window."""
    window = window or default_window()
    start, end = window
    n_days = (end - start) // DAY_SECONDS
    if (end - start) % DAY_SECONDS:
        n_days += 1
    days = [day_of(start + i * DAY_SECONDS) for i in range(n_days)]
    counts = np.zeros((n_days, len(LABEL_COLUMNS)), dtype=np.int64)
    for rec in records:
        if not (start <= rec.timestamp < end):
            continue
        col = int(rec.label) if rec.label is not None else 3
        counts[(rec.timestamp - start) // DAY_SECONDS, col] += 1
    return DailySeries(days, counts, window)


@dataclass
class WindowChange:
    label: str
    event_day: str
    window_days: int
    before_sum: int
    after_sum: int
    percent: float  # NaN when undefined
    defined: bool


def window_change(
    series: DailySeries, label, event_day: str, window_days: int = 7
) -> WindowChange:
    """Percent change of label volume across an event day.

    Compares the window_days before the event (exclusive) against the
    event day plus the following window_days - 1. A zero before-count
    makes the change undefined, flagged rather than raised.
    """
    if window_days < 1:
        raise ConfigError(f"window_days must be >= 1, got {window_days}")
    col = _label_column(label)
    try:
        i = series.day_index(event_day)
    except KeyError:
        raise DataError(f"event day {event_day} outside series") from None
    if i - window_days < 0 or i + window_days > len(series.days):
        raise DataError(
            f"±{window_days} day window around {event_day} does not fit the series"
        )
    before = int(series.counts[i - window_days : i, col].sum())
    after = int(series.counts[i : i + window_days, col].sum())
    if before == 0:
        return WindowChange(
            LABEL_COLUMNS[col], event_day, window_days, before, after, math.nan, False
        )
    pct = 100.0 * (after - before) / before
    return WindowChange(LABEL_COLUMNS[col], event_day, window_days, before, after, pct, True)


@dataclass
class GroupComparison:
    metric: str
    mean_a: float
    mean_b: float
    u: float  # U statistic of sample a
    z: float  # tie- and continuity-corrected normal score
    p: float  # two-sided
    n_a: int
    n_b: int
    method: str  # "exact" or "normal"


def _midranks(pooled: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Midranks of the pooled sample plus tie-group sizes."""
    uniq, inv, cnts = np.unique(pooled, return_inverse=True, return_counts=True)
    starts = np.concatenate([[0], np.cumsum(cnts)[:-1]])
    group_rank = starts + (cnts + 1) / 2.0
    return group_rank[inv], cnts


def _exact_tail_probs(doubled: np.ndarray, n1: int, target: int) -> tuple[float, float]:
    """P(sum <= target) and P(sum >= target) for the doubled-rank sum of
    a uniformly random size-n1 subset.

    Subset counts are tallied in float64; they are exact integers as
    long as C(N, n1) stays below 2**53, which covers every exact-mode
    input of practical size.
    """
    total_sum = int(doubled.sum())
    dp = np.zeros((n1 + 1, total_sum + 1), dtype=np.float64)
    dp[0, 0] = 1.0
    for r in doubled:
        r = int(r)
        # k runs high to low so an item lands in each subset at most once
        for k in range(n1, 0, -1):
            if r:
                dp[k, r:] += dp[k - 1, :-r]
            else:
                dp[k] += dp[k - 1]
    weights = dp[n1]
    total = weights.sum()
    le = weights[: min(target, total_sum) + 1].sum() if target >= 0 else 0.0
    ge = weights[max(target, 0) :].sum() if target <= total_sum else 0.0
    return le / total, ge / total


def mann_whitney_u(a: Sequence[float], b: Sequence[float], metric: str = "") -> GroupComparison:
    """Two-sided Mann-Whitney U test with midranks for ties.

    The p-value is exact (permutation enumeration over rank sums) when
    the smaller sample has at most 8 observations, and a tie-corrected,
    continuity-corrected normal approximation otherwise. The z score is
    reported either way.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    if av.size == 0 or bv.size == 0:
        raise DataError("mann_whitney_u needs two nonempty samples")
    if not (np.isfinite(av).all() and np.isfinite(bv).all()):
        raise DataError("samples contain non-finite values")
    n1, n2 = av.size, bv.size
    pooled = np.concatenate([av, bv])
    ranks, tie_sizes = _midranks(pooled)
    r_a = float(ranks[:n1].sum())
    u_a = r_a - n1 * (n1 + 1) / 2.0

    n = n1 + n2
    mu = n1 * n2 / 2.0
    tie_term = float(((tie_sizes.astype(np.float64) ** 3) - tie_sizes).sum())
    sigma_sq = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if sigma_sq > 0:
        sigma = math.sqrt(sigma_sq)
        if u_a > mu:
            z = (u_a - mu - 0.5) / sigma
        elif u_a < mu:
            z = (u_a - mu + 0.5) / sigma
        else:
            z = 0.0
    else:
        z = 0.0

    if min(n1, n2) <= 8:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        target = int(round(2.0 * r_a))
        p_le, p_ge = _exact_tail_probs(doubled, n1, target)
        p = min(1.0, 2.0 * min(p_le, p_ge))
        method = "exact"
    else:
        p = math.erfc(abs(z) / math.sqrt(2.0)) if sigma_sq > 0 else 1.0
        method = "normal"

    return GroupComparison(
        metric,
        float(av.mean()),
        float(bv.mean()),
        float(u_a),
        float(z),
        float(p),
        int(n1),
        int(n2),
        method,
    )


@dataclass
class BehaviorProfile:
    tweet_count: int
    mean_chars: float
    mean_words: float
    mean_urls: float
    mean_mentions: float
    mean_sentiment: float


PROFILE_METRICS = (
    "tweet_count",
    "mean_chars",
    "mean_words",
    "mean_urls",
    "mean_mentions",
    "mean_sentiment",
)


@dataclass
class ProfileSet:
    phase: str
    profiles: dict  # user_id -> BehaviorProfile
    omitted: int  # users with no records in the phase

    def metric_values(self, metric: str, users: Iterable[str] | None = None) -> np.ndarray:
        if metric not in PROFILE_METRICS:
            raise ConfigError(f"unknown profile metric {metric!r}")
        pool = self.profiles if users is None else {
            u: self.profiles[u] for u in users if u in self.profiles
        }
        return np.array([getattr(p, metric) for p in pool.values()], dtype=np.float64)


def behavior_profiles(
    records: Iterable[TweetRecord],
    users: Iterable[str],
    activations: Mapping[str, int],
    phase: str = "pre",
) -> ProfileSet:
    """Per-user activity profiles over one activation phase.

    "pre" takes records strictly before the user's activation instant,
    "post" the rest. Users absent from *activations* never activated,
    so all their records are pre-phase. Users with nothing left in the
    phase are omitted and counted.
    """
    if phase not in ("pre", "post"):
        raise ConfigError(f"phase must be 'pre' or 'post', got {phase!r}")
    wanted = set(users)
    by_user: dict = {u: [] for u in wanted}
    for rec in records:
        if rec.user_id not in wanted:
            continue
        t_act = activations.get(rec.user_id)
        is_pre = t_act is None or rec.timestamp < t_act
        if (phase == "pre") == is_pre:
            by_user[rec.user_id].append(rec)

    profiles: dict = {}
    omitted = 0
    for uid in sorted(wanted):
        recs = by_user[uid]
        if not recs:
            omitted += 1
            continue
        k = len(recs)
        profiles[uid] = BehaviorProfile(
            k,
            sum(len(r.text) for r in recs) / k,
            sum(len(tokenize_words(r.text)) for r in recs) / k,
            sum(count_urls(r.text) for r in recs) / k,
            sum(count_mentions(r.text) for r in recs) / k,
            sum(sentiment_score(r.text) for r in recs) / k,
        )
    return ProfileSet(phase, profiles, omitted)


def compare_profiles(
    set_a: ProfileSet, set_b: ProfileSet, metrics: Sequence[str] = PROFILE_METRICS
) -> list[GroupComparison]:
    """Mann-Whitney comparison of two profile populations per metric."""
    out = []
    for metric in metrics:
        va = set_a.metric_values(metric)
        vb = set_b.metric_values(metric)
        out.append(mann_whitney_u(va, vb, metric=metric))
    return out


def tail_distribution(records: Iterable[TweetRecord], label) -> dict:
    """count -> number of users with that many label-matching tweets."""
    col = _label_column(label)
    if col == 3:
        raise ConfigError("tail_distribution needs a real label")
    per_user: dict = {}
    for rec in records:
        if rec.label is not None and int(rec.label) == col:
            per_user[rec.user_id] = per_user.get(rec.user_id, 0) + 1
    hist: dict = {}
    for cnt in per_user.values():
        hist[cnt] = hist.get(cnt, 0) + 1
    return hist


def write_daily_csv(series: DailySeries, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["day"] + list(LABEL_COLUMNS))
        for i, day in enumerate(series.days):
            w.writerow([day] + [int(x) for x in series.counts[i]])


def write_comparisons_csv(comparisons: Sequence[GroupComparison], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["metric", "mean_a", "mean_b", "U", "z", "p", "n_a", "n_b"])
        for c in comparisons:
            w.writerow(
                [
                    c.metric,
                    f"{c.mean_a:.10g}",
                    f"{c.mean_b:.10g}",
                    f"{c.u:.10g}",
                    f"{c.z:.10g}",
                    f"{c.p:.10g}",
                    c.n_a,
                    c.n_b,
                ]
            )


def write_tail_csv(hist: Mapping[int, int], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["count", "users"])
        for cnt in sorted(hist):
            w.writerow([cnt, hist[cnt]])
