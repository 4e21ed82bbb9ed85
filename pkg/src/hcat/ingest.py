"""Corpus filtering: keyword match, window check, dedup, stats.

Drop precedence per record: malformed -> no keyword match -> outside
window -> duplicate id. Deduplication keeps the first eligible record
per tweet id in stream order; blank lines are ignored entirely.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from hcat.errors import DataError
from hcat.keywords import KeywordMatcher, KeywordSet
from hcat.records import (
    TweetLabel,
    TweetRecord,
    count_mentions,
    count_urls,
    day_of,
    default_window,
    extract_hashtags,
    parse_record_line,
    record_to_json,
)


@dataclass
class CorpusStats:
    """Counters over one filtering pass; retained-record breakdowns only."""

    total: int = 0
    retained: int = 0
    dropped_nomatch: int = 0
    dropped_window: int = 0
    dropped_dup: int = 0
    malformed: int = 0
    per_label: Counter = field(default_factory=Counter)
    per_user: Counter = field(default_factory=Counter)
    per_day_per_label: dict[str, Counter] = field(default_factory=dict)
    errors: list[tuple[int, str]] = field(default_factory=list)

    def conserved(self) -> bool:
        drops = self.dropped_nomatch + self.dropped_window + self.dropped_dup + self.malformed
        return self.retained + drops == self.total


def _iter_lines(source) -> Iterator[str]:
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            yield from fh
    else:
        yield from source


def filter_corpus(
    source: str | Iterable[str],
    kw: KeywordSet,
    labels: dict[str, TweetLabel] | None = None,
    window: tuple[int, int] | None = None,
) -> tuple[list[TweetRecord], CorpusStats]:
    """Filter a JSONL record stream down to keyword-matched records.

    *source* is a path or an iterable of lines. *labels* maps tweet id to
    label and overrides any label carried by the record itself. *window*
    is (start_ts, end_ts_exclusive); None uses the default observation
    window. Malformed lines are recorded with their line number and
    skipped.
    """
    if window is None:
        window = default_window()
    start_ts, end_ts = window
    matcher = KeywordMatcher(kw)
    stats = CorpusStats()
    retained: list[TweetRecord] = []
    seen_ids: set[str] = set()

    for lineno, line in enumerate(_iter_lines(source), start=1):
        if not line.strip():
            continue
        stats.total += 1
        try:
            tweet_id, user_id, ts, text, own_label = parse_record_line(line)
        except DataError as exc:
            stats.malformed += 1
            stats.errors.append((lineno, str(exc)))
            continue
        matched = matcher.match(text)
        if not matched:
            stats.dropped_nomatch += 1
            continue
        if not (start_ts <= ts < end_ts):
            stats.dropped_window += 1
            continue
        if tweet_id in seen_ids:
            stats.dropped_dup += 1
            continue
        seen_ids.add(tweet_id)
        label = labels.get(tweet_id, own_label) if labels is not None else own_label
        rec = TweetRecord(
            tweet_id=tweet_id,
            user_id=user_id,
            timestamp=ts,
            text=text,
            label=label,
            matched_keywords=matched,
            hashtags=extract_hashtags(text),
            urls=count_urls(text),
            mentions=count_mentions(text),
        )
        retained.append(rec)
        stats.retained += 1
        label_name = label.wire_name if label is not None else "unlabeled"
        stats.per_label[label_name] += 1
        stats.per_user[user_id] += 1
        day = day_of(ts)
        stats.per_day_per_label.setdefault(day, Counter())[label_name] += 1

    return retained, stats


def load_label_file(path: str) -> dict[str, TweetLabel]:
    """Read a ``tweet_id,label`` CSV produced by an external classifier."""
    out: dict[str, TweetLabel] = {}
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            for row in reader:
                if not row or row[0].strip().lower() == "tweet_id":
                    continue
                if len(row) < 2:
                    raise DataError(f"label row too short: {row!r}")
                out[row[0].strip()] = TweetLabel.parse(row[1])
    except OSError as exc:
        raise DataError(f"cannot read label file {path!r}: {exc}") from exc
    return out


def write_records(records: Iterable[TweetRecord], out: TextIO) -> int:
    n = 0
    for rec in records:
        out.write(record_to_json(rec))
        out.write("\n")
        n += 1
    return n


def write_stats_csv(stats: CorpusStats, out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "value"])
    writer.writerow(["total", stats.total])
    writer.writerow(["retained", stats.retained])
    writer.writerow(["dropped_nomatch", stats.dropped_nomatch])
    writer.writerow(["dropped_window", stats.dropped_window])
    writer.writerow(["dropped_dup", stats.dropped_dup])
    writer.writerow(["malformed", stats.malformed])
    writer.writerow(["distinct_users", len(stats.per_user)])
    for name in sorted(stats.per_label):
        writer.writerow([f"label_{name}", stats.per_label[name]])
