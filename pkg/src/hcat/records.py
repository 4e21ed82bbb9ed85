"""Tweet-like record model and newline-delimited JSON parsing.

Input records are one flat JSON object per line with fields ``id``,
``user_id``, ``created_at`` and ``text``. Timestamps are accepted as
ISO-8601 (naive values are taken as UTC) or epoch seconds and are
normalized to integer UTC seconds.
"""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass, field
from enum import IntEnum

from hcat.errors import DataError
from hcat.keywords import HASHTAG_RE

URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
MENTION_RE = re.compile(r"@\w+", re.UNICODE)

UTC = dt.timezone.utc


class TweetLabel(IntEnum):
    """Tweet categories; numeric order is also the argmax tie-break order."""

    HATE = 0
    COUNTERSPEECH = 1
    NEUTRAL = 2

    @classmethod
    def parse(cls, text: str) -> "TweetLabel":
        try:
            return _LABEL_NAMES[text.strip().lower()]
        except KeyError:
            raise DataError(f"unknown label {text!r}") from None

    @property
    def wire_name(self) -> str:
        return self.name.lower()


_LABEL_NAMES = {
    "hate": TweetLabel.HATE,
    "counterspeech": TweetLabel.COUNTERSPEECH,
    "counter": TweetLabel.COUNTERSPEECH,
    "neutral": TweetLabel.NEUTRAL,
}


def parse_timestamp(value) -> int:
    """Normalize an ISO-8601 string or epoch-seconds value to UTC seconds."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        if re.fullmatch(r"-?\d+", text):
            return int(text)
        if re.fullmatch(r"-?\d+\.\d+", text):
            return int(float(text))
        iso = text[:-1] + "+00:00" if text.endswith(("Z", "z")) else text
        try:
            parsed = dt.datetime.fromisoformat(iso)
        except ValueError:
            raise DataError(f"unparseable timestamp {value!r}") from None
        if parsed.tzinfo is None:
            parsed = parsed.replace(tzinfo=UTC)
        return int(parsed.timestamp())
    raise DataError(f"unparseable timestamp {value!r}")


def format_timestamp(ts: int) -> str:
    return dt.datetime.fromtimestamp(ts, tz=UTC).strftime("%Y-%m-%dT%H:%M:%SZ")


def day_of(ts: int) -> str:
    """UTC calendar day of an epoch-second instant, as YYYY-MM-DD."""
    return dt.datetime.fromtimestamp(ts, tz=UTC).strftime("%Y-%m-%d")


def day_to_ts(day: str) -> int:
    """Epoch seconds of UTC midnight starting calendar day *day*."""
    d = dt.date.fromisoformat(day)
    return int(dt.datetime(d.year, d.month, d.day, tzinfo=UTC).timestamp())


DAY_SECONDS = 86400

# Default observation window: Jan 15, 2020 through Mar 26, 2021 inclusive.
DEFAULT_WINDOW_START = "2020-01-15"
DEFAULT_WINDOW_END = "2021-03-26"


def default_window() -> tuple[int, int]:
    """(start_ts, end_ts_exclusive) of the default observation window."""
    return window_bounds(DEFAULT_WINDOW_START, DEFAULT_WINDOW_END)


def window_bounds(start_day: str, end_day: str) -> tuple[int, int]:
    """Inclusive day range -> (start_ts, end_ts_exclusive) in epoch seconds."""
    start = day_to_ts(start_day)
    end = day_to_ts(end_day) + DAY_SECONDS
    if start >= end:
        raise DataError(f"window start {start_day} not before end {end_day}")
    return start, end


@dataclass
class TweetRecord:
    """One retained, keyword-matched record."""

    tweet_id: str
    user_id: str
    timestamp: int
    text: str
    label: TweetLabel | None = None
    matched_keywords: list[str] = field(default_factory=list)
    hashtags: list[str] = field(default_factory=list)
    urls: int = 0
    mentions: int = 0


def parse_record_line(line: str) -> tuple[str, str, int, str, TweetLabel | None]:
    """Parse one JSONL line to (tweet_id, user_id, timestamp, text, label).

    ``label`` is taken from an optional ``label`` field (present in this
    package's own filtered output). Raises :class:`DataError` on
    malformed input.
    """
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DataError("record is not an object")
    for key in ("id", "user_id", "created_at", "text"):
        if key not in doc:
            raise DataError(f"missing field {key!r}")
    tweet_id = str(doc["id"]).strip()
    if not tweet_id:
        raise DataError("empty tweet id")
    user_id = str(doc["user_id"]).strip()
    if not user_id:
        raise DataError("empty user id")
    text = doc["text"]
    if not isinstance(text, str):
        raise DataError("text is not a string")
    label = TweetLabel.parse(doc["label"]) if "label" in doc and doc["label"] else None
    return tweet_id, user_id, parse_timestamp(doc["created_at"]), text, label


def record_to_json(rec: TweetRecord) -> str:
    doc = {
        "id": rec.tweet_id,
        "user_id": rec.user_id,
        "created_at": format_timestamp(rec.timestamp),
        "text": rec.text,
    }
    if rec.label is not None:
        doc["label"] = rec.label.wire_name
    return json.dumps(doc, ensure_ascii=False, sort_keys=True)


def load_records(path: str) -> list[TweetRecord]:
    """Read back a filtered-records JSONL artifact.

    Unlike the ingest pass this is strict: any malformed line raises,
    since the artifact is produced by this package. Derived text counts
    are recomputed; matched keywords are not stored and stay empty.
    """
    out: list[TweetRecord] = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read records file {path!r}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                tweet_id, user_id, ts, text, label = parse_record_line(line)
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from None
            out.append(
                TweetRecord(
                    tweet_id=tweet_id,
                    user_id=user_id,
                    timestamp=ts,
                    text=text,
                    label=label,
                    hashtags=extract_hashtags(text),
                    urls=count_urls(text),
                    mentions=count_mentions(text),
                )
            )
    return out


def extract_hashtags(text: str) -> list[str]:
    return [t.lower() for t in HASHTAG_RE.findall(text)]


def count_urls(text: str) -> int:
    return len(URL_RE.findall(text))


def count_mentions(text: str) -> int:
    return len(MENTION_RE.findall(text))
