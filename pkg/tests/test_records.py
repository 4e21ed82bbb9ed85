"""Record parsing, timestamp normalization, and the JSONL round trip."""

import pytest

from hcat.errors import DataError
from hcat.records import (
    DAY_SECONDS,
    TweetLabel,
    TweetRecord,
    count_mentions,
    count_urls,
    day_of,
    day_to_ts,
    default_window,
    extract_hashtags,
    format_timestamp,
    load_records,
    parse_record_line,
    parse_timestamp,
    record_to_json,
    window_bounds,
)

# epoch second of 2020-03-01T00:00:00Z, verified against the UTC calendar
MARCH_1_2020 = 1583020800


def test_parse_timestamp_accepts_epoch_forms():
    assert parse_timestamp(123) == 123
    assert parse_timestamp(" 123 ") == 123
    assert parse_timestamp("2.5") == 2
    assert parse_timestamp(2.9) == 2


def test_parse_timestamp_accepts_iso_forms():
    assert parse_timestamp("2020-03-01T00:00:00Z") == MARCH_1_2020
    assert parse_timestamp("2020-03-01 00:00:00") == MARCH_1_2020
    assert parse_timestamp("2020-03-01T01:00:00+01:00") == MARCH_1_2020


def test_parse_timestamp_rejects_garbage():
    for bad in ("not a date", None, [], "2020-13-40"):
        with pytest.raises(DataError):
            parse_timestamp(bad)


def test_timestamp_day_round_trip():
    assert format_timestamp(MARCH_1_2020) == "2020-03-01T00:00:00Z"
    assert day_of(MARCH_1_2020) == "2020-03-01"
    assert day_of(MARCH_1_2020 + DAY_SECONDS - 1) == "2020-03-01"
    assert day_to_ts("2020-03-01") == MARCH_1_2020


def test_window_bounds_is_inclusive_of_end_day():
    start, end = window_bounds("2020-03-01", "2020-03-02")
    assert start == MARCH_1_2020
    assert end == MARCH_1_2020 + 2 * DAY_SECONDS
    with pytest.raises(DataError):
        window_bounds("2020-03-02", "2020-03-01")


def test_default_window_spans_the_documented_days():
    start, end = default_window()
    assert day_of(start) == "2020-01-15"
    assert day_of(end - 1) == "2021-03-26"


def test_parse_record_line_full_record():
    line = (
        '{"id": 42, "user_id": "u9", "created_at": "2020-03-01T00:00:00Z",'
        ' "text": "hello", "label": "counter"}'
    )
    tid, uid, ts, text, label = parse_record_line(line)
    assert tid == "42"  # numeric ids are coerced to strings
    assert uid == "u9"
    assert ts == MARCH_1_2020
    assert text == "hello"
    assert label == TweetLabel.COUNTERSPEECH


def test_parse_record_line_label_optional():
    line = '{"id": "1", "user_id": "u", "created_at": 5, "text": "x"}'
    assert parse_record_line(line)[4] is None


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1, 2]",
        '{"user_id": "u", "created_at": 5, "text": "x"}',
        '{"id": " ", "user_id": "u", "created_at": 5, "text": "x"}',
        '{"id": "1", "user_id": "", "created_at": 5, "text": "x"}',
        '{"id": "1", "user_id": "u", "created_at": 5, "text": 7}',
        '{"id": "1", "user_id": "u", "created_at": 5, "text": "x", "label": "odd"}',
    ],
)
def test_parse_record_line_rejects_malformed(line):
    with pytest.raises(DataError):
        parse_record_line(line)


def test_record_to_json_sorted_keys_and_optional_label():
    rec = TweetRecord("1", "u", MARCH_1_2020, "hi")
    doc = record_to_json(rec)
    assert doc == '{"created_at": "2020-03-01T00:00:00Z", "id": "1", "text": "hi", "user_id": "u"}'
    rec.label = TweetLabel.HATE
    assert '"label": "hate"' in record_to_json(rec)


def test_load_records_round_trip(tmp_path):
    recs = [
        TweetRecord("1", "ua", 100, "see #Tag www.x.co @y", label=TweetLabel.NEUTRAL),
        TweetRecord("2", "ub", 200, "plain words"),
    ]
    path = tmp_path / "records.jsonl"
    path.write_text("".join(record_to_json(r) + "\n" for r in recs), encoding="utf-8")
    loaded = load_records(str(path))
    assert [(r.tweet_id, r.user_id, r.timestamp, r.text, r.label) for r in loaded] == [
        ("1", "ua", 100, "see #Tag www.x.co @y", TweetLabel.NEUTRAL),
        ("2", "ub", 200, "plain words", None),
    ]
    # derived counts are recomputed from the text on load
    assert loaded[0].hashtags == ["#tag"]
    assert loaded[0].urls == 1
    assert loaded[0].mentions == 1


def test_load_records_is_strict(tmp_path):
    path = tmp_path / "records.jsonl"
    path.write_text('{"id": "1", "user_id": "u", "created_at": 5, "text": "x"}\nbroken\n')
    with pytest.raises(DataError, match="records.jsonl:2"):
        load_records(str(path))
    with pytest.raises(DataError):
        load_records(str(tmp_path / "absent.jsonl"))


def test_label_parse_aliases():
    assert TweetLabel.parse("Counter") == TweetLabel.COUNTERSPEECH
    assert TweetLabel.parse(" HATE ") == TweetLabel.HATE
    assert TweetLabel.parse("neutral").wire_name == "neutral"
    with pytest.raises(DataError):
        TweetLabel.parse("mystery")


def test_text_counters():
    assert extract_hashtags("Stop #Hate now #hate") == ["#hate", "#hate"]
    assert count_urls("see https://x.co and www.y.org soon") == 2
    assert count_mentions("@a and @b_c plus embedded a@b") == 3
