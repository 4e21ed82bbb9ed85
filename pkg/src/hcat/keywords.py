"""Collection keyword set and the token-bounded matcher.

Matching rules
--------------
* Entries starting with ``#`` are hashtag keywords and match only whole
  hashtag tokens: ``#ChinaVirus`` matches the token ``#chinavirus`` but
  not ``#chinavirushoax2``.
* Bare single-word entries match whole word tokens anywhere in the
  text, including the body of a hashtag or a URL fragment.
* Multi-word entries match contiguous word-token sequences, so
  ``covid 19`` also matches the text ``covid-19``.
* All matching is case-insensitive; canonical entries are lowercased.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from hcat.errors import DataError

BUILTIN_TOKEN = "builtin"

# Word tokens keep internal apostrophes so contractions stay whole.
WORD_RE = re.compile(r"\w+(?:'\w+)*", re.UNICODE)
HASHTAG_RE = re.compile(r"#\w+", re.UNICODE)

_SECTION_ALIASES = {
    "covid": "covid",
    "covid-19": "covid",
    "hate": "hate",
    "counter": "counter",
    "counterspeech": "counter",
}


def tokenize_words(text: str) -> list[str]:
    """Lowercased word tokens (``\\w+`` runs) of *text*."""
    return [t.lower() for t in WORD_RE.findall(text)]


def tokenize_hashtags(text: str) -> list[str]:
    """Lowercased whole hashtag tokens (``#`` included) of *text*."""
    return [t.lower() for t in HASHTAG_RE.findall(text)]


@dataclass
class KeywordSet:
    """Canonicalized keyword lists in collection order: covid, hate, counter."""

    covid_terms: list[str] = field(default_factory=list)
    hate_terms: list[str] = field(default_factory=list)
    counter_terms: list[str] = field(default_factory=list)

    @property
    def entries(self) -> list[str]:
        return self.covid_terms + self.hate_terms + self.counter_terms

    def __len__(self) -> int:
        return len(self.covid_terms) + len(self.hate_terms) + len(self.counter_terms)

    def class_of(self, entry: str) -> str:
        if entry in self.covid_terms:
            return "covid"
        if entry in self.hate_terms:
            return "hate"
        if entry in self.counter_terms:
            return "counter"
        raise KeyError(entry)


def _canonicalize(groups: dict[str, list[str]]) -> KeywordSet:
    seen: set[str] = set()
    out: dict[str, list[str]] = {"covid": [], "hate": [], "counter": []}
    for cls in ("covid", "hate", "counter"):
        for raw in groups.get(cls, ()):
            entry = raw.strip().lower()
            if not entry or entry in seen:
                continue
            seen.add(entry)
            out[cls].append(entry)
    kw = KeywordSet(out["covid"], out["hate"], out["counter"])
    if len(kw) == 0:
        raise DataError("empty keyword set")
    return kw


def _parse_keyword_lines(lines) -> dict[str, list[str]]:
    groups: dict[str, list[str]] = {"covid": [], "hate": [], "counter": []}
    section = "covid"
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTION_ALIASES:
                raise DataError(f"unknown keyword section {name!r}")
            section = _SECTION_ALIASES[name]
            continue
        groups[section].append(line)
    return groups


def load_keywords(source: str = BUILTIN_TOKEN) -> KeywordSet:
    """Load a keyword set from a file path, or the bundled list for ``"builtin"``.

    The bundled list has exactly 42 entries. File entries default to the
    covid section until a ``[covid]``/``[hate]``/``[counter]`` header is
    seen; entries are lowercased and deduplicated preserving order.
    """
    if source == BUILTIN_TOKEN:
        text = resources.files("hcat.data").joinpath("keywords.txt").read_text("utf-8")
        return _canonicalize(_parse_keyword_lines(text.splitlines()))
    try:
        with open(source, encoding="utf-8") as fh:
            return _canonicalize(_parse_keyword_lines(fh))
    except OSError as exc:
        raise DataError(f"cannot read keyword file {source!r}: {exc}") from exc


class KeywordMatcher:
    """Compiled form of a :class:`KeywordSet` for repeated matching.

    Build one per run; ``match``/``counts`` then cost one tokenization
    pass per text.
    """

    def __init__(self, kw: KeywordSet):
        self.keyword_set = kw
        self.entries = kw.entries
        self._hashtag_entries: list[tuple[int, str]] = []
        self._phrase_entries: list[tuple[int, tuple[str, ...]]] = []
        for i, entry in enumerate(self.entries):
            if entry.startswith("#"):
                self._hashtag_entries.append((i, entry))
            else:
                self._phrase_entries.append((i, tuple(WORD_RE.findall(entry))))

    def counts(self, text: str) -> list[int]:
        """Occurrence count of every entry in *text*, in keyword-set order."""
        words = tokenize_words(text)
        tags = tokenize_hashtags(text)
        out = [0] * len(self.entries)
        for i, tag in self._hashtag_entries:
            out[i] = tags.count(tag)
        for i, phrase in self._phrase_entries:
            out[i] = _count_subsequence(words, phrase)
        return out

    def match(self, text: str) -> list[str]:
        """Entries occurring in *text*, in keyword-set order."""
        counts = self.counts(text)
        return [e for e, c in zip(self.entries, counts) if c > 0]


def _count_subsequence(tokens: list[str], phrase: tuple[str, ...]) -> int:
    if not phrase or len(phrase) > len(tokens):
        return 0
    first = phrase[0]
    width = len(phrase)
    n = 0
    for i, tok in enumerate(tokens):
        if tok == first and tuple(tokens[i : i + width]) == phrase:
            n += 1
    return n


def match_keywords(text: str, kw: KeywordSet) -> list[str]:
    """One-shot :meth:`KeywordMatcher.match` for *text* against *kw*."""
    return KeywordMatcher(kw).match(text)
