"""Feature extractors for the tweet classifiers.

Two schemas:

* ``hashtag-42``: per-keyword occurrence counts, one slot per entry of
  the 42-entry collection keyword list, in keyword-set order.
* ``linguistic-90``: a fixed 90-slot schema of stylistic, metadata and
  psycholinguistic measurements, laid out below. Ratios are 0 when the
  denominator is 0.

Linguistic slot layout
----------------------
::

     0 n_chars              raw character count, len(text)
     1 n_words              word tokens (see hcat.keywords.WORD_RE)
     2 n_sentences          [.!?]+-delimited segments containing a word
     3 n_upper_chars        4 n_lower_chars        5 n_digit_chars
     6 n_space_chars        7 n_punct_chars        8 n_exclamations
     9 n_questions         10 n_periods           11 n_commas
    12 n_quote_chars       13 n_urls              14 n_mentions
    15 n_hashtags          16 n_emoji             17 n_elongated_words
    18 n_allcaps_words     19 n_unique_words      20 n_stopwords
    21 upper_ratio         22 digit_ratio         23 punct_ratio
    24 space_ratio         25 mean_word_len       26 std_word_len
    27 max_word_len        28 min_word_len        29 mean_sentence_words
    30 std_sentence_words  31 max_sentence_words  32 type_token_ratio
    33 chars_per_word      34 words_per_sentence  35 allcaps_word_ratio
    36 elongated_ratio     37 stopword_ratio      38 hashtag_token_ratio
    39 mention_token_ratio
    40 n_first_singular    41 n_first_plural      42 n_second_person
    43 n_third_person      44 n_profanity         45 n_positive_lex
    46 n_negative_lex      47 sentiment_score     48 first_singular_ratio
    49 first_plural_ratio  50 second_person_ratio 51 third_person_ratio
    52 profanity_ratio     53 positive_ratio      54 negative_ratio
    55 n_negations         56 negation_ratio      57 n_intensifiers
    58 intensifier_ratio
    59..73 word-length histogram: counts of words of length 1..14, then >=15
    74..79 sentence-length histogram (words/sentence): 1-5, 6-10, 11-15,
           16-20, 21-30, >=31
    80 n_semicolons        81 n_colons            82 n_hyphens
    83 n_parens            84 n_asterisks         85 n_slashes
    86 n_ellipses          87 n_repeated_punct    88 n_numeric_tokens
    89 numeric_token_ratio

Character-class counts are over the raw text, so URL and hashtag bodies
contribute to word statistics; all slots are deterministic per input.
"""

from __future__ import annotations

import math
import re
import string
from dataclasses import dataclass

import numpy as np

from hcat import lexicon
from hcat.errors import SchemaError
from hcat.keywords import HASHTAG_RE, KeywordMatcher, KeywordSet, tokenize_words
from hcat.records import MENTION_RE, URL_RE

HASHTAG_SCHEMA_ID = "hashtag-42"
HASHTAG_DIM = 42
LINGUISTIC_SCHEMA_ID = "linguistic-90"
LINGUISTIC_DIM = 90
COMBINED_SCHEMA_ID = "combined-132"
COMBINED_DIM = HASHTAG_DIM + LINGUISTIC_DIM

EMOJI_RE = re.compile(
    "[\U0001F300-\U0001F6FF\U0001F900-\U0001FAFF☀-⛿✀-➿]"
)
ELONGATED_RE = re.compile(r"(\w)\1{2,}")
ELLIPSIS_RE = re.compile(r"\.\.\.")
REPEATED_PUNCT_RE = re.compile(r"[!?]{2,}")
SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")

_PUNCT_CHARS = set(string.punctuation)

_SENTENCE_BINS = ((1, 5), (6, 10), (11, 15), (16, 20), (21, 30), (31, math.inf))


@dataclass
class FeatureVector:
    values: np.ndarray
    schema_id: str

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(self.values)):
            raise SchemaError(f"non-finite feature values under schema {self.schema_id}")


def extract_hashtag_features(text: str, kw: KeywordSet | KeywordMatcher) -> FeatureVector:
    """Occurrence count of each of the 42 keywords, token-bounded."""
    matcher = kw if isinstance(kw, KeywordMatcher) else KeywordMatcher(kw)
    if len(matcher.entries) != HASHTAG_DIM:
        raise SchemaError(
            f"hashtag schema needs {HASHTAG_DIM} keywords, got {len(matcher.entries)}"
        )
    return FeatureVector(np.array(matcher.counts(text), dtype=np.float64), HASHTAG_SCHEMA_ID)


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def extract_linguistic_features(text: str) -> FeatureVector:
    """The 90-slot stylistic/metadata/psycholinguistic vector for *text*."""
    v = np.zeros(LINGUISTIC_DIM, dtype=np.float64)
    words = tokenize_words(text)
    n_chars = len(text)
    n_words = len(words)

    sentences = [s for s in SENTENCE_SPLIT_RE.split(text) if tokenize_words(s)]
    sent_lens = [len(tokenize_words(s)) for s in sentences]

    v[0] = n_chars
    v[1] = n_words
    v[2] = len(sentences)
    v[3] = sum(c.isupper() for c in text)
    v[4] = sum(c.islower() for c in text)
    v[5] = sum(c.isdigit() for c in text)
    v[6] = sum(c.isspace() for c in text)
    v[7] = sum(c in _PUNCT_CHARS for c in text)
    v[8] = text.count("!")
    v[9] = text.count("?")
    v[10] = text.count(".")
    v[11] = text.count(",")
    v[12] = text.count("'") + text.count('"')
    v[13] = len(URL_RE.findall(text))
    v[14] = len(MENTION_RE.findall(text))
    v[15] = len(HASHTAG_RE.findall(text))
    v[16] = len(EMOJI_RE.findall(text))
    n_elong = sum(1 for w in words if ELONGATED_RE.search(w))
    v[17] = n_elong
    # all-caps detection needs the raw (uncased) tokens
    raw_words = re.findall(r"\w+(?:'\w+)*", text)
    n_caps = sum(1 for w in raw_words if len(w) >= 2 and w.isupper())
    v[18] = n_caps
    v[19] = len(set(words))
    n_stop = sum(1 for w in words if w in lexicon.STOPWORDS)
    v[20] = n_stop

    v[21] = _ratio(v[3], n_chars)
    v[22] = _ratio(v[5], n_chars)
    v[23] = _ratio(v[7], n_chars)
    v[24] = _ratio(v[6], n_chars)
    wlens = [len(w) for w in words]
    if wlens:
        v[25] = float(np.mean(wlens))
        v[26] = float(np.std(wlens))
        v[27] = max(wlens)
        v[28] = min(wlens)
    if sent_lens:
        v[29] = float(np.mean(sent_lens))
        v[30] = float(np.std(sent_lens))
        v[31] = max(sent_lens)
    v[32] = _ratio(v[19], n_words)
    v[33] = _ratio(n_chars, n_words)
    v[34] = _ratio(n_words, len(sentences))
    v[35] = _ratio(n_caps, n_words)
    v[36] = _ratio(n_elong, n_words)
    v[37] = _ratio(n_stop, n_words)
    v[38] = _ratio(v[15], n_words)
    v[39] = _ratio(v[14], n_words)

    n_1sg = sum(1 for w in words if w in lexicon.PRONOUNS_FIRST_SINGULAR)
    n_1pl = sum(1 for w in words if w in lexicon.PRONOUNS_FIRST_PLURAL)
    n_2nd = sum(1 for w in words if w in lexicon.PRONOUNS_SECOND)
    n_3rd = sum(1 for w in words if w in lexicon.PRONOUNS_THIRD)
    n_prof = sum(1 for w in words if w in lexicon.PROFANITY)
    n_pos, n_neg = lexicon.sentiment_hits(words)
    v[40] = n_1sg
    v[41] = n_1pl
    v[42] = n_2nd
    v[43] = n_3rd
    v[44] = n_prof
    v[45] = n_pos
    v[46] = n_neg
    v[47] = lexicon.sentiment_score(text)
    v[48] = _ratio(n_1sg, n_words)
    v[49] = _ratio(n_1pl, n_words)
    v[50] = _ratio(n_2nd, n_words)
    v[51] = _ratio(n_3rd, n_words)
    v[52] = _ratio(n_prof, n_words)
    v[53] = _ratio(n_pos, n_words)
    v[54] = _ratio(n_neg, n_words)
    n_negat = sum(1 for w in words if w in lexicon.NEGATIONS)
    v[55] = n_negat
    v[56] = _ratio(n_negat, n_words)
    n_intens = sum(1 for w in words if w in lexicon.INTENSIFIERS)
    v[57] = n_intens
    v[58] = _ratio(n_intens, n_words)

    for length in wlens:
        v[59 + min(length, 15) - 1] += 1
    for slen in sent_lens:
        for b, (lo, hi) in enumerate(_SENTENCE_BINS):
            if lo <= slen <= hi:
                v[74 + b] += 1
                break

    v[80] = text.count(";")
    v[81] = text.count(":")
    v[82] = text.count("-")
    v[83] = text.count("(") + text.count(")")
    v[84] = text.count("*")
    v[85] = text.count("/")
    v[86] = len(ELLIPSIS_RE.findall(text))
    v[87] = len(REPEATED_PUNCT_RE.findall(text))
    n_numeric = sum(1 for w in words if w.isdigit())
    v[88] = n_numeric
    v[89] = _ratio(n_numeric, n_words)

    return FeatureVector(v, LINGUISTIC_SCHEMA_ID)


def extract_combined_features(text: str, kw: KeywordSet | KeywordMatcher) -> FeatureVector:
    """Concatenation of hashtag and linguistic features (ensemble option)."""
    h = extract_hashtag_features(text, kw)
    l = extract_linguistic_features(text)
    return FeatureVector(np.concatenate([h.values, l.values]), COMBINED_SCHEMA_ID)


class FeatureExtractor:
    """Named extractor dispatch: ``hashtag``, ``linguistic`` or ``combined``."""

    def __init__(self, name: str, kw: KeywordSet | None = None):
        if name not in ("hashtag", "linguistic", "combined"):
            raise SchemaError(f"unknown feature set {name!r}")
        if name in ("hashtag", "combined") and kw is None:
            raise SchemaError(f"feature set {name!r} needs a keyword set")
        self.name = name
        self._matcher = KeywordMatcher(kw) if kw is not None else None
        self.schema_id = {
            "hashtag": HASHTAG_SCHEMA_ID,
            "linguistic": LINGUISTIC_SCHEMA_ID,
            "combined": COMBINED_SCHEMA_ID,
        }[name]
        self.dim = {"hashtag": HASHTAG_DIM, "linguistic": LINGUISTIC_DIM, "combined": COMBINED_DIM}[name]

    def __call__(self, text: str) -> FeatureVector:
        if self.name == "hashtag":
            return extract_hashtag_features(text, self._matcher)
        if self.name == "linguistic":
            return extract_linguistic_features(text)
        return extract_combined_features(text, self._matcher)
