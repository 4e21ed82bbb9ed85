"""Bundled word lists: valence lexicon, pronouns, profanity, stopwords.

The sentiment scorer averages the valences of lexicon hits and maps the
mean from [-1, 1] to [0, 1]; texts with no hits score the neutral 0.5.
Tokens outside the lexicon never move the score.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from hcat.keywords import tokenize_words

PRONOUNS_FIRST_SINGULAR = frozenset({"i", "me", "my", "mine", "myself", "i'm", "i've", "i'll", "i'd"})
PRONOUNS_FIRST_PLURAL = frozenset({"we", "us", "our", "ours", "ourselves", "we're", "we've", "we'll"})
PRONOUNS_SECOND = frozenset({"you", "your", "yours", "yourself", "yourselves", "you're", "you've", "you'll"})
PRONOUNS_THIRD = frozenset(
    {"he", "him", "his", "she", "her", "hers", "they", "them", "their", "theirs", "it", "its", "it's", "he's", "she's", "they're"}
)

NEGATIONS = frozenset(
    {
        "no", "not", "never", "none", "nothing", "nobody", "neither", "nor", "cannot",
        "can't", "don't", "doesn't", "didn't", "won't", "wouldn't", "shouldn't",
        "couldn't", "isn't", "aren't", "wasn't", "weren't", "ain't",
    }
)

INTENSIFIERS = frozenset(
    {"very", "so", "really", "extremely", "totally", "absolutely", "completely", "utterly", "highly", "super"}
)

PROFANITY = frozenset(
    {
        "damn", "hell", "shit", "fuck", "fucking", "fucked", "crap", "ass", "asshole",
        "bitch", "bastard", "piss", "pissed", "dick", "sucks", "wtf", "stfu", "bullshit",
    }
)

STOPWORDS = frozenset(
    {
        "a", "an", "the", "and", "or", "but", "if", "then", "than", "that", "this",
        "these", "those", "is", "are", "was", "were", "be", "been", "being", "am",
        "do", "does", "did", "have", "has", "had", "of", "in", "on", "at", "to",
        "for", "from", "with", "by", "as", "it", "its", "i", "you", "he", "she",
        "we", "they", "them", "his", "her", "their", "my", "your", "our", "me",
        "us", "will", "would", "can", "could", "should", "about", "what", "which", "who",
    }
)


@lru_cache(maxsize=1)
def valence_lexicon() -> dict[str, float]:
    """word -> valence in [-1, 1], from the bundled lexicon file."""
    text = resources.files("hcat.data").joinpath("sentiment_lexicon.txt").read_text("utf-8")
    out: dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        word, _, val = line.partition("\t")
        out[word.strip().lower()] = float(val)
    return out


def sentiment_hits(tokens: list[str]) -> tuple[int, int]:
    """(positive hit count, negative hit count) over word tokens."""
    lex = valence_lexicon()
    pos = neg = 0
    for tok in tokens:
        v = lex.get(tok)
        if v is None:
            continue
        if v > 0:
            pos += 1
        elif v < 0:
            neg += 1
    return pos, neg


def sentiment_score(text: str) -> float:
    """Lexicon-average sentiment of *text*, in [0, 1]; 0.5 means no signal."""
    lex = valence_lexicon()
    vals = [lex[tok] for tok in tokenize_words(text) if tok in lex]
    if not vals:
        return 0.5
    return 0.5 + 0.5 * (sum(vals) / len(vals))
