"""Shared text helpers: tokenization, stopwords, punctuation tests.

All comparison-oriented code in the package normalizes through these
functions so that the relevance filter, the overlap windows and the
bigram metric agree on what a "word" is.
"""

from __future__ import annotations

import re
from typing import Iterable

WORD_RE = re.compile(r"\w+", re.UNICODE)

# Default English stopword list.  Config surfaces accept a replacement;
# this one covers function words that would otherwise dominate the
# overlap measures.
DEFAULT_STOPWORDS = frozenset("""
a about above after again against all am an and any are aren't as at be
because been before being below between both but by can cannot could
couldn't did didn't do does doesn't doing don't down during each few for
from further had hadn't has hasn't have haven't having he he'd he'll he's
her here here's hers herself him himself his how how's i i'd i'll i'm
i've if in into is isn't it it's its itself let's me more most mustn't my
myself no nor not of off on once only or other ought our ours ourselves
out over own same shan't she she'd she'll she's should shouldn't so some
such than that that's the their theirs them themselves then there there's
these they they'd they'll they're they've this those through to too under
until up very was wasn't we we'd we'll we're we've were weren't what
what's when when's where where's which while who who's whom why why's
with won't would wouldn't you you'd you'll you're you've your yours
yourself yourselves
""".split())


def words(text: str) -> list[str]:
    """Lowercased word tokens of a raw string (used by the bigram metric)."""
    return [w.lower() for w in WORD_RE.findall(text)]


def normalize_token(text: str) -> str:
    """Lowercase and strip non-alphanumeric edges from an annotation token.

    Returns "" for tokens that carry no alphanumeric content at all
    (pure punctuation).
    """
    text = text.lower()
    start = 0
    end = len(text)
    while start < end and not text[start].isalnum():
        start += 1
    while end > start and not text[end - 1].isalnum():
        end -= 1
    return text[start:end]


def content_tokens(tokens: Iterable[str], stopwords: frozenset[str] | set[str]) -> set[str]:
    """Normalized token set with stopwords and punctuation-only tokens removed."""
    out = set()
    for tok in tokens:
        norm = normalize_token(tok)
        if norm and norm not in stopwords:
            out.add(norm)
    return out


def is_punctuation(token: str) -> bool:
    """True when the token contains no alphanumeric character."""
    return bool(token) and not any(ch.isalnum() for ch in token)


def find_occurrences(needle: str, haystack: str) -> list[tuple[int, int]]:
    """All (start, end) occurrences of needle in haystack, case-insensitive.

    Overlapping occurrences are included; spans index the original
    haystack so slices keep their original casing.
    """
    if not needle:
        return []
    pattern = re.compile("(?=(" + re.escape(needle) + "))", re.IGNORECASE)
    return [(m.start(1), m.start(1) + len(needle)) for m in pattern.finditer(haystack)]
