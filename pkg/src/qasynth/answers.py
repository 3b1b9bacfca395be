"""Sub-clause extraction and answer-span location.

Answers are named entities that occur both in a statement sub-clause
and in the cited document; the document-side span is chosen by maximal
content-word overlap between its surrounding window and the statement.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .categories import mask_category
from .corpus import AnnotatedSentence, Document, Token, ROOT
from .textutil import DEFAULT_STOPWORDS, content_tokens, find_occurrences

# Dependency relations whose subtrees count as sub-clauses when the
# interchange supplies no clause spans: clausal complements, adverbial
# clauses and relative clauses, plus verbal conjuncts.
CLAUSAL_DEPRELS = {"ccomp", "xcomp", "advcl", "acl", "relcl", "acl:relcl"}
_VERBAL_POS = {"VERB", "AUX"}


@dataclass(frozen=True)
class AnswerCandidate:
    text: str
    ner_label: str
    mask_category: str
    statement_span: tuple[int, int]  # char offsets into the statement text
    clause: tuple[int, int]  # token range the candidate belongs to


@dataclass(frozen=True)
class AnswerSpan:
    char_start: int
    char_end: int
    text: str

    def check_against(self, context: str) -> None:
        """Enforce bit-exactness: the span text equals the context slice."""
        if context[self.char_start:self.char_end] != self.text:
            raise ValueError(
                f"answer span ({self.char_start}, {self.char_end}) does not "
                f"match context text"
            )


def _children_table(tokens: tuple[Token, ...]) -> list[list[int]]:
    children: list[list[int]] = [[] for _ in tokens]
    for tok in tokens:
        if tok.head != ROOT:
            children[tok.head].append(tok.index)
    return children


def subtree_indices(tokens: tuple[Token, ...], head: int) -> set[int]:
    children = _children_table(tokens)
    out = {head}
    stack = [head]
    while stack:
        node = stack.pop()
        for child in children[node]:
            if child not in out:
                out.add(child)
                stack.append(child)
    return out


def extract_subclauses(
    statement: AnnotatedSentence, min_tokens: int = 6
) -> list[tuple[int, int]]:
    """Token ranges of the statement's sub-clauses, shortest-first discarded.

    Uses the clause spans shipped with the sentence when present.
    Otherwise the root's full span plus the span of every subtree headed
    by a clausal relation is derived from the dependency tree.  Ranges
    shorter than ``min_tokens`` are dropped; survivors are sorted and may
    overlap.
    """
    if statement.clause_spans is not None:
        spans = list(statement.clause_spans)
    else:
        spans = [(0, len(statement.tokens))]
        for tok in statement.tokens:
            clausal = tok.deprel in CLAUSAL_DEPRELS or (
                tok.deprel == "conj" and tok.pos in _VERBAL_POS
            )
            if clausal:
                indices = subtree_indices(statement.tokens, tok.index)
                spans.append((min(indices), max(indices) + 1))
    unique = sorted(set(spans))
    return [(s, e) for s, e in unique if e - s >= min_tokens]


def decode_bio(tokens: tuple[Token, ...], start: int, end: int) -> list[tuple[int, int, str]]:
    """BIO-decode entity mentions inside a token range.

    Lenient: a dangling I- tag or a bare label opens a new mention.
    Returns (first_token, last_token, label) triples, inclusive bounds.
    """
    mentions = []
    current: tuple[int, int, str] | None = None
    for i in range(start, end):
        tag = tokens[i].ner
        if not tag or tag == "O":
            if current:
                mentions.append(current)
            current = None
            continue
        if tag.startswith("B-") or tag.startswith("I-"):
            prefix, label = tag[0], tag[2:]
        else:
            prefix, label = "B", tag
        if prefix == "I" and current and current[2] == label:
            current = (current[0], i, label)
        else:
            if current:
                mentions.append(current)
            current = (i, i, label)
    if current:
        mentions.append(current)
    return mentions


def extract_candidates(
    statement: AnnotatedSentence,
    clause: tuple[int, int],
    document: Document,
) -> list[AnswerCandidate]:
    """Entity mentions of the clause whose surface text also occurs in the document.

    Matching is case-insensitive; the candidate keeps the statement-side
    surface form and its grouped mask category.
    """
    start, end = clause
    if not (0 <= start < end <= len(statement.tokens)):
        raise ValueError(f"clause ({start}, {end}) outside statement bounds")
    doc_text = document.text
    candidates = []
    for first, last, label in decode_bio(statement.tokens, start, end):
        span = (statement.tokens[first].char_start, statement.tokens[last].char_end)
        text = statement.text[span[0]:span[1]]
        if not find_occurrences(text, doc_text):
            continue
        candidates.append(
            AnswerCandidate(
                text=text,
                ner_label=label,
                mask_category=mask_category(label),
                statement_span=span,
                clause=clause,
            )
        )
    return candidates


def locate_answer(
    document: Document,
    candidate: AnswerCandidate,
    statement: AnnotatedSentence,
    window: int = 10,
    stopwords: frozenset[str] = DEFAULT_STOPWORDS,
) -> AnswerSpan:
    """Pick the document occurrence whose surroundings best match the statement.

    Every case-insensitive occurrence is scored by the size of the
    intersection between the statement's content-token set and the
    content tokens of the ``window`` tokens on each side of the
    occurrence.  Ties go to the earliest occurrence.  The returned span
    carries the document's original casing.
    """
    occurrences = find_occurrences(candidate.text, document.text)
    if not occurrences:
        raise ValueError(f"answer {candidate.text!r} not in document")

    statement_set = content_tokens((t.text for t in statement.tokens), stopwords)
    doc_tokens = list(document.all_tokens())
    starts = [t.char_start for t in doc_tokens]
    ends = [t.char_end for t in doc_tokens]

    best: tuple[int, tuple[int, int]] | None = None
    for occ_start, occ_end in occurrences:
        # Tokens overlapping the occurrence delimit the window.
        first = bisect.bisect_right(ends, occ_start)
        last = bisect.bisect_left(starts, occ_end) - 1
        before = doc_tokens[max(0, first - window):first]
        after = doc_tokens[last + 1:last + 1 + window]
        window_set = content_tokens((t.text for t in before + after), stopwords)
        overlap = len(window_set & statement_set)
        if best is None or overlap > best[0]:
            best = (overlap, (occ_start, occ_end))

    span_start, span_end = best[1]
    span = AnswerSpan(span_start, span_end, document.text[span_start:span_end])
    span.check_against(document.text)
    return span
