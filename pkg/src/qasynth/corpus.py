"""Interchange loading, validation and corpus-quality filtering.

A corpus is a JSONL file of statement/document pairs.  Both sides carry
token-level annotations (offsets, dependency heads, relations, POS and
BIO entity tags).  Everything downstream trusts the invariants enforced
here, so the loader is strict: a line either yields a fully validated
pair or an error record naming the pair and the violated invariant.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .textutil import DEFAULT_STOPWORDS, content_tokens, words

logger = logging.getLogger(__name__)

ROOT = -1


class ValidationError(ValueError):
    """An interchange line violated a structural invariant."""


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    char_start: int
    char_end: int
    head: int  # parent token index, ROOT (-1) for the sentence root
    deprel: str
    pos: str
    ner: str


@dataclass(frozen=True)
class AnnotatedSentence:
    text: str
    tokens: tuple[Token, ...]
    clause_spans: tuple[tuple[int, int], ...] | None = None


@dataclass(frozen=True)
class Document:
    """Annotated text: sentences share one character space (``text``)."""

    text: str
    sentences: tuple[tuple[Token, ...], ...]

    def all_tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence

    def word_count(self) -> int:
        return sum(len(s) for s in self.sentences)


@dataclass(frozen=True)
class StatementDocPair:
    id: str
    statement: AnnotatedSentence
    document: Document
    meta: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class CorpusFilterConfig:
    max_doc_words: int = 1000
    relevance_missing_fraction: float = 0.5
    rouge2_threshold: float | None = None  # None -> caller computes the corpus median
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self):
        if not 0.0 <= self.relevance_missing_fraction <= 1.0:
            raise ValueError("relevance_missing_fraction must be in [0, 1]")
        if self.rouge2_threshold is not None and not 0.0 <= self.rouge2_threshold <= 1.0:
            raise ValueError("rouge2_threshold must be in [0, 1]")


@dataclass
class LoadError:
    line_no: int
    pair_id: str | None
    message: str


# ---------------------------------------------------------------------------
# Validation

def _check_tokens(tokens: Sequence[Token], owning_text: str, where: str) -> None:
    prev_end = -1
    for pos, tok in enumerate(tokens):
        if tok.index != pos:
            raise ValidationError(f"{where}: token index {tok.index} at position {pos}")
        if not tok.char_start < tok.char_end:
            raise ValidationError(f"{where}: empty offsets on token {pos}")
        if tok.char_end > len(owning_text):
            raise ValidationError(f"{where}: token {pos} offsets outside text")
        if owning_text[tok.char_start:tok.char_end] != tok.text:
            raise ValidationError(
                f"{where}: token {pos} text {tok.text!r} does not match offsets"
            )
        if tok.char_start < prev_end:
            raise ValidationError(f"{where}: token offsets overlap at token {pos}")
        prev_end = tok.char_end


def _check_tree(tokens: Sequence[Token], where: str) -> None:
    roots = [t.index for t in tokens if t.head == ROOT]
    if len(roots) != 1:
        raise ValidationError(f"{where}: expected exactly one root, found {len(roots)}")
    n = len(tokens)
    children: list[list[int]] = [[] for _ in range(n)]
    for tok in tokens:
        if tok.head == ROOT:
            continue
        if not 0 <= tok.head < n:
            raise ValidationError(f"{where}: head {tok.head} out of range on token {tok.index}")
        if tok.head == tok.index:
            raise ValidationError(f"{where}: head links not a tree (self-loop at {tok.index})")
        children[tok.head].append(tok.index)
    # BFS from the root; cycles and disconnected nodes both show up as
    # unreachable tokens.
    seen = {roots[0]}
    queue = [roots[0]]
    while queue:
        node = queue.pop()
        for child in children[node]:
            if child in seen:
                raise ValidationError(f"{where}: head links not a tree (cycle)")
            seen.add(child)
            queue.append(child)
    if len(seen) != n:
        raise ValidationError(f"{where}: head links not a tree (unreachable tokens)")


def validate_sentence(sentence: AnnotatedSentence, where: str = "statement") -> None:
    if not sentence.tokens:
        raise ValidationError(f"{where}: no tokens")
    _check_tokens(sentence.tokens, sentence.text, where)
    _check_tree(sentence.tokens, where)
    if sentence.clause_spans is not None:
        n = len(sentence.tokens)
        for start, end in sentence.clause_spans:
            if not (0 <= start < end <= n):
                raise ValidationError(f"{where}: clause span ({start}, {end}) out of bounds")


def validate_document(document: Document, where: str = "document") -> None:
    prev_end = -1
    for i, sentence in enumerate(document.sentences):
        label = f"{where}.sentence[{i}]"
        if not sentence:
            raise ValidationError(f"{label}: empty sentence")
        _check_tokens(sentence, document.text, label)
        _check_tree(sentence, label)
        if sentence[0].char_start < prev_end:
            raise ValidationError(f"{label}: overlaps previous sentence")
        prev_end = sentence[-1].char_end


def validate_pair(pair: StatementDocPair) -> None:
    validate_sentence(pair.statement)
    validate_document(pair.document)


# ---------------------------------------------------------------------------
# JSONL interchange

def _token_from_json(obj: dict) -> Token:
    return Token(
        index=obj["i"],
        text=obj["text"],
        char_start=obj["start"],
        char_end=obj["end"],
        head=obj["head"],
        deprel=obj["deprel"],
        pos=obj["pos"],
        ner=obj["ner"],
    )


def token_to_json(tok: Token) -> dict:
    return {
        "i": tok.index,
        "text": tok.text,
        "start": tok.char_start,
        "end": tok.char_end,
        "head": tok.head,
        "deprel": tok.deprel,
        "pos": tok.pos,
        "ner": tok.ner,
    }


def pair_from_json(obj: dict) -> StatementDocPair:
    statement_obj = obj["statement"]
    clauses = statement_obj.get("clauses")
    statement = AnnotatedSentence(
        text=statement_obj["text"],
        tokens=tuple(_token_from_json(t) for t in statement_obj["tokens"]),
        clause_spans=tuple((s, e) for s, e in clauses) if clauses is not None else None,
    )
    document_obj = obj["document"]
    document = Document(
        text=document_obj["text"],
        sentences=tuple(
            tuple(_token_from_json(t) for t in sent) for sent in document_obj["sentences"]
        ),
    )
    return StatementDocPair(
        id=obj["id"],
        statement=statement,
        document=document,
        meta=dict(obj.get("meta") or {}),
    )


def pair_to_json(pair: StatementDocPair) -> dict:
    statement: dict = {
        "text": pair.statement.text,
        "tokens": [token_to_json(t) for t in pair.statement.tokens],
    }
    if pair.statement.clause_spans is not None:
        statement["clauses"] = [list(span) for span in pair.statement.clause_spans]
    return {
        "id": pair.id,
        "statement": statement,
        "document": {
            "text": pair.document.text,
            "sentences": [[token_to_json(t) for t in sent] for sent in pair.document.sentences],
        },
        "meta": pair.meta,
    }


def load_pairs(
    path: str | Path,
    on_error: Callable[[LoadError], None] | None = None,
) -> Iterator[StatementDocPair]:
    """Yield validated pairs from a JSONL file, in file order.

    Invalid lines never abort the stream: each one produces a LoadError
    (malformed JSON, missing fields, or a violated invariant) delivered
    to ``on_error``; without a callback the error is logged.
    """

    def report(err: LoadError) -> None:
        if on_error is not None:
            on_error(err)
        else:
            logger.error("line %d (pair %s): %s", err.line_no, err.pair_id, err.message)

    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                report(LoadError(line_no, None, f"malformed JSON: {exc}"))
                continue
            pair_id = obj.get("id") if isinstance(obj, dict) else None
            try:
                pair = pair_from_json(obj)
                validate_pair(pair)
            except ValidationError as exc:
                report(LoadError(line_no, pair_id, str(exc)))
                continue
            except (KeyError, TypeError, AttributeError) as exc:
                report(LoadError(line_no, pair_id, f"schema error: {exc!r}"))
                continue
            yield pair


def write_pairs(pairs: Iterable[StatementDocPair], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(json.dumps(pair_to_json(pair), ensure_ascii=False) + "\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# ROUGE-2 (token-bigram F-measure with clipped multiset counts)

def _bigram_counts(tokens: list[str]) -> Counter:
    return Counter(zip(tokens, tokens[1:]))


def rouge2(candidate: str, reference: str) -> float:
    """Bigram-overlap F-measure between two raw strings.

    P = shared / candidate bigrams, R = shared / reference bigrams with
    shared counted as the clipped multiset intersection; F = 2PR/(P+R).
    Returns 0.0 whenever either side has no bigrams or nothing overlaps.
    Total and symmetric.
    """
    cand = _bigram_counts(words(candidate))
    ref = _bigram_counts(words(reference))
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 or ref_total == 0:
        return 0.0
    shared = sum((cand & ref).values())
    if shared == 0:
        return 0.0
    precision = shared / cand_total
    recall = shared / ref_total
    return 2.0 * precision * recall / (precision + recall)


def median_rouge2(pairs: Iterable[StatementDocPair]) -> float:
    """Exact median pair score (lower of the two middles for even counts)."""
    scores = sorted(rouge2(p.document.text, p.statement.text) for p in pairs)
    if not scores:
        raise ValueError("no pairs")
    mid = len(scores) // 2
    if len(scores) % 2 == 1:
        return scores[mid]
    return scores[mid - 1]


# ---------------------------------------------------------------------------
# Corpus gates

def truncate_document(document: Document, max_words: int) -> Document:
    """Clip a document to the last sentence boundary within ``max_words`` tokens.

    The surviving text is the original prefix up to the final kept
    token, so all retained annotation offsets stay valid.
    """
    kept: list[tuple[Token, ...]] = []
    used = 0
    for sentence in document.sentences:
        if used + len(sentence) > max_words:
            break
        kept.append(sentence)
        used += len(sentence)
    if len(kept) == len(document.sentences):
        return document
    if not kept:
        return Document(text="", sentences=())
    end = kept[-1][-1].char_end
    return Document(text=document.text[:end], sentences=tuple(kept))


def relevance_filter(pair: StatementDocPair, cfg: CorpusFilterConfig) -> bool:
    """Keep the pair unless too many statement content words miss the document.

    Statement tokens are lowercased, stripped of stopwords and
    deduplicated; the pair is discarded iff strictly more than
    ``relevance_missing_fraction`` of them are absent from the
    document's token set.  A statement with no content tokens at all is
    discarded: it cannot anchor a question.
    """
    statement_set = content_tokens(
        (t.text for t in pair.statement.tokens), cfg.stopwords
    )
    if not statement_set:
        return False
    document_set = content_tokens(
        (t.text for t in pair.document.all_tokens()), cfg.stopwords
    )
    missing = len(statement_set - document_set)
    return missing / len(statement_set) <= cfg.relevance_missing_fraction


@dataclass
class FilterReport:
    input_count: int = 0
    kept: int = 0
    truncated: int = 0
    discarded: dict[str, int] = field(
        default_factory=lambda: {"doc_words": 0, "relevance": 0, "rouge2": 0}
    )
    rouge2_threshold: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "input": self.input_count,
                "kept": self.kept,
                "truncated": self.truncated,
                "discarded": self.discarded,
                "rouge2_threshold": self.rouge2_threshold,
            },
            sort_keys=True,
        )


def corpus_filter(
    pairs: Iterable[StatementDocPair], cfg: CorpusFilterConfig
) -> tuple[list[StatementDocPair], FilterReport]:
    """Apply the quality gates in order: word cap, relevance, bigram correlation.

    The word cap truncates rather than discards; a pair is charged to the
    ``doc_words`` gate only when truncation leaves no complete sentence.
    Every discarded pair lands in exactly one gate count.
    """
    if cfg.rouge2_threshold is None:
        raise ValueError("rouge2_threshold unset; compute median_rouge2 first")
    report = FilterReport(rouge2_threshold=cfg.rouge2_threshold)
    kept: list[StatementDocPair] = []
    for pair in pairs:
        report.input_count += 1
        if pair.document.word_count() > cfg.max_doc_words:
            document = truncate_document(pair.document, cfg.max_doc_words)
            if not document.sentences:
                report.discarded["doc_words"] += 1
                continue
            pair = replace(pair, document=document)
            report.truncated += 1
        if not relevance_filter(pair, cfg):
            report.discarded["relevance"] += 1
            continue
        if rouge2(pair.document.text, pair.statement.text) < cfg.rouge2_threshold:
            report.discarded["rouge2"] += 1
            continue
        report.kept += 1
        kept.append(pair)
    return kept, report
