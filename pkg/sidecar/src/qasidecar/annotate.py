"""Heuristic text annotation: tokens, sentence split, parse, entities.

Produces the interchange JSONL the synthesis engine ingests.  The
annotators here are deliberately small and deterministic (regex
tokenizer, rule-based head attachment with a validity repair pass,
cue-list entity tagger) so the whole loop runs anywhere; swapping in a
real parser or tagger only has to preserve the output schema.  Model
identifiers are pinned into each pair's meta block.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

ROOT = -1
PARSER_ID = "heuristic-arc-v1"
NER_ID = "heuristic-ner-v1"

TOKEN_RE = re.compile(r"\d+(?:[,.]\d+)*|[A-Za-z_]+(?:'[A-Za-z]+)?|\S")
SENTENCE_END_RE = re.compile(r"(?<=[.!?])\s+")

DETERMINERS = {"a", "an", "the", "this", "that", "these", "those", "his", "her",
               "its", "their", "our", "my", "your"}
PREPOSITIONS = {"in", "on", "at", "to", "for", "of", "by", "with", "from", "near",
                "into", "over", "under", "after", "before", "during", "across"}
AUXILIARIES = {"is", "are", "was", "were", "be", "been", "being", "has", "have",
               "had", "will", "would", "can", "could", "may", "might", "shall",
               "should", "must", "do", "does", "did"}
PRONOUNS = {"he", "she", "it", "they", "we", "i", "you", "who", "which", "that"}
CONJUNCTIONS = {"and", "or", "but", "nor", "so", "yet"}
COMMON_VERBS = {"said", "say", "says", "made", "make", "makes", "found", "founded",
                "opened", "open", "opens", "moved", "move", "moves", "joined",
                "join", "joins", "sold", "sell", "sells", "announced", "announce",
                "released", "release", "premiered", "crashed", "finished",
                "started", "start", "starts", "revealed", "reveal", "expanded",
                "wrote", "write", "writes", "directed", "direct", "directs",
                "became", "become", "becomes", "won", "win", "wins", "escaped",
                "established", "covered", "kept", "survive", "ran", "runs",
                "linked", "stayed", "arrived", "visited", "went", "grew"}
MONTHS = {"january", "february", "march", "april", "may", "june", "july",
          "august", "september", "october", "november", "december"}
ORG_SUFFIXES = {"motors", "studios", "press", "rail", "labs", "works", "foundry",
                "society", "inc", "corp", "ltd", "university", "institute",
                "company", "agency", "committee", "club", "city"}
PLACE_NAMES = {"lisbon", "toronto", "kyoto", "oslo", "valencia", "brisbane",
               "tallinn", "quito", "paris", "london", "shanghai", "california",
               "portugal", "chicago"}
# Words that start sentences often enough that a leading capital alone
# should not make them an entity.
SENTENCE_STARTERS = (DETERMINERS | PREPOSITIONS | AUXILIARIES | PRONOUNS
                     | CONJUNCTIONS | COMMON_VERBS
                     | {"records", "archives", "reports", "according", "later",
                        "several", "local", "historians", "new", "however"})


@dataclass
class RawToken:
    text: str
    start: int
    end: int
    pos: str = "X"
    head: int = ROOT
    deprel: str = "dep"
    ner: str = "O"


def tokenize(text: str, base: int = 0) -> list[RawToken]:
    return [
        RawToken(m.group(0), base + m.start(), base + m.end())
        for m in TOKEN_RE.finditer(text)
    ]


def split_sentences(text: str) -> list[tuple[int, int]]:
    """Character ranges of sentences; always covers all non-space text."""
    spans = []
    start = 0
    for match in SENTENCE_END_RE.finditer(text):
        spans.append((start, match.start()))
        start = match.end()
    if start < len(text):
        spans.append((start, len(text)))
    return [(s, e) for s, e in spans if text[s:e].strip()]


def _is_number(text: str) -> bool:
    return bool(re.fullmatch(r"\d+(?:[,.]\d+)*", text))


def tag_pos(tokens: list[RawToken]) -> None:
    for i, tok in enumerate(tokens):
        lower = tok.text.lower()
        if not any(ch.isalnum() for ch in tok.text):
            tok.pos = "PUNCT"
        elif _is_number(tok.text):
            tok.pos = "NUM"
        elif lower in DETERMINERS:
            tok.pos = "DET"
        elif lower in PREPOSITIONS:
            tok.pos = "ADP"
        elif lower in AUXILIARIES:
            tok.pos = "AUX"
        elif lower in PRONOUNS:
            tok.pos = "PRON"
        elif lower in CONJUNCTIONS:
            tok.pos = "CCONJ"
        elif lower in COMMON_VERBS or (lower.endswith(("ed", "ing")) and not tok.text[0].isupper()):
            tok.pos = "VERB"
        elif tok.text[0].isupper() and (i > 0 or lower not in SENTENCE_STARTERS):
            tok.pos = "PROPN"
        else:
            tok.pos = "NOUN"


def attach_heads(tokens: list[RawToken]) -> None:
    """Rule-based attachment followed by a repair pass guaranteeing a tree."""
    n = len(tokens)
    root = next((i for i, t in enumerate(tokens) if t.pos == "VERB"),
                next((i for i, t in enumerate(tokens) if t.pos != "PUNCT"), 0))

    def nearest_left(index, kinds):
        for j in range(index - 1, -1, -1):
            if tokens[j].pos in kinds:
                return j
        return root

    def nearest_right(index, kinds, limit=4):
        for j in range(index + 1, min(n, index + 1 + limit)):
            if tokens[j].pos in kinds:
                return j
        return root

    for i, tok in enumerate(tokens):
        if i == root:
            tok.head, tok.deprel = ROOT, "root"
            continue
        if tok.pos == "PUNCT":
            tok.head, tok.deprel = root, "punct"
        elif tok.pos == "DET":
            tok.head, tok.deprel = nearest_right(i, {"NOUN", "PROPN", "NUM"}), "det"
        elif tok.pos == "ADP":
            tok.head, tok.deprel = nearest_left(i, {"VERB", "NOUN", "PROPN"}), "prep"
        elif tok.pos == "PROPN" and i > 0 and tokens[i - 1].pos == "PROPN":
            tok.head, tok.deprel = i - 1, "flat"
        elif tok.pos in ("NOUN", "PROPN"):
            left = nearest_left(i, {"ADP", "VERB"})
            tok.head = left
            tok.deprel = "pobj" if tokens[left].pos == "ADP" else (
                "nsubj" if i < root else "dobj"
            )
        elif tok.pos == "NUM":
            if i > 0 and tokens[i - 1].pos in ("PROPN", "NOUN", "NUM"):
                tok.head, tok.deprel = i - 1, "nummod"
            else:
                tok.head, tok.deprel = nearest_left(i, {"ADP", "VERB"}), "pobj"
        elif tok.pos == "AUX":
            tok.head, tok.deprel = nearest_right(i, {"VERB"}), "aux"
        elif tok.pos == "PRON":
            tok.head, tok.deprel = root, "nsubj" if i < root else "dep"
        elif tok.pos == "VERB":
            tok.head, tok.deprel = root, "conj"
        elif tok.pos == "CCONJ":
            tok.head, tok.deprel = root, "cc"
        else:
            tok.head, tok.deprel = root, "dep"

    _repair_tree(tokens, root)


def _repair_tree(tokens: list[RawToken], root: int) -> None:
    """Reattach anything cyclic, self-looped or unreachable to the root."""
    n = len(tokens)
    for i, tok in enumerate(tokens):
        if i != root and (tok.head == ROOT or tok.head == i or not 0 <= tok.head < n):
            tok.head, tok.deprel = root, "dep"
    children = [[] for _ in range(n)]
    for i, tok in enumerate(tokens):
        if i != root:
            children[tok.head].append(i)
    reachable = {root}
    frontier = [root]
    while frontier:
        node = frontier.pop()
        for child in children[node]:
            if child not in reachable:
                reachable.add(child)
                frontier.append(child)
    for i, tok in enumerate(tokens):
        if i not in reachable:
            tok.head, tok.deprel = root, "dep"


def tag_entities(tokens: list[RawToken], sentence_start: bool = True) -> None:
    """Cue-list entity runs: capitalized spans, dates, amounts."""
    n = len(tokens)
    i = 0
    while i < n:
        tok = tokens[i]
        lower = tok.text.lower()
        # Month (+ year) dates.
        if lower in MONTHS:
            end = i + 1
            if end < n and re.fullmatch(r"(1[89]|20)\d\d", tokens[end].text):
                end += 1
            _mark(tokens, i, end, "DATE")
            i = end
            continue
        if re.fullmatch(r"(1[89]|20)\d\d", tok.text):
            _mark(tokens, i, i + 1, "DATE")
            i += 1
            continue
        if _is_number(tok.text):
            label = "MONEY" if ("," in tok.text or "." in tok.text) else "CARDINAL"
            _mark(tokens, i, i + 1, label)
            i += 1
            continue
        # Capitalized runs; a sentence-initial common word does not open one.
        if tok.pos == "PROPN" or (
            tok.text[:1].isupper()
            and tok.pos in ("NOUN",)
            and not (i == 0 and sentence_start and lower in SENTENCE_STARTERS)
        ):
            end = i + 1
            while end < n and tokens[end].pos == "PROPN":
                end += 1
            _mark(tokens, i, end, _label_for_run(tokens, i, end))
            i = end
            continue
        i += 1


def _label_for_run(tokens: list[RawToken], start: int, end: int) -> str:
    last = tokens[end - 1].text.lower()
    if last in ORG_SUFFIXES:
        return "ORG"
    if any(t.text.lower() in PLACE_NAMES for t in tokens[start:end]):
        return "GPE"
    if end - start >= 2:
        return "PERSON"
    return "PRODUCT"


def _mark(tokens: list[RawToken], start: int, end: int, label: str) -> None:
    tokens[start].ner = f"B-{label}"
    for i in range(start + 1, end):
        tokens[i].ner = f"I-{label}"


def annotate_sentence(text: str, base: int = 0, sentence_start: bool = True) -> list[RawToken]:
    tokens = tokenize(text, base)
    if not tokens:
        return []
    tag_pos(tokens)
    attach_heads(tokens)
    tag_entities(tokens, sentence_start)
    return tokens


def _token_json(tok: RawToken, index: int) -> dict:
    return {
        "i": index,
        "text": tok.text,
        "start": tok.start,
        "end": tok.end,
        "head": tok.head,
        "deprel": tok.deprel,
        "pos": tok.pos,
        "ner": tok.ner,
    }


def annotate_pair(raw: dict) -> dict:
    """Raw {id, statement, document, meta} -> one interchange object.

    The statement is parsed as a single sentence; the document is
    sentence-split with all offsets into the shared document text.
    Documents are emitted in full; length capping is the consumer's job.
    """
    statement_text = raw["statement"]
    statement_tokens = annotate_sentence(statement_text)
    if not statement_tokens:
        raise ValueError("statement produced no tokens")

    document_text = raw["document"]
    sentences = []
    for start, end in split_sentences(document_text):
        tokens = annotate_sentence(document_text[start:end], base=start)
        if tokens:
            sentences.append([_token_json(t, i) for i, t in enumerate(tokens)])
    if not sentences:
        raise ValueError("document produced no sentences")

    meta = dict(raw.get("meta") or {})
    meta.setdefault("parser", PARSER_ID)
    meta.setdefault("ner", NER_ID)
    return {
        "id": raw["id"],
        "statement": {
            "text": statement_text,
            "tokens": [_token_json(t, i) for i, t in enumerate(statement_tokens)],
        },
        "document": {"text": document_text, "sentences": sentences},
        "meta": meta,
    }


def annotate_file(input_path: str | Path, output_path: str | Path) -> tuple[int, int]:
    """Annotate a raw-pairs JSONL file; returns (written, skipped)."""
    written = skipped = 0
    with open(input_path, encoding="utf-8") as src, \
            open(output_path, "w", encoding="utf-8") as dst:
        for line_no, line in enumerate(src, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                annotated = annotate_pair(raw)
            except (ValueError, KeyError, TypeError) as exc:
                logger.warning("line %d skipped: %s", line_no, exc)
                skipped += 1
                continue
            dst.write(json.dumps(annotated, ensure_ascii=False) + "\n")
            written += 1
    return written, skipped
