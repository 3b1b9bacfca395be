"""QA example assembly, SQuAD-1.1 serialization and dataset splitting.

The SQuAD file is the lingua franca between the engine, the trainer and
external scorers, so the writer emits exactly the 1.1 structure.
Provenance that SQuAD cannot carry (source pair, clause, category, NER
mentions) goes into a sidecar annex at ``<path>.meta.jsonl``; readers
treat the annex as optional.
"""

from __future__ import annotations

import hashlib
import json
import logging
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .answers import (
    AnswerSpan,
    decode_bio,
    extract_candidates,
    extract_subclauses,
    locate_answer,
)
from .corpus import StatementDocPair
from .questions import make_cloze, translate_drc, translate_identity, translate_noise

logger = logging.getLogger(__name__)

TRANSLATORS = ("identity", "noise", "drc")


@dataclass(frozen=True)
class Provenance:
    pair_id: str
    title: str
    clause: tuple[int, int] | None
    method: str
    generation: str = "original"
    category: str | None = None
    answer_is_ner: bool = True
    doc_mentions: tuple[str, ...] = ()


@dataclass(frozen=True)
class QAExample:
    id: str
    context: str
    question: str
    answer: AnswerSpan
    provenance: Provenance

    def __post_init__(self):
        self.answer.check_against(self.context)


@dataclass(frozen=True)
class DatasetSplit:
    initial: list[QAExample]
    parts: list[list[QAExample]]


@dataclass(frozen=True)
class BuildConfig:
    translator: str = "drc"
    min_clause_tokens: int = 6
    window: int = 10
    noise_p_drop: float = 0.1
    noise_k_window: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.translator not in TRANSLATORS:
            raise ValueError(f"unknown translator: {self.translator!r}")


def example_id(pair_id: str, clause: tuple[int, int], span: tuple[int, int]) -> str:
    """Stable id derived from provenance so later stages can reference originals."""
    key = f"{pair_id}\x1f{clause[0]}:{clause[1]}\x1f{span[0]}:{span[1]}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:16]


def _noise_seed(base_seed: int, ex_id: str) -> int:
    digest = hashlib.sha1(f"{base_seed}\x1f{ex_id}".encode("utf-8")).hexdigest()
    return int(digest[:12], 16)


def document_mentions(pair: StatementDocPair) -> tuple[str, ...]:
    """Entity mention surface strings of the pair (statement and document)."""
    mentions = []
    stmt = pair.statement
    for first, last, _label in decode_bio(stmt.tokens, 0, len(stmt.tokens)):
        mentions.append(stmt.text[stmt.tokens[first].char_start:stmt.tokens[last].char_end])
    for sentence in pair.document.sentences:
        for first, last, _label in decode_bio(sentence, 0, len(sentence)):
            mentions.append(pair.document.text[sentence[first].char_start:sentence[last].char_end])
    seen = set()
    unique = []
    for m in mentions:
        key = m.lower()
        if key not in seen:
            seen.add(key)
            unique.append(m)
    return tuple(unique)


def build_examples(
    pairs: Iterable[StatementDocPair], cfg: BuildConfig = BuildConfig()
) -> list[QAExample]:
    """Run clause -> candidate -> span -> cloze -> question for every kept pair.

    One example per (clause, candidate); per-example failures are logged
    and skipped, never aborting the stream.
    """
    out: list[QAExample] = []
    for pair in pairs:
        mentions = document_mentions(pair)
        title = pair.meta.get("title", pair.id)
        clauses = extract_subclauses(pair.statement, cfg.min_clause_tokens)
        if not clauses:
            logger.info("pair %s: no sub-clause of >= %d tokens", pair.id, cfg.min_clause_tokens)
            continue
        emitted = 0
        for clause in clauses:
            for candidate in extract_candidates(pair.statement, clause, pair.document):
                ex_id = example_id(pair.id, clause, candidate.statement_span)
                try:
                    span = locate_answer(pair.document, candidate, pair.statement, cfg.window)
                    cloze = make_cloze(pair.statement, clause, candidate)
                    if cfg.translator == "identity":
                        question = translate_identity(cloze)
                    elif cfg.translator == "noise":
                        question = translate_noise(
                            cloze,
                            cfg.noise_p_drop,
                            cfg.noise_k_window,
                            _noise_seed(cfg.seed, ex_id),
                        )
                    else:
                        question = translate_drc(cloze)
                    out.append(
                        QAExample(
                            id=ex_id,
                            context=pair.document.text,
                            question=question.text,
                            answer=span,
                            provenance=Provenance(
                                pair_id=pair.id,
                                title=title,
                                clause=clause,
                                method=cfg.translator,
                                category=candidate.mask_category,
                                doc_mentions=mentions,
                            ),
                        )
                    )
                    emitted += 1
                except ValueError as exc:
                    logger.warning("pair %s, candidate %r: %s", pair.id, candidate.text, exc)
        if emitted == 0:
            logger.info("pair %s: no candidate found in document", pair.id)
    return out


# ---------------------------------------------------------------------------
# SQuAD-1.1 serialization

def annex_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.jsonl")


def to_squad_json(examples: Sequence[QAExample], path: str | Path, write_annex: bool = True) -> None:
    """Write SQuAD-1.1 JSON, grouping examples by title and context.

    Duplicate ids abort before anything is written.  The provenance
    annex lands next to the file unless disabled.
    """
    seen: set[str] = set()
    for ex in examples:
        if ex.id in seen:
            raise ValueError(f"duplicate example id: {ex.id}")
        seen.add(ex.id)

    articles: dict[str, dict[str, list[QAExample]]] = {}
    for ex in examples:
        paragraphs = articles.setdefault(ex.provenance.title, {})
        paragraphs.setdefault(ex.context, []).append(ex)

    data = []
    for title, paragraphs in articles.items():
        data.append(
            {
                "title": title,
                "paragraphs": [
                    {
                        "context": context,
                        "qas": [
                            {
                                "id": ex.id,
                                "question": ex.question,
                                "answers": [
                                    {"text": ex.answer.text, "answer_start": ex.answer.char_start}
                                ],
                            }
                            for ex in group
                        ],
                    }
                    for context, group in paragraphs.items()
                ],
            }
        )
    payload = {"version": "1.1", "data": data}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True)
    if write_annex:
        with open(annex_path(path), "w", encoding="utf-8") as handle:
            for ex in examples:
                prov = ex.provenance
                handle.write(
                    json.dumps(
                        {
                            "id": ex.id,
                            "pair_id": prov.pair_id,
                            "title": prov.title,
                            "clause": list(prov.clause) if prov.clause else None,
                            "method": prov.method,
                            "generation": prov.generation,
                            "category": prov.category,
                            "answer_is_ner": prov.answer_is_ner,
                            "doc_mentions": list(prov.doc_mentions),
                        },
                        ensure_ascii=False,
                        sort_keys=True,
                    )
                    + "\n"
                )


def _provenance_from_annex(row: dict) -> Provenance:
    clause = row.get("clause")
    return Provenance(
        pair_id=row.get("pair_id", ""),
        title=row.get("title", ""),
        clause=tuple(clause) if clause else None,
        method=row.get("method", "unknown"),
        generation=row.get("generation", "original"),
        category=row.get("category"),
        answer_is_ner=row.get("answer_is_ner", True),
        doc_mentions=tuple(row.get("doc_mentions", ())),
    )


def read_squad_json(path: str | Path) -> list[QAExample]:
    """Load a SQuAD-1.1 file back into examples, re-validating every span.

    Provenance is restored from the annex when one sits next to the
    file; otherwise a minimal record names the title only.
    """
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    annex: dict[str, Provenance] = {}
    meta = annex_path(path)
    if meta.exists():
        with open(meta, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    row = json.loads(line)
                    annex[row["id"]] = _provenance_from_annex(row)

    examples = []
    for article in payload["data"]:
        title = article.get("title", "")
        for paragraph in article["paragraphs"]:
            context = paragraph["context"]
            for qa in paragraph["qas"]:
                answer = qa["answers"][0]
                start = answer["answer_start"]
                span = AnswerSpan(start, start + len(answer["text"]), answer["text"])
                provenance = annex.get(
                    qa["id"],
                    Provenance(pair_id="", title=title, clause=None, method="unknown"),
                )
                examples.append(
                    QAExample(
                        id=qa["id"],
                        context=context,
                        question=qa["question"],
                        answer=span,
                        provenance=provenance,
                    )
                )
    return examples


# ---------------------------------------------------------------------------
# Initial-pool / unseen-parts split

def sample_split(
    examples: Sequence[QAExample], initial_size: int, num_parts: int, seed: int = 0
) -> DatasetSplit:
    """Seeded uniform initial sample plus near-equal unseen parts.

    Part sizes differ by at most one; initial and parts are pairwise
    disjoint and cover the input exactly.
    """
    if initial_size > len(examples):
        raise ValueError(
            f"initial_size {initial_size} exceeds dataset size {len(examples)}"
        )
    if num_parts < 1:
        raise ValueError("num_parts must be >= 1")
    rng = random.Random(seed)
    chosen = set(rng.sample(range(len(examples)), initial_size))
    initial = [examples[i] for i in sorted(chosen)]
    rest = [ex for i, ex in enumerate(examples) if i not in chosen]
    base, extra = divmod(len(rest), num_parts)
    parts = []
    cursor = 0
    for k in range(num_parts):
        size = base + (1 if k < extra else 0)
        parts.append(rest[cursor:cursor + size])
        cursor += size
    return DatasetSplit(initial=initial, parts=parts)


def stamp_generation(example: QAExample, generation: str) -> QAExample:
    return replace(example, provenance=replace(example.provenance, generation=generation))
