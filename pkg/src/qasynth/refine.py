"""Iterative data refinement over a synthesized dataset.

The loop trains a predictor on an initial pool, then walks the unseen
parts one at a time: predictions above the confidence threshold either
confirm the original answer (kept as filtered data) or replace it
(refined data, with the question regenerated when possible).  Each part
emits one training batch combining both kinds at a fixed ratio, and the
threshold decays by a constant factor between parts.
"""

from __future__ import annotations

import logging
import random
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Protocol, Sequence

from .answers import AnswerCandidate, AnswerSpan
from .categories import mask_category
from .corpus import AnnotatedSentence
from .dataset import DatasetSplit, QAExample, stamp_generation
from .predictor import Predictor, PredictorTransportError
from .questions import make_cloze, translate_drc

logger = logging.getLogger(__name__)

QuestionRegenerator = Callable[[QAExample, AnswerSpan], Optional[str]]


class Relation(str, Enum):
    EQUAL = "Equal"
    OA_CONTAINS_PA = "OA_contains_PA"
    PA_CONTAINS_OA = "PA_contains_OA"
    OTHER = "Other"
    NO_PREDICTION = "NoPrediction"


class Verdict(str, Enum):
    FILTERED_KEEP = "FilteredKeep"
    REFINED = "Refined"
    DROPPED = "Dropped"


@dataclass(frozen=True)
class RefinementConfig:
    tau0: float = 0.15
    gamma: float = 0.9
    combine_ratio: tuple[int, int] = (1, 1)  # refined : filtered
    keep_if_substring: bool = True
    num_parts: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.tau0 <= 1.0:
            raise ValueError("tau0 must be in [0, 1]")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if min(self.combine_ratio) < 1:
            raise ValueError("combine_ratio parts must be positive")


@dataclass
class RefinementOutcome:
    example_id: str
    verdict: Verdict
    relation: Relation
    probability: float | None = None
    new_question: str | None = None
    new_answer: AnswerSpan | None = None
    note: str | None = None

    def to_json_obj(self, part: int) -> dict:
        new_answer = None
        if self.new_answer is not None:
            new_answer = {
                "text": self.new_answer.text,
                "char_start": self.new_answer.char_start,
                "char_end": self.new_answer.char_end,
            }
        return {
            "type": "outcome",
            "part": part,
            "example_id": self.example_id,
            "verdict": self.verdict.value,
            "relation": self.relation.value,
            "probability": self.probability,
            "new_question": self.new_question,
            "new_answer": new_answer,
            "note": self.note,
        }


def classify_relation(original: AnswerSpan, predicted: AnswerSpan) -> Relation:
    """Containment relation between the original and predicted spans.

    Both spans must reference the same context; comparison is interval
    inclusion on character offsets, strict for the containment cases.
    """
    o = (original.char_start, original.char_end)
    p = (predicted.char_start, predicted.char_end)
    if o == p:
        return Relation.EQUAL
    if o[0] <= p[0] and p[1] <= o[1]:
        return Relation.OA_CONTAINS_PA
    if p[0] <= o[0] and o[1] <= p[1]:
        return Relation.PA_CONTAINS_OA
    return Relation.OTHER


# ---------------------------------------------------------------------------
# Question regeneration

class ClauseQuestionRegenerator:
    """Rebuild a question around a new answer using the source clause.

    Backed by an index from example id to (statement, clause, original
    category).  When the predicted text occurs in the clause at token
    boundaries, the clause is re-masked there and run through the
    dependency reconstruction translator; otherwise None is returned and
    the caller keeps the original question.
    """

    def __init__(self, index: dict[str, tuple[AnnotatedSentence, tuple[int, int], str | None]]):
        self.index = index

    def __call__(self, example: QAExample, predicted: AnswerSpan) -> Optional[str]:
        entry = self.index.get(example.id)
        if entry is None:
            return None
        statement, clause, original_category = entry
        located = self._find_in_clause(statement, clause, predicted.text)
        if located is None:
            return None
        span, token_range = located
        label = self._span_label(statement, token_range)
        category = mask_category(label) if label else (original_category or "THING")
        candidate = AnswerCandidate(
            text=statement.text[span[0]:span[1]],
            ner_label=label or "",
            mask_category=category,
            statement_span=span,
            clause=clause,
        )
        try:
            cloze = make_cloze(statement, clause, candidate)
            return translate_drc(cloze).text
        except ValueError as exc:
            logger.warning("regeneration failed for %s: %s", example.id, exc)
            return None

    @staticmethod
    def _span_label(statement: AnnotatedSentence, token_range: tuple[int, int]) -> str | None:
        """Entity label governing the span: the head token's tag, else the first tag.

        The head token (the one attached outside the span) is what the
        mask node inherits, so its entity type names the new category.
        """
        tokens = statement.tokens
        span = set(range(*token_range))

        def tag(i: int) -> str | None:
            ner = tokens[i].ner
            return None if ner in ("", "O") else ner.split("-", 1)[-1]

        for i in range(*token_range):
            if tokens[i].head not in span and tag(i):
                return tag(i)
        for i in range(*token_range):
            if tag(i):
                return tag(i)
        return None

    @staticmethod
    def _find_in_clause(
        statement: AnnotatedSentence, clause: tuple[int, int], text: str
    ) -> tuple[tuple[int, int], tuple[int, int]] | None:
        """First token-aligned, case-insensitive occurrence of text in the clause."""
        from .textutil import find_occurrences

        tokens = statement.tokens
        starts = {tokens[i].char_start: i for i in range(*clause)}
        ends = {tokens[i].char_end: i for i in range(*clause)}
        for occ_start, occ_end in find_occurrences(text, statement.text):
            if occ_start in starts and occ_end in ends:
                return (occ_start, occ_end), (starts[occ_start], ends[occ_end] + 1)
        return None


# ---------------------------------------------------------------------------
# Algorithm core

def _predict_with_retry(
    predictor: Predictor,
    example: QAExample,
    attempts: int,
    base_delay: float,
):
    last_error = None
    for attempt in range(attempts):
        try:
            return predictor.predict(example.context, example.question), None
        except PredictorTransportError as exc:
            last_error = exc
            if attempt + 1 < attempts:
                time.sleep(base_delay * (2 ** attempt))
    return None, str(last_error)


def refine_part(
    part: Sequence[QAExample],
    predictor: Predictor,
    tau: float,
    qgen: QuestionRegenerator | None = None,
    *,
    keep_if_substring: bool = True,
    workers: int = 1,
    retry_attempts: int = 3,
    retry_base_delay: float = 0.1,
) -> tuple[list[QAExample], list[QAExample], list[RefinementOutcome]]:
    """Classify one unseen part against the current predictor.

    Per example: no prediction or probability below tau drops it; a
    prediction equal to the original answer keeps it as filtered data,
    as does a prediction strictly inside the original answer when
    ``keep_if_substring`` is set; anything else becomes refined data
    with the predicted span as the new answer and, when the regenerator
    can anchor that span in the source clause, a rebuilt question.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must be in [0, 1]")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            predictions = list(
                pool.map(
                    lambda ex: _predict_with_retry(predictor, ex, retry_attempts, retry_base_delay),
                    part,
                )
            )
    else:
        predictions = [
            _predict_with_retry(predictor, ex, retry_attempts, retry_base_delay) for ex in part
        ]

    refined: list[QAExample] = []
    filtered: list[QAExample] = []
    outcomes: list[RefinementOutcome] = []
    for example, (prediction, error) in zip(part, predictions):
        if prediction is None:
            outcomes.append(
                RefinementOutcome(
                    example.id, Verdict.DROPPED, Relation.NO_PREDICTION, note=error
                )
            )
            continue
        relation = classify_relation(example.answer, prediction.span)
        if prediction.probability < tau:
            outcomes.append(
                RefinementOutcome(
                    example.id, Verdict.DROPPED, relation, prediction.probability
                )
            )
            continue
        if relation is Relation.EQUAL or (
            keep_if_substring and relation is Relation.OA_CONTAINS_PA
        ):
            filtered.append(example)
            outcomes.append(
                RefinementOutcome(
                    example.id, Verdict.FILTERED_KEEP, relation, prediction.probability
                )
            )
            continue
        new_question = qgen(example, prediction.span) if qgen is not None else None
        question_text = new_question if new_question is not None else example.question
        provenance = replace(
            example.provenance,
            generation="refined",
            method="drc" if new_question is not None else example.provenance.method,
            answer_is_ner=_matches_mention(prediction.span.text, example.provenance.doc_mentions),
        )
        refined.append(
            replace(example, question=question_text, answer=prediction.span, provenance=provenance)
        )
        outcomes.append(
            RefinementOutcome(
                example.id,
                Verdict.REFINED,
                relation,
                prediction.probability,
                new_question=question_text,
                new_answer=prediction.span,
            )
        )
    return refined, filtered, outcomes


def _matches_mention(text: str, mentions: Sequence[str]) -> bool:
    if not mentions:
        # No mention inventory available: count the answer as NER-backed
        # rather than inflating the diversity measure.
        return True
    needle = text.lower().strip()
    return any(needle == m.lower().strip() for m in mentions)


def combine(
    refined: Sequence[QAExample],
    filtered: Sequence[QAExample],
    ratio: tuple[int, int] = (1, 1),
    rng: random.Random | None = None,
) -> list[QAExample]:
    """Merge refined and filtered data at the configured ratio.

    The larger side is truncated by a seeded uniform subsample so the
    counts match the ratio within one example, then the batch is
    shuffled.  An empty side passes the other through whole, with a
    warning.
    """
    rng = rng or random.Random(0)
    if not refined and not filtered:
        logger.warning("combine: both inputs empty, emitting empty batch")
        return []
    if not refined or not filtered:
        logger.warning(
            "combine: %s side empty, batch is %s data only",
            "refined" if not refined else "filtered",
            "filtered" if not refined else "refined",
        )
        batch = list(refined or filtered)
        rng.shuffle(batch)
        return batch
    r, f = ratio
    scale = min(len(refined) / r, len(filtered) / f)
    take_refined = min(len(refined), int(r * scale + 0.5))
    take_filtered = min(len(filtered), int(f * scale + 0.5))
    batch = rng.sample(list(refined), take_refined) + rng.sample(list(filtered), take_filtered)
    rng.shuffle(batch)
    return batch


# ---------------------------------------------------------------------------
# Orchestration

class BatchSink(Protocol):
    """Consumer of per-iteration training batches."""

    def emit(self, index: int, examples: Sequence[QAExample]) -> None: ...

    def train(self, index: int, examples: Sequence[QAExample]) -> None: ...


@dataclass
class RefinementReport:
    tau_sequence: list[float] = field(default_factory=list)
    batch_sizes: list[int] = field(default_factory=list)
    parts: list[dict] = field(default_factory=list)
    outcomes_by_part: list[list[RefinementOutcome]] = field(default_factory=list)
    verdict_totals: Counter = field(default_factory=Counter)
    relation_totals: Counter = field(default_factory=Counter)
    aborted: str | None = None

    def summary_obj(self) -> dict:
        return {
            "type": "summary",
            "tau_sequence": self.tau_sequence,
            "batch_sizes": self.batch_sizes,
            "parts": self.parts,
            "verdicts": dict(self.verdict_totals),
            "relations": dict(self.relation_totals),
            "aborted": self.aborted,
        }

    def json_lines(self):
        for part_no, outcomes in enumerate(self.outcomes_by_part, start=1):
            for outcome in outcomes:
                yield outcome.to_json_obj(part_no)
        yield self.summary_obj()


class RunAborted(RuntimeError):
    """A sink or train hook failed; carries the partial report."""

    def __init__(self, message: str, report: RefinementReport):
        super().__init__(message)
        self.report = report


def run_iterations(
    split: DatasetSplit,
    predictor: Predictor,
    cfg: RefinementConfig,
    sink: BatchSink,
    qgen: QuestionRegenerator | None = None,
    *,
    seed: int = 0,
    workers: int = 1,
) -> RefinementReport:
    """Run the full refinement schedule over a dataset split.

    Emits the initial pool as batch 0, then one combined batch per part,
    requesting a predictor update through the sink after each emission.
    The threshold used for part k is tau0 * gamma^(k-1); decay happens
    after every part.  Sink failures abort with the partial report
    attached.
    """
    if cfg.num_parts is not None and cfg.num_parts != len(split.parts):
        raise ValueError(
            f"config expects {cfg.num_parts} parts, split has {len(split.parts)}"
        )
    report = RefinementReport()
    rng = random.Random(seed)

    def deliver(index: int, examples: list[QAExample]) -> None:
        try:
            sink.emit(index, examples)
            sink.train(index, examples)
        except Exception as exc:
            report.aborted = f"batch {index}: {exc}"
            raise RunAborted(report.aborted, report) from exc

    report.batch_sizes.append(len(split.initial))
    deliver(0, list(split.initial))

    tau = cfg.tau0
    for k, part in enumerate(split.parts, start=1):
        refined, filtered, outcomes = refine_part(
            part,
            predictor,
            tau,
            qgen,
            keep_if_substring=cfg.keep_if_substring,
            workers=workers,
        )
        refined = [stamp_generation(ex, f"refined-iteration-{k}") for ex in refined]
        batch = combine(refined, filtered, cfg.combine_ratio, rng)

        verdicts = Counter(o.verdict.value for o in outcomes)
        relations = Counter(o.relation.value for o in outcomes)
        report.tau_sequence.append(tau)
        report.batch_sizes.append(len(batch))
        report.outcomes_by_part.append(outcomes)
        report.verdict_totals.update(verdicts)
        report.relation_totals.update(relations)
        report.parts.append(
            {
                "part": k,
                "tau": tau,
                "examples": len(part),
                "verdicts": dict(verdicts),
                "relations": dict(relations),
                "refined": len(refined),
                "filtered": len(filtered),
                "batch": len(batch),
            }
        )
        deliver(k, batch)
        tau *= cfg.gamma
    return report
