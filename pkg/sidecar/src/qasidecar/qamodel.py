"""A tiny trainable extractive QA model.

Candidate spans are token windows over the context, scored by a linear
model over hand features and normalized with a softmax; training is
plain SGD on the cross-entropy of the gold span.  It exists so the full
refinement loop can run on a CPU in seconds; any model speaking the same
wire protocol is a drop-in replacement.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

import numpy as np

from .annotate import tokenize

MODEL_ID = "tiny-span-scorer-v1"

_WORD_RE = re.compile(r"\w+")
_STOP = {"the", "a", "an", "of", "in", "on", "at", "to", "for", "was", "were",
         "is", "are", "did", "does", "do", "and", "or", "by", "with", "it"}

NUM_FEATURES = 9
MAX_SPAN_TOKENS = 6
MAX_CONTEXT_TOKENS = 400
WINDOW = 8


def _content_words(text: str) -> set[str]:
    return {w.lower() for w in _WORD_RE.findall(text)} - _STOP


@dataclass
class SpanCandidate:
    first: int
    last: int  # inclusive token indexes
    char_start: int
    char_end: int
    text: str


def enumerate_candidates(context: str) -> tuple[list, list[SpanCandidate]]:
    tokens = tokenize(context)[:MAX_CONTEXT_TOKENS]
    candidates = []
    for first in range(len(tokens)):
        if not any(ch.isalnum() for ch in tokens[first].text):
            continue
        for last in range(first, min(first + MAX_SPAN_TOKENS, len(tokens))):
            if not any(ch.isalnum() for ch in tokens[last].text):
                continue
            start = tokens[first].start
            end = tokens[last].end
            candidates.append(SpanCandidate(first, last, start, end, context[start:end]))
    return tokens, candidates


def featurize(context: str, question: str, tokens, candidates) -> np.ndarray:
    question_words = _content_words(question)
    q_lower = question.lower()
    wh_digit = q_lower.startswith(("when", "how much", "how many"))
    wh_entity = q_lower.startswith(("who", "where"))
    token_words = [t.text.lower() for t in tokens]
    in_question = np.array([w in question_words for w in token_words], dtype=float)

    rows = np.zeros((len(candidates), NUM_FEATURES))
    for row, cand in enumerate(rows):
        span = candidates[row]
        lo = max(0, span.first - WINDOW)
        hi = min(len(tokens), span.last + 1 + WINDOW)
        window_hits = in_question[lo:span.first].sum() + in_question[span.last + 1:hi].sum()
        span_tokens = tokens[span.first:span.last + 1]
        span_words = [t.text for t in span_tokens]
        n_span = len(span_words)

        cand[0] = 1.0  # bias
        cand[1] = window_hits / (2 * WINDOW)
        cand[2] = in_question[span.first:span.last + 1].mean()  # copies the question
        cand[3] = float(span_words[0][:1].isupper())
        cand[4] = float(any(any(ch.isdigit() for ch in w) for w in span_words))
        cand[5] = n_span / MAX_SPAN_TOKENS
        cand[6] = float(wh_digit and cand[4])
        cand[7] = float(wh_entity and cand[3] and not cand[4])
        cand[8] = float(any(w.lower() in _STOP for w in span_words))
    return rows


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


@dataclass
class TinySpanModel:
    """Linear span scorer with softmax normalization over candidates."""

    lr: float = 0.5
    seed: int = 0
    weights: np.ndarray = field(default=None)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.weights is None:
            rng = np.random.default_rng(self.seed)
            self.weights = rng.normal(0.0, 0.01, NUM_FEATURES)
            # Sensible priors so the untrained model is not uniform noise:
            # reward question-word windows, punish copying the question.
            self.weights[1] += 1.0
            self.weights[2] -= 1.0

    def predict(self, context: str, question: str):
        """Best span with its softmax probability, or None."""
        tokens, candidates = enumerate_candidates(context)
        if not candidates:
            return None
        features = featurize(context, question, tokens, candidates)
        probabilities = _softmax(features @ self.weights)
        best = int(np.argmax(probabilities))
        span = candidates[best]
        return {
            "text": span.text,
            "char_start": span.char_start,
            "char_end": span.char_end,
            "prob": float(probabilities[best]),
        }

    def train(self, examples: list[dict], batch_size: int = 8, epochs: int = 1) -> int:
        """SGD over (context, question, gold span) triples; returns steps run."""
        steps = 0
        with self.lock:
            for _epoch in range(epochs):
                for base in range(0, len(examples), batch_size):
                    batch = examples[base:base + batch_size]
                    gradient = np.zeros(NUM_FEATURES)
                    used = 0
                    for ex in batch:
                        contribution = self._example_gradient(ex)
                        if contribution is not None:
                            gradient += contribution
                            used += 1
                    if used:
                        self.weights -= self.lr * gradient / used
                    steps += 1
        return steps

    def _example_gradient(self, ex: dict):
        answer = ex["answers"][0]
        gold_start = answer["answer_start"]
        gold_end = gold_start + len(answer["text"])
        tokens, candidates = enumerate_candidates(ex["context"])
        gold_index = next(
            (i for i, c in enumerate(candidates)
             if c.char_start == gold_start and c.char_end == gold_end),
            None,
        )
        if gold_index is None:
            return None  # gold span not token-aligned; skip
        features = featurize(ex["context"], ex["question"], tokens, candidates)
        probabilities = _softmax(features @ self.weights)
        # d/dw of -log p[gold] for a linear softmax.
        return features.T @ probabilities - features[gold_index]
