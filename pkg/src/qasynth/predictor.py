"""QA predictor contract with a deterministic mock and an HTTP client.

A predictor answers ``predict(context, question)`` with an optional
span-plus-probability and accepts ``train(batch)`` between prediction
phases.  Spans must be bit-exact against the context; the remote client
enforces that on every response so a misbehaving server can never leak
a corrupt span into the refinement loop.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence, runtime_checkable

import requests

from .answers import AnswerSpan

logger = logging.getLogger(__name__)

MOCK_SCRIPTS = ("echo-original", "fixed-table", "first-entity")
_CAPITALIZED_RUN = re.compile(r"\b[A-Z][\w]*(?:\s+[A-Z][\w]*)*")


class PredictorTransportError(RuntimeError):
    """Transient transport failure; the refinement loop applies its retry policy."""


@dataclass(frozen=True)
class Prediction:
    span: AnswerSpan
    probability: float

    def __post_init__(self):
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be in [0, 1]")


@runtime_checkable
class Predictor(Protocol):
    def predict(self, context: str, question: str) -> Optional[Prediction]: ...

    def train(self, examples: Sequence) -> dict: ...


def _clamp_probability(value: float) -> float:
    if 0.0 <= value <= 1.0:
        return value
    logger.warning("clamping out-of-range probability %r", value)
    return min(1.0, max(0.0, value))


class MockPredictor:
    """Deterministic predictor for tests and offline runs.

    Scripts:

    * ``echo-original``: answer every known example with its recorded
      original span at probability 1.0;
    * ``fixed-table``: answer from an explicit id -> (span, probability)
      table, no prediction for missing ids;
    * ``first-entity``: return the first capitalized token run of the
      context at probability 0.5.

    The first two scripts key their tables by example id and resolve
    incoming (context, question) calls through a reverse index built
    from the examples supplied at construction.
    """

    def __init__(self, script: str, examples: Sequence = (), table: dict | None = None):
        if script not in MOCK_SCRIPTS:
            raise ValueError(f"unknown mock script: {script!r}")
        self.script = script
        self.table: dict[str, tuple[AnswerSpan, float]] = dict(table or {})
        self._key_to_id: dict[tuple[str, str], str] = {}
        self.train_log: list[str] = []
        for ex in examples:
            self._key_to_id[(ex.context, ex.question)] = ex.id
            if script == "echo-original":
                self.table[ex.id] = (ex.answer, 1.0)

    def predict(self, context: str, question: str) -> Optional[Prediction]:
        if self.script == "first-entity":
            match = _CAPITALIZED_RUN.search(context)
            if match is None:
                return None
            span = AnswerSpan(match.start(), match.end(), match.group(0))
            return Prediction(span, 0.5)
        example_id = self._key_to_id.get((context, question))
        if example_id is None or example_id not in self.table:
            return None
        span, prob = self.table[example_id]
        span.check_against(context)
        return Prediction(span, _clamp_probability(prob))

    def train(self, examples: Sequence) -> dict:
        self.train_log.extend(ex.id for ex in examples)
        return {"status": "ok", "steps": len(examples)}


class RemotePredictor:
    """Client for the prediction wire protocol (JSON over HTTP).

    ``POST /predict`` with ``{"context", "question"}`` returns either a
    span payload or ``{"no_answer": true}``; ``POST /train`` blocks until
    the server reports its completed steps.  Any non-2xx response,
    timeout or bit-exactness violation raises PredictorTransportError.
    """

    def __init__(self, endpoint: str, timeout: float = 60.0, train_timeout: float = 3600.0):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.train_timeout = train_timeout

    def health(self) -> bool:
        try:
            response = requests.get(f"{self.endpoint}/health", timeout=self.timeout)
            return response.ok and response.json().get("status") == "ok"
        except (requests.RequestException, ValueError):
            return False

    def predict(self, context: str, question: str) -> Optional[Prediction]:
        try:
            response = requests.post(
                f"{self.endpoint}/predict",
                json={"context": context, "question": question},
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise PredictorTransportError(f"predict failed: {exc}") from exc
        if not response.ok:
            raise PredictorTransportError(f"predict returned HTTP {response.status_code}")
        payload = response.json()
        if payload.get("no_answer"):
            return None
        span = AnswerSpan(payload["char_start"], payload["char_end"], payload["text"])
        try:
            span.check_against(context)
        except ValueError as exc:
            raise PredictorTransportError(f"corrupt prediction: {exc}") from exc
        return Prediction(span, _clamp_probability(float(payload["prob"])))

    def train(self, examples: Sequence) -> dict:
        payload = {
            "examples": [
                {
                    "id": ex.id,
                    "question": ex.question,
                    "context": ex.context,
                    "answers": [{"text": ex.answer.text, "answer_start": ex.answer.char_start}],
                }
                for ex in examples
            ]
        }
        try:
            response = requests.post(
                f"{self.endpoint}/train", json=payload, timeout=self.train_timeout
            )
        except requests.RequestException as exc:
            raise PredictorTransportError(f"train failed: {exc}") from exc
        if not response.ok:
            raise PredictorTransportError(f"train returned HTTP {response.status_code}")
        return response.json()
