"""Acceptance suite: one test per release criterion, with a printed verdict line.

Run with ``pytest tests/test_acceptance.py -s`` (or ``-rA``) to see the
per-criterion lines.  Everything here uses mock predictors and
checked-in fixtures only.
"""

from __future__ import annotations

import json
import random
import time
from contextlib import contextmanager

import pytest

from qasynth.cli import main
from qasynth.dataset import read_squad_json, sample_split
from qasynth.predictor import MockPredictor
from qasynth.questions import make_cloze, translate_drc
from qasynth.refine import (
    ClauseQuestionRegenerator,
    RefinementConfig,
    Relation,
    Verdict,
    classify_relation,
    refine_part,
    run_iterations,
)

from conftest import make_example, span_in
from test_corpus import bruteforce_rouge2
from test_questions import _check_conservation, random_cloze


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


def test_drc_golden_strings(arbitron, lincoln, hyundai):
    with criterion("DRC golden strings"):
        started = time.perf_counter()

        statement, candidate = arbitron
        cloze = make_cloze(statement, (0, 10), candidate)
        assert translate_drc(cloze).text == "Who ratings in it finished first in April 1990"

        statement, candidate = lincoln
        cloze = make_cloze(statement, (0, 14), candidate)
        assert translate_drc(cloze).text == (
            "How much of a fee for he was sold to Colin Murphy 's Lincoln City"
        )

        statement, clause, _candidate = hyundai
        context = ("Hyundai will be revealing their rally plans at the 2011 Chicago "
                   "Auto Show according to reports .")
        example = make_example(
            "hy1", context,
            "What at they would be revealing their future rally plans on February 9",
            "Chicago Auto Show", pair_id="hy", clause=clause, category="THING",
        )
        predicted = span_in(context, "the 2011 Chicago Auto Show")
        qgen = ClauseQuestionRegenerator({"hy1": (statement, clause, "THING")})
        regenerated = qgen(example, predicted)
        assert regenerated == (
            "What at their future rally plans they would be revealing on February 9"
        )

        assert time.perf_counter() - started < 1.0


def test_cloze_golden_string(guillermo):
    with criterion("Cloze golden string"):
        started = time.perf_counter()
        statement, candidate = guillermo
        cloze = make_cloze(statement, (0, 13), candidate)
        assert cloze.text == (
            "Guillermo crashed a Matt Damon interview, about his upcoming movie [THING]"
        )
        assert time.perf_counter() - started < 1.0


def test_token_conservation_property():
    with criterion("Token conservation over 1000 random trees"):
        rng = random.Random(2024)
        for _ in range(1000):
            _check_conservation(random_cloze(rng, max_nodes=15))


def test_rouge2_oracle_equivalence():
    with criterion("ROUGE-2 oracle equivalence (500 pairs, 1e-9)"):
        from qasynth.corpus import rouge2

        rng = random.Random(99)
        vocab = "amber vault copper lane sketch motor civic ridge".split()
        for _ in range(500):
            a = " ".join(rng.choices(vocab, k=rng.randint(0, 14)))
            b = " ".join(rng.choices(vocab, k=rng.randint(0, 14)))
            assert rouge2(a, b) == pytest.approx(bruteforce_rouge2(a, b), abs=1e-9)


def test_relation_taxonomy():
    with criterion("Relation taxonomy (containment triples)"):
        context = (
            "In 1938, E. Allen Petersen escaped the advancing armies. "
            "Plans were revealed at the 2011 Chicago Auto Show. "
            'The track "That\'s What\'s Up" re-imagines "Low Lights".'
        )
        assert classify_relation(
            span_in(context, "E. Allen Petersen"), span_in(context, "Petersen")
        ) is Relation.OA_CONTAINS_PA
        assert classify_relation(
            span_in(context, "Chicago Auto Show"),
            span_in(context, "the 2011 Chicago Auto Show"),
        ) is Relation.PA_CONTAINS_OA
        assert classify_relation(
            span_in(context, "Low Lights"), span_in(context, "That's What's Up")
        ) is Relation.OTHER


def _bookkeeping_dataset():
    context = (
        "Elena Vargas founded Helios Motors in Lisbon in March 2014 . "
        "The firm Helios Motors expanded across Portugal afterwards ."
    )
    examples = [
        make_example(f"bk{i:04d}", context, f"synthetic question {i}", "Helios Motors")
        for i in range(900)
    ]
    table = {}
    for i, ex in enumerate(examples):
        kind = i % 6
        if kind == 0:
            table[ex.id] = (ex.answer, 0.9)  # Equal, confident
        elif kind == 1:
            table[ex.id] = (ex.answer, 0.05)  # Equal, below threshold
        elif kind == 2:
            table[ex.id] = (span_in(context, "Helios"), 0.8)  # OA contains PA
        elif kind == 3:
            table[ex.id] = (span_in(context, "founded Helios Motors in Lisbon"), 0.7)
        elif kind == 4:
            table[ex.id] = (span_in(context, "Lisbon"), 0.6)  # Other
        # kind == 5: no prediction
    return examples, table


class RecordingSink:
    def __init__(self):
        self.batches = []

    def emit(self, index, examples):
        self.batches.append((index, list(examples)))

    def train(self, index, examples):
        pass


def test_algorithm_bookkeeping():
    with criterion("Refinement bookkeeping (900 examples, 300 + 6x100)"):
        examples, table = _bookkeeping_dataset()
        split = sample_split(examples, 300, 6, seed=0)
        assert [len(p) for p in split.parts] == [100] * 6

        mock = MockPredictor("fixed-table", examples, table)
        sink = RecordingSink()
        cfg = RefinementConfig(tau0=0.15, gamma=0.9)
        report = run_iterations(split, mock, cfg, sink, seed=0)

        assert len(sink.batches) == 7
        assert len(report.tau_sequence) == 6
        for k, tau in enumerate(report.tau_sequence):
            assert tau == pytest.approx(0.15 * 0.9 ** k, abs=1e-12)
        for part in report.parts:
            assert sum(part["verdicts"].values()) == part["examples"] == 100
            refined_in_batch = sum(
                1 for ex in sink.batches[part["part"]][1]
                if ex.provenance.generation.startswith("refined")
            )
            filtered_in_batch = len(sink.batches[part["part"]][1]) - refined_in_batch
            assert abs(refined_in_batch - filtered_in_batch) <= 1

        echo = MockPredictor("echo-original", examples)
        echo_report = run_iterations(split, echo, cfg, RecordingSink(), seed=0)
        assert set(echo_report.verdict_totals) == {"FilteredKeep"}
        assert echo_report.verdict_totals["FilteredKeep"] == 600


def test_threshold_monotonicity():
    with criterion("Threshold monotonicity (0.3 / 0.15 / 0.0)"):
        examples, table = _bookkeeping_dataset()
        mock = MockPredictor("fixed-table", examples, table)

        def kept_ids(tau):
            _r, _f, outcomes = refine_part(examples, mock, tau=tau)
            return {o.example_id for o in outcomes if o.verdict is not Verdict.DROPPED}

        kept_30, kept_15, kept_00 = kept_ids(0.3), kept_ids(0.15), kept_ids(0.0)
        assert kept_30 <= kept_15 <= kept_00
        assert len(kept_30) < len(kept_00)  # the sweep actually separates


def test_end_to_end_build(toy_corpus_path, tmp_path):
    with criterion("End-to-end build on the 50-pair corpus"):
        started = time.perf_counter()
        out1, out2 = tmp_path / "run1.json", tmp_path / "run2.json"
        for out in (out1, out2):
            code = main(["build", "--input", str(toy_corpus_path), "--translator", "drc",
                         "--out", str(out), "--seed", "7"])
            assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

        payload = json.loads(out1.read_text())
        assert payload["version"] == "1.1"
        assert isinstance(payload["data"], list) and payload["data"]
        for article in payload["data"]:
            assert set(article) == {"title", "paragraphs"}
            for paragraph in article["paragraphs"]:
                assert set(paragraph) == {"context", "qas"}
                for qa in paragraph["qas"]:
                    assert set(qa) == {"id", "question", "answers"}

        examples = read_squad_json(out1)
        assert examples
        for ex in examples:
            assert ex.context[ex.answer.char_start:ex.answer.char_end] == ex.answer.text
        assert time.perf_counter() - started < 10.0
