#!/usr/bin/env python3
"""Run the full refinement schedule against a scripted mock predictor.

Builds a 900-example toy dataset (300 initial pool + 6 parts of 100),
scripts the predictor so every containment relation shows up, and prints
the per-part bookkeeping: threshold decay, verdicts, relations and batch
composition.
"""

from qasynth.dataset import sample_split
from qasynth.predictor import MockPredictor
from qasynth.refine import RefinementConfig, run_iterations

# ---------------------------------------------------------------------------
# 1. A toy dataset.  One shared context; the mock predictor's fixed
#    table rotates through the interesting cases.

CONTEXT = (
    "Elena Vargas founded Helios Motors in Lisbon in March 2014 . "
    "The firm Helios Motors expanded across Portugal afterwards ."
)


def span(text, occurrence=0):
    from qasynth.answers import AnswerSpan

    start = -1
    for _ in range(occurrence + 1):
        start = CONTEXT.index(text, start + 1)
    return AnswerSpan(start, start + len(text), text)


def example(i):
    from qasynth.dataset import Provenance, QAExample

    return QAExample(
        id=f"demo{i:04d}",
        context=CONTEXT,
        question=f"synthetic question {i}",
        answer=span("Helios Motors"),
        provenance=Provenance(pair_id="demo", title="Demo", clause=None, method="drc"),
    )


examples = [example(i) for i in range(900)]
table = {}
for i, ex in enumerate(examples):
    kind = i % 6
    if kind == 0:
        table[ex.id] = (ex.answer, 0.9)                      # agrees, confident
    elif kind == 1:
        table[ex.id] = (ex.answer, 0.05)                     # agrees, too weak
    elif kind == 2:
        table[ex.id] = (span("Helios"), 0.8)                 # inside the original
    elif kind == 3:
        table[ex.id] = (span("founded Helios Motors in Lisbon"), 0.7)  # extends it
    elif kind == 4:
        table[ex.id] = (span("Lisbon"), 0.6)                 # somewhere else
    # kind == 5: the model returns nothing

# ---------------------------------------------------------------------------
# 2. Split and run.  The sink just collects batches in memory.


class CollectingSink:
    def __init__(self):
        self.batches = []

    def emit(self, index, batch):
        self.batches.append((index, list(batch)))

    def train(self, index, batch):
        pass  # a real sink forwards to the predictor's /train endpoint


split = sample_split(examples, initial_size=300, num_parts=6, seed=0)
predictor = MockPredictor("fixed-table", examples, table)
sink = CollectingSink()
report = run_iterations(split, predictor, RefinementConfig(tau0=0.15, gamma=0.9),
                        sink, seed=0)

# ---------------------------------------------------------------------------
# 3. Bookkeeping.

print(f"batches emitted: {len(sink.batches)} (initial {report.batch_sizes[0]} examples)")
print()
print("part  tau      kept  refined  dropped  batch")
for part in report.parts:
    verdicts = part["verdicts"]
    print(f"  {part['part']}   {part['tau']:.5f}  {verdicts.get('FilteredKeep', 0):>4}"
          f"  {verdicts.get('Refined', 0):>7}  {verdicts.get('Dropped', 0):>7}"
          f"  {part['batch']:>5}")
print()
print("relation histogram:", dict(report.relation_totals))
print("verdict histogram: ", dict(report.verdict_totals))

decayed = [0.15 * 0.9 ** k for k in range(6)]
assert all(abs(a - b) < 1e-12 for a, b in zip(report.tau_sequence, decayed))
print()
print("threshold decay follows tau0 * gamma^k exactly")
