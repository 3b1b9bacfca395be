"""Command-line entry point: build, refine and stats subcommands.

Exit codes: 0 success, 2 input or environment error, 3 empty result.
Defaults mirror the reference configuration (threshold 0.15, decay 0.9,
clause minimum 6 tokens, document cap 1000 words) so a bare invocation
reproduces it.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path
from typing import Sequence

from .corpus import (
    CorpusFilterConfig,
    LoadError,
    StatementDocPair,
    corpus_filter,
    load_pairs,
    median_rouge2,
)
from .dataset import (
    BuildConfig,
    QAExample,
    build_examples,
    read_squad_json,
    sample_split,
    to_squad_json,
)
from .predictor import MockPredictor, RemotePredictor
from .refine import (
    ClauseQuestionRegenerator,
    RefinementConfig,
    RunAborted,
    run_iterations,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EMPTY = 3


def _add_build(subparsers) -> None:
    p = subparsers.add_parser("build", help="synthesize a SQuAD-1.1 dataset from pairs")
    p.add_argument("--input", required=True, help="interchange JSONL of annotated pairs")
    p.add_argument("--translator", choices=("identity", "noise", "drc"), default="drc")
    p.add_argument("--out", required=True, help="output SQuAD JSON path")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--rouge-threshold", type=float, default=None)
    group.add_argument(
        "--auto-median",
        action="store_true",
        help="use the corpus median bigram score as the threshold (default)",
    )
    p.add_argument("--min-clause-tokens", type=int, default=6)
    p.add_argument("--max-doc-words", type=int, default=1000)
    p.add_argument("--window", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)


def _add_refine(subparsers) -> None:
    p = subparsers.add_parser("refine", help="run iterative data refinement")
    p.add_argument("--data", required=True, help="SQuAD JSON dataset")
    p.add_argument("--init-size", type=int, required=True)
    p.add_argument("--parts", type=int, required=True)
    p.add_argument("--tau", type=float, default=0.15)
    p.add_argument("--gamma", type=float, default=0.9)
    p.add_argument(
        "--predictor",
        required=True,
        help="mock:echo-original, mock:first-entity, or a http://host:port endpoint",
    )
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--pairs",
        default=None,
        help="interchange JSONL; enables question regeneration for refined answers",
    )
    p.add_argument("--ratio", default="1:1", help="refined:filtered combine ratio")
    p.add_argument("--no-keep-substring", action="store_true")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)


def _add_stats(subparsers) -> None:
    p = subparsers.add_parser("stats", help="print dataset statistics")
    p.add_argument("--data", required=True, help="SQuAD JSON dataset")


def cmd_build(args) -> int:
    errors: list[LoadError] = []
    try:
        pairs = list(load_pairs(args.input, errors.append))
    except OSError as exc:
        print(f"cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for err in errors:
        print(f"line {err.line_no} (pair {err.pair_id}): {err.message}", file=sys.stderr)

    if args.rouge_threshold is not None:
        threshold = args.rouge_threshold
    else:
        if not pairs:
            print("no valid pairs in input", file=sys.stderr)
            return EXIT_EMPTY
        threshold = median_rouge2(pairs)
        print(f"rouge2 threshold (median): {threshold:.4f}")

    cfg = CorpusFilterConfig(max_doc_words=args.max_doc_words, rouge2_threshold=threshold)
    kept, report = corpus_filter(pairs, cfg)
    print(
        f"pairs: {report.input_count} in, {report.kept} kept "
        f"({report.truncated} truncated); discarded per gate: "
        f"doc_words={report.discarded['doc_words']} "
        f"relevance={report.discarded['relevance']} "
        f"rouge2={report.discarded['rouge2']}; loader errors: {len(errors)}"
    )
    examples = build_examples(
        kept,
        BuildConfig(
            translator=args.translator,
            min_clause_tokens=args.min_clause_tokens,
            window=args.window,
            seed=args.seed,
        ),
    )
    if not examples:
        print("no examples emitted", file=sys.stderr)
        print(report.to_json(), file=sys.stderr)
        return EXIT_EMPTY
    to_squad_json(examples, args.out)
    print(f"wrote {len(examples)} examples to {args.out}")
    return EXIT_OK


def _make_predictor(spec: str, examples: Sequence[QAExample]):
    if spec.startswith("mock:"):
        script = spec.split(":", 1)[1]
        return MockPredictor(script, examples)
    predictor = RemotePredictor(spec)
    if not predictor.health():
        return None
    return predictor


def _regenerator_from_pairs(
    pairs_path: str, examples: Sequence[QAExample]
) -> ClauseQuestionRegenerator | None:
    pairs: dict[str, StatementDocPair] = {}
    for pair in load_pairs(pairs_path):
        pairs[pair.id] = pair
    index = {}
    for ex in examples:
        prov = ex.provenance
        if prov.pair_id in pairs and prov.clause is not None:
            index[ex.id] = (pairs[prov.pair_id].statement, prov.clause, prov.category)
    if not index:
        logger.warning(
            "no examples could be joined to %s (missing provenance annex?); "
            "refined questions will keep their original text",
            pairs_path,
        )
        return None
    return ClauseQuestionRegenerator(index)


def cmd_refine(args) -> int:
    try:
        examples = read_squad_json(args.data)
    except (OSError, ValueError, KeyError) as exc:
        print(f"cannot read {args.data}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        split = sample_split(examples, args.init_size, args.parts, args.seed)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT

    predictor = _make_predictor(args.predictor, examples)
    if predictor is None:
        print(f"predictor {args.predictor} failed its health check", file=sys.stderr)
        return EXIT_INPUT

    qgen = None
    if args.pairs:
        try:
            qgen = _regenerator_from_pairs(args.pairs, examples)
        except OSError as exc:
            print(f"cannot read {args.pairs}: {exc}", file=sys.stderr)
            return EXIT_INPUT

    try:
        r, f = (int(x) for x in args.ratio.split(":"))
    except ValueError:
        print(f"bad ratio {args.ratio!r}, expected R:F", file=sys.stderr)
        return EXIT_INPUT
    cfg = RefinementConfig(
        tau0=args.tau,
        gamma=args.gamma,
        combine_ratio=(r, f),
        keep_if_substring=not args.no_keep_substring,
        num_parts=args.parts,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sink = DirectorySink(out_dir, predictor)
    report_file = out_dir / "report.jsonl"
    try:
        report = run_iterations(
            split, predictor, cfg, sink, qgen, seed=args.seed, workers=args.workers
        )
    except RunAborted as exc:
        _write_report(exc.report, report_file)
        print(f"aborted: {exc} (partial report in {report_file})", file=sys.stderr)
        return EXIT_INPUT
    _write_report(report, report_file)
    taus = ", ".join(f"{t:.6f}" for t in report.tau_sequence)
    print(f"batches: {len(report.batch_sizes)} (sizes {report.batch_sizes})")
    print(f"tau per part: {taus}")
    print(f"verdicts: {dict(report.verdict_totals)}")
    print(f"report: {report_file}")
    return EXIT_OK


class DirectorySink:
    """Writes batch_<k>.json into a directory and forwards train requests."""

    def __init__(self, out_dir: Path, predictor):
        self.out_dir = Path(out_dir)
        self.predictor = predictor

    def emit(self, index: int, examples) -> None:
        to_squad_json(examples, self.out_dir / f"batch_{index}.json")

    def train(self, index: int, examples) -> None:
        self.predictor.train(examples)


def _write_report(report, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for obj in report.json_lines():
            handle.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


def cmd_stats(args) -> int:
    try:
        examples = read_squad_json(args.data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"cannot read {args.data}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    contexts = {ex.context for ex in examples}
    print(f"examples: {len(examples)}")
    print(f"contexts: {len(contexts)}")

    categories = Counter(ex.provenance.category or "unknown" for ex in examples)
    print("answer categories:")
    for name, count in sorted(categories.items()):
        print(f"  {name}: {count}")

    lengths = Counter()
    for ex in examples:
        n = len(ex.question.split())
        lengths[f"{(n - 1) // 5 * 5 + 1}-{(n - 1) // 5 * 5 + 5}"] += 1
    print("question length (words):")
    for bucket, count in sorted(lengths.items(), key=lambda kv: int(kv[0].split("-")[0])):
        print(f"  {bucket}: {count}")

    with_annex = [ex for ex in examples if ex.provenance.pair_id]
    if with_annex:
        non_ner = sum(1 for ex in with_annex if not ex.provenance.answer_is_ner)
        print(f"answers outside NER mentions: {non_ner}/{len(with_annex)} "
              f"({non_ner / len(with_annex):.4f})")
    elif examples:
        print("answers outside NER mentions: n/a (no provenance annex)")
    else:
        print("answers outside NER mentions: 0/0 (0.0000)")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="qasynth",
        description="Synthesize and iteratively refine extractive QA training data.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    subparsers = parser.add_subparsers(dest="command", required=True)
    _add_build(subparsers)
    _add_refine(subparsers)
    _add_stats(subparsers)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "build":
        return cmd_build(args)
    if args.command == "refine":
        return cmd_refine(args)
    return cmd_stats(args)


if __name__ == "__main__":
    sys.exit(main())
