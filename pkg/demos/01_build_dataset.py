#!/usr/bin/env python3
"""Walk a tiny corpus through the full build: gates -> questions -> SQuAD file.

Creates two statement/document pairs inline, shows what each filter gate
does to them, then synthesizes question-answer examples and writes the
SQuAD-1.1 output next to this script.
"""

import json
import tempfile
from pathlib import Path

from qasynth.corpus import CorpusFilterConfig, corpus_filter, load_pairs, rouge2
from qasynth.dataset import BuildConfig, build_examples, to_squad_json

# ---------------------------------------------------------------------------
# 1. A minimal interchange file: tokens with offsets, heads, relations,
#    POS and BIO entity tags.  Pair "good" has a paraphrasing document;
#    pair "offtopic" shares almost no vocabulary with its statement.


def tokens_for(words, heads, deprels, ner):
    out, offset = [], 0
    for i, word in enumerate(words):
        out.append({"i": i, "text": word, "start": offset, "end": offset + len(word),
                    "head": heads[i], "deprel": deprels[i], "pos": "X", "ner": ner[i]})
        offset += len(word) + 1
    return out


def chain(words, ner=None):
    ner = ner or ["O"] * len(words)
    heads = [-1] + list(range(len(words) - 1))
    deprels = ["root"] + ["dep"] * (len(words) - 1)
    return tokens_for(words, heads, deprels, ner)


statement_words = "Clara Voss founded Delta Foundry in Tallinn in 1998 .".split()
good_pair = {
    "id": "good",
    "statement": {
        "text": " ".join(statement_words),
        "tokens": tokens_for(
            statement_words,
            [2, 0, -1, 2, 3, 2, 5, 2, 7, 2],
            ["nsubj", "flat", "root", "dobj", "flat", "prep", "pobj", "prep", "pobj", "punct"],
            ["B-PERSON", "I-PERSON", "O", "B-ORG", "I-ORG", "O", "B-GPE", "O", "B-DATE", "O"],
        ),
    },
    "document": {
        "text": "City records say Clara Voss started Delta Foundry near Tallinn in 1998 .",
        "sentences": [chain(
            "City records say Clara Voss started Delta Foundry near Tallinn in 1998 .".split(),
            ["O", "O", "O", "B-PERSON", "I-PERSON", "O", "B-ORG", "I-ORG", "O", "B-GPE", "O", "B-DATE", "O"],
        )],
    },
    "meta": {"title": "Delta Foundry"},
}

offtopic_pair = {
    "id": "offtopic",
    "statement": good_pair["statement"],
    "document": {
        "text": "An unrelated gardening column discusses tomato varieties at length .",
        "sentences": [chain("An unrelated gardening column discusses tomato varieties at length .".split())],
    },
    "meta": {"title": "Gardening"},
}

workdir = Path(tempfile.mkdtemp(prefix="qasynth-demo-"))
pairs_path = workdir / "pairs.jsonl"
with open(pairs_path, "w", encoding="utf-8") as handle:
    for pair in (good_pair, offtopic_pair):
        handle.write(json.dumps(pair) + "\n")
print(f"interchange file: {pairs_path}")

# ---------------------------------------------------------------------------
# 2. Corpus gates.  The off-topic pair dies at the relevance gate; the
#    good pair's bigram correlation is printed for reference.

pairs = list(load_pairs(pairs_path))
for pair in pairs:
    score = rouge2(pair.document.text, pair.statement.text)
    print(f"  pair {pair.id!r}: rouge2 = {score:.4f}")

kept, report = corpus_filter(pairs, CorpusFilterConfig(rouge2_threshold=0.05))
print(f"kept: {[p.id for p in kept]}")
print(f"gate report: {report.to_json()}")

# ---------------------------------------------------------------------------
# 3. Question synthesis with the dependency-reconstruction translator.

examples = build_examples(kept, BuildConfig(translator="drc"))
for ex in examples:
    print(f"  Q: {ex.question}")
    print(f"  A: {ex.answer.text!r} at {ex.answer.char_start}..{ex.answer.char_end}")
    assert ex.context[ex.answer.char_start:ex.answer.char_end] == ex.answer.text

# ---------------------------------------------------------------------------
# 4. Serialize to SQuAD-1.1 (plus the provenance annex used by `stats`).

out_path = workdir / "dataset.json"
to_squad_json(examples, out_path)
payload = json.loads(out_path.read_text())
print(f"wrote {out_path} (version {payload['version']}, "
      f"{len(payload['data'])} article(s))")
