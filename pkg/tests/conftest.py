from __future__ import annotations

from pathlib import Path

import pytest

from qasynth.answers import AnswerCandidate, AnswerSpan
from qasynth.corpus import ROOT, AnnotatedSentence, Document, StatementDocPair, Token
from qasynth.dataset import Provenance, QAExample

DATA_DIR = Path(__file__).parent / "data"


def build_sentence(words, heads, deprels, pos=None, ner=None, clauses=None):
    """Assemble an AnnotatedSentence from parallel annotation lists."""
    pos = pos or ["X"] * len(words)
    ner = ner or ["O"] * len(words)
    tokens = []
    offset = 0
    for i, word in enumerate(words):
        tokens.append(
            Token(i, word, offset, offset + len(word), heads[i], deprels[i], pos[i], ner[i])
        )
        offset += len(word) + 1
    return AnnotatedSentence(" ".join(words), tuple(tokens), clauses)


def build_document(*sentences_words, entities=None):
    """Document with chain parses; entities maps (sent, start, count) -> label."""
    entities = entities or {}
    doc_sentences = []
    pieces = []
    offset = 0
    for s_idx, words in enumerate(sentences_words):
        tokens = []
        for i, word in enumerate(words):
            ner = "O"
            for (sent_no, start, count), label in entities.items():
                if sent_no == s_idx and start <= i < start + count:
                    ner = ("B-" if i == start else "I-") + label
            tokens.append(
                Token(
                    i, word, offset, offset + len(word),
                    ROOT if i == 0 else i - 1,
                    "root" if i == 0 else "dep",
                    "X", ner,
                )
            )
            pieces.append(word)
            offset += len(word) + 1
        doc_sentences.append(tuple(tokens))
    return Document(" ".join(pieces), tuple(doc_sentences))


def span_in(context: str, text: str, occurrence: int = 0) -> AnswerSpan:
    start = -1
    for _ in range(occurrence + 1):
        start = context.index(text, start + 1)
    return AnswerSpan(start, start + len(text), text)


def make_example(ex_id: str, context: str, question: str, answer_text: str,
                 occurrence: int = 0, **prov) -> QAExample:
    defaults = dict(pair_id="", title="t", clause=None, method="drc")
    defaults.update(prov)
    return QAExample(
        id=ex_id,
        context=context,
        question=question,
        answer=span_in(context, answer_text, occurrence),
        provenance=Provenance(**defaults),
    )


@pytest.fixture
def toy_corpus_path() -> Path:
    return DATA_DIR / "toy_pairs.jsonl"


# ---------------------------------------------------------------------------
# Golden dependency parses.  These encode the specific attachments that
# reproduce the reference question strings; the algorithms themselves
# are parse-agnostic.

@pytest.fixture
def arbitron():
    """'it finished first in the Arbitron ratings in April 1990' (answer: Arbitron)."""
    words = "it finished first in the Arbitron ratings in April 1990".split()
    heads = [1, ROOT, 1, 1, 5, 6, 3, 1, 7, 8]
    deprels = ["nsubj", "root", "advmod", "prep", "det", "compound",
               "pobj", "prep", "pobj", "nummod"]
    ner = ["O"] * 10
    ner[5] = "B-ORG"
    ner[8], ner[9] = "B-DATE", "I-DATE"
    statement = build_sentence(words, heads, deprels, ner=ner)
    candidate = AnswerCandidate(
        text="Arbitron",
        ner_label="ORG",
        mask_category="ORG",
        statement_span=(statement.tokens[5].char_start, statement.tokens[5].char_end),
        clause=(0, 10),
    )
    return statement, candidate


@pytest.fixture
def lincoln():
    """'he was sold to Colin Murphy 's Lincoln City for a fee of 15,000' (answer: 15,000)."""
    words = "he was sold to Colin Murphy 's Lincoln City for a fee of 15,000".split()
    heads = [2, 2, ROOT, 2, 5, 8, 5, 8, 3, 2, 11, 9, 11, 12]
    deprels = ["nsubjpass", "auxpass", "root", "prep", "compound", "poss", "case",
               "compound", "pobj", "prep", "det", "pobj", "prep", "pobj"]
    ner = ["O"] * 14
    ner[4], ner[5] = "B-PERSON", "I-PERSON"
    ner[13] = "B-MONEY"
    statement = build_sentence(words, heads, deprels, ner=ner)
    candidate = AnswerCandidate(
        text="15,000",
        ner_label="MONEY",
        mask_category="NUMERIC",
        statement_span=(statement.tokens[13].char_start, statement.tokens[13].char_end),
        clause=(0, 14),
    )
    return statement, candidate


@pytest.fixture
def hyundai():
    """Statement behind the span-extension refinement example.

    The prepositional phrase attaches to 'plans', which is the parse
    that yields the reference regenerated question.
    """
    words = ("Hyundai announced they would be revealing their future rally plans "
             "at the 2011 Chicago Auto Show on February 9 .").split()
    heads = [1, ROOT, 5, 5, 5, 1, 9, 9, 9, 5, 9, 15, 15, 15, 15, 10, 5, 16, 17, 1]
    deprels = ["nsubj", "root", "nsubj", "aux", "aux", "ccomp", "poss", "amod",
               "compound", "dobj", "prep", "det", "nummod", "compound", "compound",
               "pobj", "prep", "pobj", "nummod", "punct"]
    pos = ["PROPN", "VERB", "PRON", "AUX", "AUX", "VERB", "PRON", "ADJ", "NOUN",
           "NOUN", "ADP", "DET", "NUM", "PROPN", "PROPN", "PROPN", "ADP", "PROPN",
           "NUM", "PUNCT"]
    ner = ["B-ORG", "O", "O", "O", "O", "O", "O", "O", "O", "O", "O", "O",
           "B-DATE", "B-EVENT", "I-EVENT", "I-EVENT", "O", "B-DATE", "I-DATE", "O"]
    statement = build_sentence(words, heads, deprels, pos=pos, ner=ner)
    clause = (2, 19)
    candidate = AnswerCandidate(
        text="Chicago Auto Show",
        ner_label="EVENT",
        mask_category="THING",
        statement_span=(statement.tokens[13].char_start, statement.tokens[15].char_end),
        clause=clause,
    )
    return statement, clause, candidate


@pytest.fixture
def guillermo():
    """Whitespace-tokenized statement behind the mask-token example."""
    words = ("Guillermo crashed a Matt Damon interview, about his upcoming movie "
             "Tour de Pharmacy").split()
    heads = [1, ROOT, 5, 4, 5, 1, 5, 9, 9, 6, 9, 10, 10]
    deprels = ["nsubj", "root", "det", "compound", "compound", "dobj", "prep",
               "poss", "amod", "pobj", "appos", "compound", "compound"]
    ner = ["B-PERSON", "O", "O", "B-PERSON", "I-PERSON", "O", "O", "O", "O", "O",
           "B-PRODUCT", "I-PRODUCT", "I-PRODUCT"]
    statement = build_sentence(words, heads, deprels, ner=ner)
    candidate = AnswerCandidate(
        text="Tour de Pharmacy",
        ner_label="PRODUCT",
        mask_category="THING",
        statement_span=(statement.tokens[10].char_start, statement.tokens[12].char_end),
        clause=(0, 13),
    )
    return statement, candidate
