#!/usr/bin/env python3
"""Generate the checked-in 50-pair toy corpus (tests/data/toy_pairs.jsonl).

Statements come from a handful of dependency-parse templates filled with
pooled entities; documents mix paraphrase sentences (carrying the same
entities), near-quotes (high bigram overlap) and filler, so the corpus
exercises every filter gate.  Fully deterministic: rerunning this script
reproduces the file byte for byte.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

ROOT = -1

PEOPLE = [
    "Elena Vargas", "Marcus Reed", "Priya Nair", "Tomas Berg", "Alice Munro",
    "Viktor Hale", "Mina Okafor", "Jonas Filt", "Clara Voss", "Daniel Moreau",
]
ORGS = [
    "Helios Motors", "Northgate Studios", "Bluewater Press", "Atlas Rail",
    "Ferrin Labs", "Corona Works", "Delta Foundry", "Quill Society",
]
PLACES = ["Lisbon", "Toronto", "Kyoto", "Oslo", "Valencia", "Brisbane", "Tallinn", "Quito"]
DATES = [
    "March 2014", "January 1998", "October 2021", "August 2003",
    "May 1987", "February 2010", "November 2016", "June 1975",
]
MONEY = ["250,000", "18,500", "1,300,000", "72,000", "940,000", "5,600"]
WORKS = [
    "Starlight Express", "Iron Harbor", "Paper Moons", "The Glass Orchard",
    "Silent Meridian", "Copper Dawn", "The Long Ferry", "Winter Arcade",
]

FILLER = [
    "The archive was digitized by volunteers over several years .",
    "Local newspapers covered the story in considerable detail .",
    "Historians still debate the exact sequence of events .",
    "The original records were kept in a municipal vault .",
    "Several eyewitness accounts survive in private collections .",
    "A commemorative plaque was installed decades later .",
]


class SentenceBuilder:
    """Accumulates token rows and renders an annotated sentence object."""

    def __init__(self):
        self.rows: list[dict] = []

    def add(self, text: str, head: int, deprel: str, pos: str = "X", ner: str = "O") -> int:
        self.rows.append({"text": text, "head": head, "deprel": deprel, "pos": pos, "ner": ner})
        return len(self.rows) - 1

    def entity(self, surface: str, label: str, head: int, deprel: str, pos: str = "PROPN") -> int:
        """Add a multi-token entity; the first token is its syntactic head."""
        words = surface.split()
        first = self.add(words[0], head, deprel, pos, f"B-{label}")
        for word in words[1:]:
            self.add(word, first, "flat", pos, f"I-{label}")
        return first

    def tokens(self, char_base: int = 0) -> tuple[list[dict], str]:
        out = []
        offset = char_base
        pieces = []
        for i, row in enumerate(self.rows):
            out.append(
                {
                    "i": i,
                    "text": row["text"],
                    "start": offset,
                    "end": offset + len(row["text"]),
                    "head": row["head"],
                    "deprel": row["deprel"],
                    "pos": row["pos"],
                    "ner": row["ner"],
                }
            )
            pieces.append(row["text"])
            offset += len(row["text"]) + 1
        return out, " ".join(pieces)


def chain_sentence(words: list[str], entities: list[tuple[int, int, str]]) -> SentenceBuilder:
    """Flat chain parse for document sentences (token i attaches to i-1)."""
    builder = SentenceBuilder()
    ner = ["O"] * len(words)
    for start, count, label in entities:
        ner[start] = f"B-{label}"
        for j in range(start + 1, start + count):
            ner[j] = f"I-{label}"
    for i, word in enumerate(words):
        builder.add(word, ROOT if i == 0 else i - 1, "root" if i == 0 else "dep", "X", ner[i])
    return builder


# ---------------------------------------------------------------------------
# Statement templates.  Each returns (builder, mentions, clauses) where
# mentions maps surface string -> label for document embedding.

def template_founded(person: str, org: str, place: str, date: str):
    b = SentenceBuilder()
    subj = b.entity(person, "PERSON", head=-100, deprel="nsubj")
    verb = b.add("founded", ROOT, "root", "VERB")
    b.rows[subj]["head"] = verb
    b.entity(org, "ORG", verb, "dobj")
    prep1 = b.add("in", verb, "prep", "ADP")
    b.entity(place, "GPE", prep1, "pobj")
    prep2 = b.add("in", verb, "prep", "ADP")
    d = b.entity(date, "DATE", prep2, "pobj", pos="NOUN")
    b.rows[d + 1]["deprel"] = "nummod"
    b.add(".", verb, "punct", "PUNCT")
    return b, {person: "PERSON", org: "ORG", place: "GPE", date: "DATE"}, None


def template_announced(org: str, person: str, work: str, date: str):
    b = SentenceBuilder()
    subj = b.entity(org, "ORG", head=-100, deprel="nsubj")
    verb = b.add("announced", ROOT, "root", "VERB")
    b.rows[subj]["head"] = verb
    comp = b.add("that", -100, "mark", "SCONJ")
    psubj = b.entity(person, "PERSON", -100, "nsubj")
    would = b.add("would", -100, "aux", "AUX")
    direct = b.add("direct", verb, "ccomp", "VERB")
    b.rows[comp]["head"] = direct
    b.rows[psubj]["head"] = direct
    b.rows[would]["head"] = direct
    b.entity(work, "WORK_OF_ART", direct, "dobj")
    prep = b.add("in", direct, "prep", "ADP")
    d = b.entity(date, "DATE", prep, "pobj", pos="NOUN")
    b.rows[d + 1]["deprel"] = "nummod"
    b.add(".", verb, "punct", "PUNCT")
    return b, {org: "ORG", person: "PERSON", work: "WORK_OF_ART", date: "DATE"}, None


def template_sold(person: str, work: str, org: str, money: str):
    b = SentenceBuilder()
    subj = b.entity(person, "PERSON", head=-100, deprel="nsubj")
    verb = b.add("sold", ROOT, "root", "VERB")
    b.rows[subj]["head"] = verb
    b.entity(work, "WORK_OF_ART", verb, "dobj")
    to = b.add("to", verb, "prep", "ADP")
    b.entity(org, "ORG", to, "pobj")
    for_ = b.add("for", verb, "prep", "ADP")
    a = b.add("a", -100, "det", "DET")
    fee = b.add("fee", for_, "pobj", "NOUN")
    b.rows[a]["head"] = fee
    of = b.add("of", fee, "prep", "ADP")
    b.entity(money, "MONEY", of, "pobj", pos="NUM")
    b.add(".", verb, "punct", "PUNCT")
    return b, {person: "PERSON", work: "WORK_OF_ART", org: "ORG", money: "MONEY"}, None


def template_moved(person: str, place: str, org: str, date: str):
    b = SentenceBuilder()
    in_ = b.add("In", -100, "prep", "ADP")
    d = b.entity(date, "DATE", in_, "pobj", pos="NOUN")
    b.rows[d + 1]["deprel"] = "nummod"
    b.add(",", -100, "punct", "PUNCT")
    subj = b.entity(person, "PERSON", -100, "nsubj")
    verb = b.add("moved", ROOT, "root", "VERB")
    for row in (in_, in_ + 3, subj):
        b.rows[row]["head"] = verb
    to = b.add("to", verb, "prep", "ADP")
    b.entity(place, "GPE", to, "pobj")
    b.add("and", verb, "cc", "CCONJ")
    joined = b.add("joined", verb, "conj", "VERB")
    b.entity(org, "ORG", joined, "dobj")
    b.add(".", verb, "punct", "PUNCT")
    return b, {person: "PERSON", place: "GPE", org: "ORG", date: "DATE"}, None


TEMPLATES = (template_founded, template_announced, template_sold, template_moved)


def paraphrase_sentences(kind: int, mentions: dict[str, str], rng: random.Random) -> list[list]:
    """Document sentences embedding the statement's entities."""
    items = list(mentions.items())
    lead = [
        "Records show that", "Archives confirm that", "It is documented that",
        "Reports from the period state that",
    ][kind % 4].split()
    words = list(lead)
    entities = []
    for surface, label in items:
        connector = rng.choice([["alongside"], ["and", "later"], ["as", "well", "as"], ["near"]])
        if entities:
            words.extend(connector)
        entities.append((len(words), len(surface.split()), label))
        words.extend(surface.split())
    words.extend("were linked in the city ledger .".split())
    return [(words, entities)]


def quote_sentence(statement_builder: SentenceBuilder) -> tuple[list, list]:
    """Near-verbatim reuse of the statement for high bigram overlap."""
    words = ["According", "to", "the", "ledger", ","]
    entities = []
    for row in statement_builder.rows:
        if row["text"] == ".":
            continue
        if row["ner"].startswith("B-"):
            entities.append([len(words), 1, row["ner"][2:]])
        elif row["ner"].startswith("I-") and entities:
            entities[-1][1] += 1
        words.append(row["text"])
    words.append(".")
    return words, [tuple(e) for e in entities]


def build_document(sentences: list[tuple[list, list]]) -> dict:
    out_sentences = []
    text_parts = []
    offset = 0
    for words, entities in sentences:
        builder = chain_sentence(list(words), list(entities))
        tokens, text = builder.tokens(offset)
        out_sentences.append(tokens)
        text_parts.append(text)
        offset += len(text) + 1
    return {"text": " ".join(text_parts), "sentences": out_sentences}


def make_pair(index: int, rng: random.Random) -> dict:
    template = TEMPLATES[index % len(TEMPLATES)]
    person = PEOPLE[index % len(PEOPLE)]
    org = ORGS[index % len(ORGS)]
    place = PLACES[index % len(PLACES)]
    date = DATES[index % len(DATES)]
    money = MONEY[index % len(MONEY)]
    work = WORKS[index % len(WORKS)]

    if template is template_founded:
        builder, mentions, clauses = template(person, org, place, date)
    elif template is template_announced:
        builder, mentions, clauses = template(org, person, work, date)
    elif template is template_sold:
        builder, mentions, clauses = template(person, work, org, money)
    else:
        builder, mentions, clauses = template(person, place, org, date)

    tokens, text = builder.tokens()
    statement = {"text": text, "tokens": tokens}
    # Every fourth pair ships explicit clause spans (the full statement
    # minus final punctuation) instead of relying on tree fallback.
    if index % 4 == 3:
        statement["clauses"] = [[0, len(tokens) - 1]]

    doc_sentences: list[tuple[list, list]] = []
    style = index % 5
    if style == 4:
        # Relevance-gate victim: filler only, entities absent.
        doc_sentences = [(s.split(), []) for s in rng.sample(FILLER, 3)]
    else:
        doc_sentences.extend(paraphrase_sentences(index, mentions, rng))
        if style in (0, 2):
            doc_sentences.append(quote_sentence(builder))
        doc_sentences.append((rng.choice(FILLER).split(), []))
        if style == 1:
            doc_sentences.append((rng.choice(FILLER).split(), []))

    if index == 49:
        # Word-cap victim: pad far past 1000 tokens so the build truncates.
        while sum(len(w) for w, _ in doc_sentences) < 1100:
            doc_sentences.append((rng.choice(FILLER).split(), []))

    return {
        "id": f"pair-{index:04d}",
        "statement": statement,
        "document": build_document(doc_sentences),
        "meta": {"title": f"Toy page {index:04d}", "url": f"https://example.org/{index:04d}"},
    }


def main() -> None:
    rng = random.Random(20240101)
    out = Path(__file__).resolve().parent.parent / "tests" / "data" / "toy_pairs.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as handle:
        for index in range(50):
            handle.write(json.dumps(make_pair(index, rng), ensure_ascii=False) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
