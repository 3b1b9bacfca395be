from __future__ import annotations

import pytest

from qasynth.answers import (
    decode_bio,
    extract_candidates,
    extract_subclauses,
    locate_answer,
)
from qasynth.textutil import DEFAULT_STOPWORDS, content_tokens

from conftest import build_document, build_sentence


def flat_statement(words, ner=None, clauses=None):
    heads = [-1] + [0] * (len(words) - 1)
    deprels = ["root"] + ["dep"] * (len(words) - 1)
    return build_sentence(words, heads, deprels, ner=ner, clauses=clauses)


class TestExtractSubclauses:
    def test_single_clause_statement(self):
        statement = flat_statement([f"w{i}" for i in range(10)])
        assert extract_subclauses(statement, 6) == [(0, 10)]

    def test_provided_clauses_filtered_by_min_tokens(self):
        statement = flat_statement([f"w{i}" for i in range(12)], clauses=((0, 8), (8, 12)))
        assert extract_subclauses(statement, 6) == [(0, 8)]

    def test_short_statement_yields_nothing(self):
        statement = flat_statement([f"w{i}" for i in range(5)])
        assert extract_subclauses(statement, 6) == []

    def test_clausal_subtree_added(self, hyundai):
        statement, clause, _candidate = hyundai
        spans = extract_subclauses(statement, 6)
        assert (0, len(statement.tokens)) in spans  # root's full span
        assert clause in spans  # the ccomp subtree

    def test_verbal_conjunct_counts_as_clause(self):
        words = "she wrote novels and edited films weekly here".split()
        heads = [1, -1, 1, 1, 1, 4, 4, 4]
        deprels = ["nsubj", "root", "dobj", "cc", "conj", "dobj", "advmod", "advmod"]
        pos = ["PRON", "VERB", "NOUN", "CCONJ", "VERB", "NOUN", "ADV", "ADV"]
        statement = build_sentence(words, heads, deprels, pos=pos)
        spans = extract_subclauses(statement, min_tokens=4)
        assert (4, 8) in spans


class TestExtractCandidates:
    def test_entity_present_in_document(self, guillermo):
        statement, _ = guillermo
        document = build_document(
            "The comedy Tour de Pharmacy premiered on television .".split(),
            entities={(0, 2, 3): "PRODUCT"},
        )
        candidates = extract_candidates(statement, (0, 13), document)
        texts = {(c.text, c.mask_category) for c in candidates}
        assert ("Tour de Pharmacy", "THING") in texts

    def test_loc_maps_to_place(self):
        statement = flat_statement(
            "she arrived in Paris yesterday".split(),
            ner=["O", "O", "O", "B-LOC", "O"],
        )
        document = build_document("A reporter saw her near Paris that morning .".split())
        candidates = extract_candidates(statement, (0, 5), document)
        assert [(c.text, c.mask_category) for c in candidates] == [("Paris", "PLACE")]

    def test_absent_entity_not_a_candidate(self, guillermo):
        statement, _ = guillermo
        document = build_document("Nothing relevant appears in this text .".split())
        assert extract_candidates(statement, (0, 13), document) == []

    def test_unknown_label_maps_to_thing(self, caplog):
        statement = flat_statement(
            "the Zephyr device shipped early".split(),
            ner=["O", "B-GADGET", "O", "O", "O"],
        )
        document = build_document("Reviews praised the Zephyr at launch .".split())
        candidates = extract_candidates(statement, (0, 5), document)
        assert candidates[0].mask_category == "THING"

    def test_matching_is_case_insensitive(self):
        statement = flat_statement(
            "ACME opened offices downtown yesterday".split(),
            ner=["B-ORG", "O", "O", "O", "O"],
        )
        document = build_document("the acme branch was busy .".split())
        candidates = extract_candidates(statement, (0, 5), document)
        assert len(candidates) == 1
        assert candidates[0].text == "ACME"  # statement-side casing retained

    def test_clause_bounds_checked(self, guillermo):
        statement, _ = guillermo
        document = build_document("x y .".split())
        with pytest.raises(ValueError, match="outside statement bounds"):
            extract_candidates(statement, (0, 99), document)

    def test_dangling_i_tag_opens_mention(self):
        statement = flat_statement(
            "report on Atlas Rail holdings".split(),
            ner=["O", "O", "I-ORG", "I-ORG", "O"],
        )
        mentions = decode_bio(statement.tokens, 0, 5)
        assert mentions == [(2, 3, "ORG")]


class TestLocateAnswer:
    def _candidate(self, statement, text, label="ORG", category="ORG"):
        start = statement.text.index(text)
        from qasynth.answers import AnswerCandidate

        return AnswerCandidate(text, label, category, (start, start + len(text)),
                               (0, len(statement.tokens)))

    def test_single_occurrence(self):
        statement = flat_statement("Helios opened a plant".split(), ner=["B-ORG", "O", "O", "O"])
        document = build_document("The Helios factory runs daily .".split())
        span = locate_answer(document, self._candidate(statement, "Helios"), statement)
        assert document.text[span.char_start:span.char_end] == "Helios"

    def test_picks_occurrence_with_max_overlap(self):
        statement = flat_statement(
            "Helios opened a plant in Tallinn".split(),
            ner=["B-ORG", "O", "O", "O", "O", "B-GPE"],
        )
        document = build_document(
            "Helios was mentioned once without detail .".split(),
            "Later Helios opened its new plant near Tallinn .".split(),
        )
        candidate = self._candidate(statement, "Helios")
        span = locate_answer(document, candidate, statement, window=10)
        # Brute-force oracle: recompute overlap for every occurrence.
        occurrences = _occurrence_overlaps(document, statement, "Helios", window=10)
        best = max(occurrences, key=lambda pair: pair[1])
        assert span.char_start == best[0]
        assert occurrences[0][1] < occurrences[1][1]  # second one really is better
        assert span.char_start == occurrences[1][0]

    def test_tie_breaks_to_earliest(self):
        statement = flat_statement("Helios grew fast".split(), ner=["B-ORG", "O", "O"])
        document = build_document(
            "Helios alpha beta .".split(),
            "Helios gamma delta .".split(),
        )
        span = locate_answer(document, self._candidate(statement, "Helios"), statement)
        assert span.char_start == 0

    def test_span_keeps_document_casing(self):
        statement = flat_statement("HELIOS grew fast".split(), ner=["B-ORG", "O", "O"])
        document = build_document("the helios story continued .".split())
        span = locate_answer(document, self._candidate(statement, "HELIOS"), statement)
        assert span.text == "helios"
        assert document.text[span.char_start:span.char_end] == "helios"

    def test_missing_answer_raises(self):
        statement = flat_statement("Helios grew fast".split(), ner=["B-ORG", "O", "O"])
        document = build_document("nothing here .".split())
        with pytest.raises(ValueError, match="not in document"):
            locate_answer(document, self._candidate(statement, "Helios"), statement)


def _occurrence_overlaps(document, statement, needle, window):
    """Independent recomputation of the window-overlap score per occurrence."""
    from qasynth.textutil import find_occurrences

    statement_set = content_tokens((t.text for t in statement.tokens), DEFAULT_STOPWORDS)
    tokens = list(document.all_tokens())
    result = []
    for start, end in find_occurrences(needle, document.text):
        inside = [i for i, t in enumerate(tokens) if t.char_end > start and t.char_start < end]
        before = tokens[max(0, inside[0] - window):inside[0]]
        after = tokens[inside[-1] + 1:inside[-1] + 1 + window]
        window_set = content_tokens((t.text for t in before + after), DEFAULT_STOPWORDS)
        result.append((start, len(window_set & statement_set)))
    return result
