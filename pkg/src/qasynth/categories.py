"""Entity-label grouping and question-word tables.

Raw NER labels are grouped into six high-level answer categories; the
category names the mask token (``[THING]`` etc.) and selects the
question word when a cloze is rewritten.
"""

from __future__ import annotations

import logging

logger = logging.getLogger(__name__)

PERSON = "PERSON"
ORG = "ORG"
PLACE = "PLACE"
THING = "THING"
TEMPORAL = "TEMPORAL"
NUMERIC = "NUMERIC"

CATEGORIES = (PERSON, ORG, PLACE, THING, TEMPORAL, NUMERIC)

LABEL_TO_CATEGORY = {
    "PERSON": PERSON,
    "NORP": PERSON,
    "ORG": ORG,
    "GPE": PLACE,
    "LOC": PLACE,
    "FAC": PLACE,
    "PRODUCT": THING,
    "EVENT": THING,
    "WORK_OF_ART": THING,
    "LAW": THING,
    "LANGUAGE": THING,
    "DATE": TEMPORAL,
    "TIME": TEMPORAL,
    "MONEY": NUMERIC,
    "QUANTITY": NUMERIC,
    "PERCENT": NUMERIC,
    "CARDINAL": NUMERIC,
    "ORDINAL": NUMERIC,
}

WH_WORDS = {
    PERSON: "Who",
    ORG: "Who",
    PLACE: "Where",
    TEMPORAL: "When",
    THING: "What",
    NUMERIC: "How much",
}


def mask_category(ner_label: str) -> str:
    """Group a raw entity label into its high-level answer category.

    Unknown labels fall back to THING with a warning so the pipeline
    stays total over whatever tag set the annotator emits.
    """
    category = LABEL_TO_CATEGORY.get(ner_label)
    if category is None:
        logger.warning("unknown NER label %r, mapping to %s", ner_label, THING)
        return THING
    return category


def wh_word(category: str) -> str:
    """Question word for a mask category (e.g. THING -> "What")."""
    try:
        return WH_WORDS[category]
    except KeyError:
        raise ValueError(f"unknown mask category: {category!r}") from None


def mask_token(category: str) -> str:
    return f"[{category}]"
