"""Unsupervised QA data synthesis and iterative refinement.

Turns annotated statement/cited-document pairs into context-question-
answer triples (cloze generation plus dependency-tree reconstruction)
and refines them in place with a pluggable extractive QA predictor.
"""

from .answers import (
    AnswerCandidate,
    AnswerSpan,
    extract_candidates,
    extract_subclauses,
    locate_answer,
)
from .categories import mask_category, wh_word
from .corpus import (
    AnnotatedSentence,
    CorpusFilterConfig,
    Document,
    StatementDocPair,
    Token,
    corpus_filter,
    load_pairs,
    median_rouge2,
    relevance_filter,
    rouge2,
)
from .dataset import (
    BuildConfig,
    DatasetSplit,
    QAExample,
    build_examples,
    read_squad_json,
    sample_split,
    to_squad_json,
)
from .predictor import MockPredictor, Prediction, Predictor, RemotePredictor
from .questions import (
    ClozeQuestion,
    NaturalQuestion,
    make_cloze,
    translate_drc,
    translate_identity,
    translate_noise,
)
from .refine import (
    ClauseQuestionRegenerator,
    RefinementConfig,
    RefinementOutcome,
    Relation,
    Verdict,
    classify_relation,
    combine,
    refine_part,
    run_iterations,
)

__version__ = "0.1.0"
