"""Cloze generation and cloze-to-question translation.

A cloze keeps the sub-clause's dependency tree with the answer mention
collapsed into a single category mask node.  Three translators turn a
cloze into a question string:

* identity  - swap the mask for its question word, order untouched;
* noise     - seeded word drop plus a local shuffle, then identity;
* drc       - dependency reconstruction: prune the mask node's left
              dependents, bubble the mask-bearing child to the front at
              every ancestor, and linearize the rebuilt tree.

The linearization contract for ``drc`` is: each node emits the moved
child's subtree first (when it has one), then its remaining left
dependents in surface order, itself, then its remaining right
dependents in surface order.  Leading and trailing punctuation-only
tokens are dropped from the final sequence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .categories import mask_token, wh_word
from .corpus import AnnotatedSentence, ROOT, Token
from .textutil import is_punctuation

__all__ = [
    "ClozeQuestion",
    "NaturalQuestion",
    "make_cloze",
    "translate_identity",
    "translate_noise",
    "translate_drc",
    "wh_word",
]


@dataclass(frozen=True)
class ClozeQuestion:
    """A sub-clause with the answer mention replaced by one mask token.

    ``tokens`` carry the clause-restricted dependency tree (heads are
    reindexed; heads pointing outside the clause were reattached to the
    clause root).  The mask token sits at the answer head's position.
    """

    tokens: tuple[Token, ...]
    mask_index: int
    mask_category: str
    answer: object  # the originating AnswerCandidate

    @property
    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)


@dataclass(frozen=True)
class NaturalQuestion:
    text: str
    method: str  # identity | noise | drc
    source: ClozeQuestion


def _depths(tokens: tuple[Token, ...]) -> list[int]:
    depth = [-1] * len(tokens)

    def resolve(i: int) -> int:
        if depth[i] >= 0:
            return depth[i]
        head = tokens[i].head
        depth[i] = 0 if head == ROOT else resolve(head) + 1
        return depth[i]

    for i in range(len(tokens)):
        resolve(i)
    return depth


def _children(tokens: tuple[Token, ...]) -> list[list[int]]:
    table: list[list[int]] = [[] for _ in tokens]
    for tok in tokens:
        if tok.head != ROOT:
            table[tok.head].append(tok.index)
    return table


def _subtree(children: list[list[int]], node: int) -> set[int]:
    seen = {node}
    stack = [node]
    while stack:
        for child in children[stack.pop()]:
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return seen


def make_cloze(statement: AnnotatedSentence, clause: tuple[int, int], answer) -> ClozeQuestion:
    """Collapse the answer mention of a clause into a category mask node.

    The clause's tree is restricted and reindexed: the clause root is
    the in-clause token nearest the sentence root, and any other token
    whose head lies outside the clause is reattached to it.  The mask
    node inherits the answer head token's head and relation; dependents
    of removed answer tokens are reattached to the mask.
    """
    cstart, cend = clause
    span_start, span_end = answer.statement_span
    tokens = statement.tokens

    overlapping = [
        t.index for t in tokens if t.char_end > span_start and t.char_start < span_end
    ]
    if not overlapping:
        raise ValueError("answer span covers no tokens")
    if any(not cstart <= i < cend for i in overlapping):
        raise ValueError("answer span crosses clause boundary")
    if (
        tokens[overlapping[0]].char_start != span_start
        or tokens[overlapping[-1]].char_end != span_end
    ):
        raise ValueError("answer span not aligned to token boundaries")

    depth = _depths(tokens)
    in_clause = set(range(cstart, cend))

    # Clause root: the token nearest the sentence root among those whose
    # head leaves the clause.
    detached = [i for i in in_clause if tokens[i].head == ROOT or tokens[i].head not in in_clause]
    clause_root = min(detached, key=lambda i: (depth[i], i))
    heads: dict[int, int] = {}
    for i in in_clause:
        if i == clause_root:
            heads[i] = ROOT
        elif tokens[i].head in in_clause:
            heads[i] = tokens[i].head
        else:
            heads[i] = clause_root

    answer_set = set(overlapping)
    anchors = [i for i in overlapping if heads[i] == ROOT or heads[i] not in answer_set]
    anchor = min(anchors, key=lambda i: (depth[i], i))

    order: list[int | None] = []  # None marks the mask slot
    for i in sorted(in_clause):
        if i in answer_set:
            if i == overlapping[0]:
                order.append(None)
        else:
            order.append(i)
    new_index = {}
    mask_index = order.index(None)
    for pos, item in enumerate(order):
        if item is not None:
            new_index[item] = pos
    for i in answer_set:
        new_index[i] = mask_index

    def remap(head: int) -> int:
        return ROOT if head == ROOT else new_index[head]

    rebuilt = []
    for pos, item in enumerate(order):
        if item is None:
            rebuilt.append(
                Token(
                    index=pos,
                    text=mask_token(answer.mask_category),
                    char_start=span_start,
                    char_end=span_end,
                    head=remap(heads[anchor]),
                    deprel=tokens[anchor].deprel,
                    pos=tokens[anchor].pos,
                    ner="O",
                )
            )
        else:
            t = tokens[item]
            rebuilt.append(
                Token(
                    index=pos,
                    text=t.text,
                    char_start=t.char_start,
                    char_end=t.char_end,
                    head=remap(heads[item]),
                    deprel=t.deprel,
                    pos=t.pos,
                    ner=t.ner,
                )
            )
    return ClozeQuestion(
        tokens=tuple(rebuilt),
        mask_index=mask_index,
        mask_category=answer.mask_category,
        answer=answer,
    )


def translate_identity(cloze: ClozeQuestion) -> NaturalQuestion:
    """Swap the mask for its question word; token order untouched."""
    parts = [
        wh_word(cloze.mask_category) if t.index == cloze.mask_index else t.text
        for t in cloze.tokens
    ]
    return NaturalQuestion(" ".join(parts), "identity", cloze)


def translate_noise(
    cloze: ClozeQuestion,
    p_drop: float = 0.1,
    k_window: int = 3,
    seed: int = 0,
) -> NaturalQuestion:
    """Seeded word drop and local shuffle, then identity translation.

    Every non-mask token is dropped with probability ``p_drop``; the
    survivors are then permuted by sorting position + U(0, k_window+1),
    which moves no survivor more than ``k_window`` slots.  Deterministic
    given the seed.
    """
    if not 0.0 <= p_drop < 1.0:
        raise ValueError("p_drop must be in [0, 1)")
    rng = random.Random(seed)
    survivors = [
        t.index
        for t in cloze.tokens
        if t.index == cloze.mask_index or rng.random() >= p_drop
    ]
    keys = [pos + rng.uniform(0, k_window + 1) for pos in range(len(survivors))]
    shuffled = sorted(range(len(survivors)), key=keys.__getitem__)
    parts = []
    for pos in shuffled:
        idx = survivors[pos]
        parts.append(
            wh_word(cloze.mask_category) if idx == cloze.mask_index else cloze.tokens[idx].text
        )
    return NaturalQuestion(" ".join(parts), "noise", cloze)


def translate_drc(cloze: ClozeQuestion) -> NaturalQuestion:
    """Rebuild the tree around the mask and linearize it as a question.

    Step 1 deletes the subtrees of the mask node's left dependents (its
    right dependents are kept).  Step 2 walks from the mask up to the
    root and marks, at each ancestor, the child whose subtree contains
    the mask as that ancestor's first-emitted child.  Step 3 linearizes
    per the module contract, rendering the mask as its question word.
    """
    tokens = cloze.tokens
    mask = cloze.mask_index
    if not any(t.index == mask for t in tokens):
        raise ValueError("mask node absent from cloze")
    children = _children(tokens)
    root = next(t.index for t in tokens if t.head == ROOT)

    pruned: set[int] = set()
    for child in children[mask]:
        if child < mask:
            pruned |= _subtree(children, child)

    moved: dict[int, int] = {}
    node = mask
    while tokens[node].head != ROOT:
        moved[tokens[node].head] = node
        node = tokens[node].head

    def emit(i: int) -> list[str]:
        parts: list[str] = []
        front = moved.get(i)
        if front is not None:
            parts += emit(front)
        for child in children[i]:
            if child != front and child not in pruned and child < i:
                parts += emit(child)
        parts.append(wh_word(cloze.mask_category) if i == mask else tokens[i].text)
        for child in children[i]:
            if child != front and child not in pruned and child > i:
                parts += emit(child)
        return parts

    parts = emit(root)
    while parts and is_punctuation(parts[0]):
        parts.pop(0)
    while parts and is_punctuation(parts[-1]):
        parts.pop()
    return NaturalQuestion(" ".join(parts), "drc", cloze)
