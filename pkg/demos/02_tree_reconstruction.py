#!/usr/bin/env python3
"""Trace the dependency-reconstruction translator on a worked example.

Shows the cloze tree, which subtrees get pruned, the path that is moved
to the front at every ancestor, and the final linearization, next to the
identity and noise baselines.
"""

from qasynth.answers import AnswerCandidate
from qasynth.corpus import ROOT, AnnotatedSentence, Token
from qasynth.questions import (
    make_cloze,
    translate_drc,
    translate_identity,
    translate_noise,
)

# "it finished first in the Arbitron ratings in April 1990", answer "Arbitron".
# With "the" attached under "Arbitron", step 1 prunes it away.
words = "it finished first in the Arbitron ratings in April 1990".split()
heads = [1, ROOT, 1, 1, 5, 6, 3, 1, 7, 8]
deprels = ["nsubj", "root", "advmod", "prep", "det", "compound",
           "pobj", "prep", "pobj", "nummod"]
ner = ["O"] * 10
ner[5] = "B-ORG"

tokens, offset = [], 0
for i, word in enumerate(words):
    tokens.append(Token(i, word, offset, offset + len(word), heads[i], deprels[i], "X", ner[i]))
    offset += len(word) + 1
statement = AnnotatedSentence(" ".join(words), tuple(tokens))

candidate = AnswerCandidate(
    text="Arbitron", ner_label="ORG", mask_category="ORG",
    statement_span=(tokens[5].char_start, tokens[5].char_end), clause=(0, 10),
)

# ---------------------------------------------------------------------------
# 1. The cloze: answer collapsed to a category mask node.

cloze = make_cloze(statement, (0, 10), candidate)
print("cloze :", cloze.text)
print("tree  :")
for tok in cloze.tokens:
    head = "ROOT" if tok.head == ROOT else cloze.tokens[tok.head].text
    marker = "  <- mask" if tok.index == cloze.mask_index else ""
    print(f"    {tok.index:>2}  {tok.text:<10} -> {head:<10} ({tok.deprel}){marker}")

# ---------------------------------------------------------------------------
# 2. What reconstruction does here:
#    - 'the' is a left dependent of the mask: its subtree is pruned;
#    - on the path root->mask (finished -> in -> ratings -> [ORG]) each
#      child is moved to the front of its parent's child list;
#    - inorder traversal then emits the mask first, so the question word
#      leads the output.

print()
print("identity :", translate_identity(cloze).text)
print("noise    :", translate_noise(cloze, p_drop=0.1, k_window=3, seed=4).text)
print("drc      :", translate_drc(cloze).text)

# The noise baseline is deterministic per seed:
assert (translate_noise(cloze, 0.1, 3, seed=4).text
        == translate_noise(cloze, 0.1, 3, seed=4).text)

# Token conservation: drc only drops the pruned left subtree of the mask.
drc_words = translate_drc(cloze).text.split(" ")
assert sorted(drc_words) == sorted(
    ["Who"] + [w for w in words if w not in ("Arbitron", "the")]
)
print()
print("conservation check passed: output = input - pruned lefts, mask -> wh word")
