"""Shared test utilities: random-tree generation and corruption helpers."""
from __future__ import annotations

import random

from udicl.conllu import Document, Sentence, Token

FORMS = ["m", "p", "pai", "d1w", "eh1rai", "auw", "rmh", "et", "na", "ne", "bwk", "laau", "swtm"]
LEMMAS = ["n", "p", "pai", "d1w", "eh1rai", "auw", "rmh", "etere", "na", "ne", "bwk", "laau", "swtm"]
UPOS = ["NOUN", "VERB", "PROPN", "ADP", "ADV", "PRON", "AUX", "DET", "NUM", "CCONJ", "SCONJ", "PUNCT", "ADJ"]
DEPRELS = ["nsubj", "obj", "obl", "advmod", "case", "det", "aux", "mark", "cc", "conj", "ccomp", "acl:relcl", "dislocated", "amod", "nmod"]


def random_sentence(rng: random.Random, max_tokens: int = 15, sent_index: int = 0) -> Sentence:
    n = rng.randint(1, max_tokens)
    root_id = rng.randint(1, n)
    # attach every non-root token to a node already connected to the root
    attached = [root_id]
    heads = {root_id: 0}
    order = [i for i in range(1, n + 1) if i != root_id]
    rng.shuffle(order)
    for tid in order:
        heads[tid] = rng.choice(attached)
        attached.append(tid)

    tokens = []
    for tid in range(1, n + 1):
        feats = ()
        if rng.random() < 0.25:
            feats = (("VerbForm", rng.choice(["Imp", "Fin"])),)
        tokens.append(
            Token(
                id=tid,
                form=rng.choice(FORMS),
                lemma=rng.choice(LEMMAS),
                upos=rng.choice(UPOS),
                xpos="X" + str(rng.randint(0, 3)),
                feats=feats,
                head=heads[tid],
                deprel="root" if heads[tid] == 0 else rng.choice(DEPRELS),
                deps="",
                misc="",
            )
        )
    return Sentence(
        tokens=tuple(tokens),
        metadata=(f"# sent_id = rnd-{sent_index}",),
        source_id=f"rnd-{sent_index}",
    )


def random_document(rng: random.Random, n_sentences: int = 3, max_tokens: int = 15) -> Document:
    sents = tuple(random_sentence(rng, max_tokens, i) for i in range(n_sentences))
    return Document(sentences=sents, origin="generated")
