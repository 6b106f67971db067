"""Deterministic synthetic corpora for tests, demos and throughput checks.

Gold sentences come from a small template grammar over the bundled tag
inventory; :func:`confuse_corpus` then adds plausible wrong candidates so
the parser has something to disambiguate.
"""

from __future__ import annotations

import logging
import random

from app.corpus import Corpus, Sentence, Token
from app.tagset import PUNCT, Tag, TagInventory, default_inventory

LOGGER = logging.getLogger(__name__)

_WORDS: dict[Tag, tuple[str, ...]] = {
    "DN>": ("the", "a", "this", "every"),
    "GN>": ("their", "its", "our"),
    "QN>": ("some", "many", "two", "more"),
    "AN>": ("local", "big", "fair", "new", "public", "small"),
    "NN>": ("car", "county", "tax", "school", "bus"),
    "AD-A>": ("very", "much", "rather"),
    "SUBJ": ("council", "minister", "she", "they", "company", "board"),
    "OBJ": ("rules", "help", "receipts", "benefit", "plans", "money"),
    "I-OBJ": ("us", "them", "councils"),
    "PCOMPL-S": ("ready", "happy", "attentive"),
    "+FAUXV": ("would", "will", "has", "can", "must"),
    "+FMAINV": ("gives", "relaxed", "spends", "increased", "wants"),
    "-FMAINV": ("give", "relax", "spend", "increase", "allow"),
    "<NOM-FMAINV": ("governing", "covering", "allowing"),
    "INFMARK>": ("to",),
    "ADVL": ("also", "today", "now", "here"),
    "<P": ("industry", "town", "region", "week"),
    "CC": ("and", "but"),
}

_PREPOSITIONS = ("in", "for", "to", "across")

# Tags a morphosyntactic analyser could plausibly confuse with the gold tag.
DISTRACTORS: dict[Tag, tuple[Tag, ...]] = {
    "SUBJ": ("OBJ", "PCOMPL-S", "I-OBJ"),
    "OBJ": ("SUBJ", "I-OBJ", "PCOMPL-O", "<P"),
    "I-OBJ": ("OBJ", "SUBJ"),
    "+FAUXV": ("+FMAINV",),
    "+FMAINV": ("-FMAINV", "+FAUXV"),
    "-FMAINV": ("+FMAINV", "<NOM-FMAINV", "<P-FMAINV"),
    "<NOM-FMAINV": ("-FMAINV", "<P-FMAINV"),
    "DN>": ("GN>", "QN>"),
    "GN>": ("DN>",),
    "QN>": ("DN>", "PCOMPL-S"),
    "AN>": ("NN>", "PCOMPL-S", "<NOM"),
    "NN>": ("AN>", "SUBJ", "OBJ"),
    "AD-A>": ("ADVL", "AN>"),
    "ADVL": ("<NOM", "AD-A>", "O-ADVL"),
    "PCOMPL-S": ("OBJ", "AN>"),
    "INFMARK>": ("ADVL",),
    "<P": ("OBJ", "SUBJ"),
    "CC": ("CS",),
}


def _word(rng: random.Random, tag: Tag) -> tuple[str, Tag]:
    return rng.choice(_WORDS[tag]), tag


def _noun_phrase(rng: random.Random, head: Tag) -> list[tuple[str, Tag]]:
    words: list[tuple[str, Tag]] = []
    if rng.random() < 0.7:
        words.append(_word(rng, rng.choice(("DN>", "DN>", "GN>", "QN>"))))
    if rng.random() < 0.3:
        if rng.random() < 0.3:
            words.append(_word(rng, "AD-A>"))
        words.append(_word(rng, "AN>"))
    if rng.random() < 0.25:
        words.append(_word(rng, "NN>"))
    words.append(_word(rng, head))
    if head in ("OBJ", "SUBJ") and rng.random() < 0.15:
        words.append(_word(rng, "<NOM-FMAINV"))
        words.extend(_noun_phrase(rng, "OBJ"))
    return words


def _prepositional_phrase(rng: random.Random) -> list[tuple[str, Tag]]:
    words = [(rng.choice(_PREPOSITIONS), "ADVL")]
    if rng.random() < 0.8:
        words.append(_word(rng, "DN>"))
    if rng.random() < 0.3:
        words.append(_word(rng, "NN>"))
    words.append(_word(rng, "<P"))
    return words


def _verb_phrase(rng: random.Random, *, finite: bool) -> list[tuple[str, Tag]]:
    words: list[tuple[str, Tag]] = []
    if finite and rng.random() < 0.5:
        words.append(_word(rng, "+FAUXV"))
        if rng.random() < 0.3:
            words.append(_word(rng, "ADVL"))
        words.append(_word(rng, "-FMAINV"))
    elif finite:
        words.append(_word(rng, "+FMAINV"))
    else:
        words.append(_word(rng, "-FMAINV"))
    if rng.random() < 0.2:
        words.extend(_noun_phrase(rng, "I-OBJ"))
    words.extend(_noun_phrase(rng, "OBJ"))
    return words


def _sentence_words(rng: random.Random) -> list[tuple[str, Tag]]:
    words = _noun_phrase(rng, "SUBJ")
    words.extend(_verb_phrase(rng, finite=True))
    if rng.random() < 0.3:
        words.extend(_prepositional_phrase(rng))
    if rng.random() < 0.25:
        words.append(_word(rng, "CC"))
        words.extend(_verb_phrase(rng, finite=False))
    if rng.random() < 0.3:
        words.append(_word(rng, "INFMARK>"))
        words.extend(_verb_phrase(rng, finite=False))
    if rng.random() < 0.2:
        words.append(_word(rng, "ADVL"))
    words.append((".", PUNCT))
    return words


def generate_gold_corpus(
    sentences: int,
    seed: int = 0,
    *,
    texts: int = 1,
    name: str = "synthetic",
) -> Corpus:
    """Build ``sentences`` disambiguated sentences split into ``texts`` samples."""

    if sentences < 1:
        raise ValueError("sentences must be at least 1")
    if texts < 1:
        raise ValueError("texts must be at least 1")
    rng = random.Random(seed)
    per_text = -(-sentences // texts)
    built = []
    for index in range(sentences):
        tokens = tuple(
            Token(form=form, candidates=(tag,), gold=tag)
            for form, tag in _sentence_words(rng)
        )
        text = f"text{index // per_text + 1}" if texts > 1 else None
        built.append(Sentence(id=f"syn{index + 1}", tokens=tokens, text=text))
    corpus = Corpus(name=name, sentences=tuple(built))
    LOGGER.debug("Generated %d sentences (%d tokens)", len(corpus), corpus.token_count)
    return corpus


def _distractor_pool(tag: Tag, inventory: TagInventory) -> list[Tag]:
    pool = [candidate for candidate in DISTRACTORS.get(tag, ()) if candidate in inventory]
    if len(pool) < 2:
        pool.extend(
            candidate for candidate in sorted(inventory.tags) if candidate not in pool and candidate != tag
        )
    return pool


def confuse_corpus(
    gold: Corpus,
    seed: int = 0,
    rate: float = 1.0,
    *,
    inventory: TagInventory | None = None,
) -> Corpus:
    """Give a share ``rate`` of non-punctuation tokens 1-2 extra wrong candidates.

    Candidate order is shuffled with the seeded generator; the gold tag
    stays on every token.
    """

    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must be within [0, 1], got {rate}")
    inventory = inventory or default_inventory()
    rng = random.Random(seed)
    sentences = []
    for sentence in gold.sentences:
        tokens = []
        for token in sentence.tokens:
            tag = token.gold or token.candidates[0]
            if token.is_punct or rng.random() >= rate:
                tokens.append(Token(token.form, (tag,), tag))
                continue
            pool = _distractor_pool(tag, inventory)
            preferred = pool[: max(2, len(DISTRACTORS.get(tag, ())))]
            extra = rng.sample(preferred, min(len(preferred), rng.randint(1, 2)))
            candidates = [tag, *extra]
            rng.shuffle(candidates)
            tokens.append(Token(token.form, tuple(candidates), tag))
        sentences.append(Sentence(sentence.id, tuple(tokens), sentence.text))
    return Corpus(name=gold.name, sentences=tuple(sentences))


__all__ = ["DISTRACTORS", "confuse_corpus", "generate_gold_corpus"]
