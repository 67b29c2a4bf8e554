"""Word-level text tokenizer with fixed-length CLS/SEP framing.

The prompt front end is a corpus-derived vocabulary whose embeddings are
learned jointly with the rest of the model; it keeps the contract of a
pretrained tokenizer (fixed-length framed id sequences) without the
external dependency.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TEXT_LEN = 50

PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
SEP_ID = 3
RESERVED = 4
_RESERVED_NAMES = ("<pad>", "<unk>", "<cls>", "<sep>")

_WORD_SPLIT = re.compile(r"[^a-z0-9]+")


class VocabError(ValueError):
    pass


def tokenize_words(text: str) -> list[str]:
    """Lowercase and split on whitespace and punctuation."""
    return [w for w in _WORD_SPLIT.split(text.lower()) if w]


@dataclass(frozen=True)
class TextVocab:
    """token <-> id bijection; words start after the 4 reserved ids."""

    words: tuple[str, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {w: RESERVED + i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise VocabError("duplicate word in vocabulary")
        object.__setattr__(self, "_index", index)

    @property
    def size(self) -> int:
        return RESERVED + len(self.words)

    def id_of(self, word: str) -> int:
        return self._index.get(word, UNK_ID)

    def word_of(self, tid: int) -> str:
        if 0 <= tid < RESERVED:
            return _RESERVED_NAMES[tid]
        if RESERVED <= tid < self.size:
            return self.words[tid - RESERVED]
        raise VocabError(f"id {tid} outside vocabulary of size {self.size}")

    def fingerprint(self) -> str:
        h = hashlib.sha256("\n".join(self.words).encode("utf-8"))
        return h.hexdigest()

    def save(self, path) -> None:
        # one word per line; line number = id - RESERVED
        with open(path, "w", encoding="utf-8") as fh:
            for w in self.words:
                fh.write(w + "\n")

    @classmethod
    def load(cls, path) -> "TextVocab":
        with open(path, "r", encoding="utf-8") as fh:
            words = tuple(line.strip() for line in fh if line.strip())
        return cls(words)


def build_text_vocab(corpus: Iterable[str], min_freq: int = 2) -> TextVocab:
    """Deterministic vocabulary: frequency desc, then lexicographic."""
    counts: dict[str, int] = {}
    seen_any = False
    for text in corpus:
        seen_any = True
        for w in tokenize_words(text):
            counts[w] = counts.get(w, 0) + 1
    if not seen_any:
        raise VocabError("cannot build a vocabulary from an empty corpus")
    kept = [w for w, c in counts.items() if c >= min_freq]
    kept.sort(key=lambda w: (-counts[w], w))
    return TextVocab(tuple(kept))


def encode_text(prompt: str, vocab: TextVocab) -> list[int]:
    """Frame a prompt as [CLS] words... [SEP] PAD... of length TEXT_LEN."""
    ids = [vocab.id_of(w) for w in tokenize_words(prompt)][: TEXT_LEN - 2]
    out = [CLS_ID] + ids + [SEP_ID]
    out.extend([PAD_ID] * (TEXT_LEN - len(out)))
    return out


def encode_keywords(
    keywords: Sequence[str], vocab: TextVocab, rng: np.random.Generator
) -> list[int]:
    """Keyword-mode framing: permute the keywords, then encode as text."""
    order = list(keywords)
    rng.shuffle(order)
    return encode_text(" ".join(order), vocab)
