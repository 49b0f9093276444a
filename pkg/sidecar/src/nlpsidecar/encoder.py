"""Sentence encoders.

The default backend is a self-contained hashed-unigram encoder: each token
is hashed into one of `dim` signed buckets (sha256; bucket from the first 8
bytes, sign from the 9th byte's low bit), stop words contribute at weight
0.2, everything else at 1.0, and the accumulated vector is L2-normalized.
Deterministic across processes and platforms; identical inputs give
identical vectors. A sentence with no tokens maps to the unit vector along
component 0.

A sentence-transformers backend can be selected with a model name when the
weights are available locally; the served provider_id always names the
backend actually loaded.
"""

from __future__ import annotations

import hashlib
import re
from importlib.resources import files

import numpy as np

_STOPWORDS = frozenset(
    line.split("#", 1)[0].strip()
    for line in (files("nlpsidecar") / "data" / "stopwords.txt")
    .read_text(encoding="utf-8")
    .splitlines()
    if line.split("#", 1)[0].strip()
)

_WORDS = re.compile(r"\w+(?:'\w+)?")

STOPWORD_WEIGHT = 0.2


class HashedLexicalEncoder:
    """Deterministic bag-of-hashed-unigrams sentence encoder."""

    def __init__(self, dim: int = 512):
        self.dim = dim
        self.provider_id = f"hashlex-{dim}-v1"
        self.normalizes = True

    def encode(self, sentences: list[str]) -> np.ndarray:
        out = np.zeros((len(sentences), self.dim))
        for i, text in enumerate(sentences):
            vec = out[i]
            for token in _WORDS.findall(text.lower()):
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                bucket = int.from_bytes(digest[:8], "big") % self.dim
                sign = 1.0 if digest[8] & 1 else -1.0
                weight = STOPWORD_WEIGHT if token in _STOPWORDS else 1.0
                vec[bucket] += sign * weight
            norm = float(np.linalg.norm(vec))
            if norm == 0.0:
                vec[0] = 1.0
            else:
                vec /= norm
        return out


class SentenceTransformerEncoder:
    """Optional pretrained backend; requires locally available weights."""

    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer  # deferred heavy import

        self._model = SentenceTransformer(model_name)
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.provider_id = f"st:{model_name}"
        self.normalizes = True

    def encode(self, sentences: list[str]) -> np.ndarray:
        return np.asarray(
            self._model.encode(sentences, normalize_embeddings=True, show_progress_bar=False),
            dtype=float,
        )


def load_encoder(model: str = "hashlex", dim: int = 512):
    """model: "hashlex" or "st:<sentence-transformers model name>"."""
    if model == "hashlex":
        return HashedLexicalEncoder(dim=dim)
    if model.startswith("st:"):
        return SentenceTransformerEncoder(model[3:])
    raise ValueError(f"unknown encoder model {model!r}")
