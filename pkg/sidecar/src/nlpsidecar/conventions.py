"""Shared text conventions: tokenization, sentence splitting, sentence hash.

The sentence hash (first 8 bytes of sha256 over utf-8 text, hex) and the
embedding file formats written by batch mode are wire contracts with the
analysis toolkit; change them only in lockstep.
"""

from __future__ import annotations

import hashlib
import re

_SENT_BOUNDARY = re.compile(r"(?<=[.!?])\s+")
_TOKEN = re.compile(r"\w+(?:'\w+)?|[^\w\s]")
_WORD = re.compile(r"[^\W\d_]")


def split_sentences(text: str) -> list[str]:
    return [s for s in _SENT_BOUNDARY.split(text) if s.strip()]


def tokenize(text: str) -> list[str]:
    """Words (underscore-fused tokens stay whole) and punctuation marks."""
    return _TOKEN.findall(text)


def is_punct(token: str) -> bool:
    return not any(c.isalnum() or c == "_" for c in token)


def is_number(token: str) -> bool:
    return bool(token) and all(c.isdigit() or c in ".,-" for c in token)


def has_letters(token: str) -> bool:
    return bool(_WORD.search(token)) or "_" in token


def sentence_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).digest()[:8].hex()
