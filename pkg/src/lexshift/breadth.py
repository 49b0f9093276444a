"""Breadth index: mean pairwise cosine distance of target-sentence embeddings.

Per interval, up to S sentences are sampled R times without replacement;
each repeat's mean pairwise distance (1 - cosine similarity over unordered
pairs) is averaged into the interval score. Sampling is deterministic given
the master seed: the sub-seed for (interval, repeat) is the first 8 bytes,
big-endian, of sha256(b"lexshift-breadth:<seed>:<interval_start>:<repeat_id>"),
so adding intervals never perturbs existing ones.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .embedding import EmbeddingSession
from .errors import ZeroNormVectorError
from .indices import IndexPoint, IndexSeries, UNIT_SCALE, _token_is_target

DEFAULT_SAMPLE_SIZE = 50
DEFAULT_REPEATS = 10


class SentenceRecord(NamedTuple):
    doc_id: str
    year: int
    text: str


@dataclass(frozen=True)
class Intervals:
    """Fixed-length intervals partitioning the breadth window (inclusive)."""

    start_year: int = 1970
    end_year: int = 2014
    length: int = 5

    def __post_init__(self):
        span = self.end_year - self.start_year + 1
        if self.length < 1 or span < 1 or span % self.length:
            raise ValueError(
                f"window {self.start_year}-{self.end_year} is not a whole number "
                f"of {self.length}-year intervals"
            )

    def starts(self) -> list[int]:
        return list(range(self.start_year, self.end_year + 1, self.length))

    def locate(self, year: int) -> int | None:
        """Interval start containing year, or None when outside the window."""
        if not (self.start_year <= year <= self.end_year):
            return None
        return self.start_year + ((year - self.start_year) // self.length) * self.length


@dataclass(frozen=True)
class SentenceSample:
    interval_start: int
    repeat_id: int
    sentences: tuple[SentenceRecord, ...]

    @property
    def usable(self) -> bool:
        return len(self.sentences) >= 2


def contains_target(text: str, target: str) -> bool:
    return any(_token_is_target(tok, target) for tok in text.split())


def collect_target_sentences(
    sentences: Iterable[SentenceRecord],
    target: str,
    intervals: Intervals,
) -> dict[int, list[SentenceRecord]]:
    """Bucket every sentence containing the fused target by interval start."""
    pools: dict[int, list[SentenceRecord]] = {s: [] for s in intervals.starts()}
    for rec in sentences:
        start = intervals.locate(rec.year)
        if start is not None and contains_target(rec.text, target):
            pools[start].append(rec)
    return pools


def sub_seed(master_seed: int, interval_start: int, repeat_id: int) -> int:
    payload = f"lexshift-breadth:{master_seed}:{interval_start}:{repeat_id}".encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def sample_sentences(
    pool: Sequence[SentenceRecord],
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
    interval_start: int = 0,
) -> list[SentenceSample]:
    """R uniform samples without replacement of min(sample_size, |pool|).

    When the pool is smaller than sample_size every repeat returns the whole
    pool (in sampled order). Deterministic given (seed, interval, repeat).
    """
    if sample_size < 2:
        raise ValueError("sample_size must be >= 2")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    k = min(sample_size, len(pool))
    samples = []
    for repeat_id in range(1, repeats + 1):
        rng = np.random.Generator(
            np.random.PCG64(sub_seed(seed, interval_start, repeat_id))
        )
        idx = rng.permutation(len(pool))[:k]
        samples.append(
            SentenceSample(
                interval_start=interval_start,
                repeat_id=repeat_id,
                sentences=tuple(pool[i] for i in idx),
            )
        )
    return samples


def pairwise_distances(vectors: np.ndarray, labels: Sequence[str] | None = None) -> np.ndarray:
    """All n(n-1)/2 unordered-pair cosine distances, as a flat array.

    Cosines are clamped to [-1, 1] against round-off; pairs of bitwise
    identical vectors are exactly 0.0. Raises ZeroNormVectorError naming the
    offending sentence when a vector has zero norm.
    """
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] < 2:
        raise ValueError("need at least two vectors")
    norms = np.linalg.norm(vectors, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        i = int(zero[0])
        name = labels[i] if labels is not None else f"index {i}"
        raise ZeroNormVectorError(f"zero-norm embedding for sentence {name}")
    unit = vectors / norms[:, None]
    sim = np.clip(unit @ unit.T, -1.0, 1.0)
    dist = 1.0 - sim
    # identical vectors have cosine exactly 1 by definition; enforce it
    groups: dict[bytes, list[int]] = {}
    for i in range(vectors.shape[0]):
        groups.setdefault(vectors[i].tobytes(), []).append(i)
    for members in groups.values():
        if len(members) > 1:
            idx = np.array(members)
            dist[np.ix_(idx, idx)] = 0.0
    iu = np.triu_indices(vectors.shape[0], k=1)
    return dist[iu]


def mean_pairwise_distance(
    vectors: np.ndarray, labels: Sequence[str] | None = None
) -> float:
    """Mean of the unordered-pair cosine distances; range [0, 2]."""
    d = pairwise_distances(vectors, labels)
    return float(d.sum() / d.size)


def breadth_series(
    sentences: Iterable[SentenceRecord],
    target: str,
    session: EmbeddingSession,
    sample_size: int = DEFAULT_SAMPLE_SIZE,
    repeats: int = DEFAULT_REPEATS,
    seed: int = 0,
    intervals: Intervals | None = None,
) -> IndexSeries:
    """Per-interval mean over repeats of mean pairwise embedding distance.

    Intervals with fewer than two target sentences are absent. n is the
    pooled sentence count for the interval. Values above the nominal [0, 1]
    range are flagged, never clamped.
    """
    intervals = intervals or Intervals()
    pools = collect_target_sentences(sentences, target, intervals)
    points = []
    flags = []
    for start in intervals.starts():
        pool = pools[start]
        if len(pool) < 2:
            continue
        samples = sample_sentences(pool, sample_size, repeats, seed, start)
        total = 0.0
        for sample in samples:
            texts = [rec.text for rec in sample.sentences]
            vectors = session.embed(texts)
            total += mean_pairwise_distance(vectors, labels=texts)
        value = total / len(samples)
        if value > 1.0:
            flags.append(f"interval {start}: value {value!r} above nominal [0,1]")
        points.append(IndexPoint(start, value, len(pool)))
    return IndexSeries(target, "breadth", tuple(points), UNIT_SCALE, tuple(flags))
