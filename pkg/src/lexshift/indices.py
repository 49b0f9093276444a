"""Scalar time-series indices: valence, arousal, theme, intensifier, salience.

Each index is a pure function of loaded aggregates. Missing periods are
absent points, never fabricated zeros. Per-year sums iterate lemmas in
sorted order so results are bit-deterministic.
"""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .collocates import AnnualCollocateCounts
from .ingest import Document, ParsedDocument
from .lexicon import AffectNorms, IntensifierSet, ThemeDictionary

NORM_SCALE = (1.0, 9.0)
UNIT_SCALE = (0.0, 1.0)

AMOD_RELATION = "amod"

_PUNCT = string.punctuation


class IndexPoint(NamedTuple):
    time_unit: int
    value: float
    n: int


@dataclass(frozen=True)
class IndexSeries:
    """(target, index) -> ordered (time_unit, value, n) points."""

    target: str
    index_name: str
    points: tuple[IndexPoint, ...]
    scale: tuple[float, float]
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        times = [p.time_unit for p in self.points]
        if times != sorted(times):
            raise ValueError("index points must be sorted by time")

    def years(self) -> list[int]:
        return [p.time_unit for p in self.points]

    def values(self) -> list[float]:
        return [p.value for p in self.points]

    def __len__(self) -> int:
        return len(self.points)


def weighted_norm_index(
    counts: AnnualCollocateCounts,
    norms: AffectNorms,
    dimension: str,
    min_matched: int = 1,
) -> IndexSeries:
    """Count-weighted mean norm rating of matched collocates, per year.

    value_y = sum_w rating(w) * count_y(w) / sum_w count_y(w) over lemmas
    found in the norms. Years whose matched-collocate total falls below
    min_matched are absent. n is the matched total.
    """
    if dimension not in ("valence", "arousal"):
        raise ValueError(f"dimension must be valence or arousal, got {dimension!r}")
    if min_matched < 1:
        raise ValueError("min_matched must be >= 1")
    points = []
    for year in sorted(counts.per_year):
        num = 0.0
        den = 0
        for lemma in sorted(counts.per_year[year]):
            if lemma in norms:
                c = counts.per_year[year][lemma]
                num += norms.rating(lemma, dimension) * c
                den += c
        if den >= min_matched:
            points.append(IndexPoint(year, num / den, den))
    return IndexSeries(counts.target, dimension, tuple(points), NORM_SCALE)


def theme_index(counts: AnnualCollocateCounts, theme: ThemeDictionary) -> IndexSeries:
    """Share of a target's collocate tokens that belong to the theme.

    The denominator is the total (unmatched-inclusive) collocate count for
    the year; years with a zero total are absent.
    """
    points = []
    for year in sorted(counts.per_year):
        year_counts = counts.per_year[year]
        total = sum(year_counts.values())
        if total == 0:
            continue
        hits = sum(year_counts[w] for w in sorted(year_counts) if w in theme.terms)
        points.append(IndexPoint(year, hits / total, total))
    return IndexSeries(counts.target, f"theme:{theme.name}", tuple(points), UNIT_SCALE)


def _is_target_token(token, target: str) -> bool:
    return token.lemma.lower() == target or token.form.lower() == target


def intensifier_index(
    parsed: Iterable[ParsedDocument],
    target: str,
    intensifiers: IntensifierSet,
    relation: str = AMOD_RELATION,
) -> IndexSeries:
    """Proportion of target occurrences carrying an intensifying modifier.

    An occurrence counts as intensified when at least one dependent token has
    deprel == relation, is headed by that occurrence, and its lowercase lemma
    is in the intensifier set; multiple intensifiers on one occurrence still
    count once. Years without occurrences are absent.
    """
    occurrences: Counter = Counter()
    intensified: Counter = Counter()
    for doc in parsed:
        for sentence in doc.sentences:
            target_positions = [
                i + 1 for i, tok in enumerate(sentence) if _is_target_token(tok, target)
            ]
            if not target_positions:
                continue
            modified = {
                tok.head
                for tok in sentence
                if tok.deprel == relation and tok.lemma.lower() in intensifiers
            }
            occurrences[doc.year] += len(target_positions)
            intensified[doc.year] += sum(1 for p in target_positions if p in modified)
    points = [
        IndexPoint(year, intensified[year] / occurrences[year], occurrences[year])
        for year in sorted(occurrences)
    ]
    return IndexSeries(target, "intensifier", tuple(points), UNIT_SCALE)


def annual_modifier_counts(
    parsed: Iterable[ParsedDocument],
    target: str,
    relation: str = AMOD_RELATION,
) -> dict[int, Counter]:
    """year -> lemma counts of every `relation` dependent of the target.

    Feeds the top-modifier ranking tables; unlike intensifier_index this
    keeps all modifier lemmas, not only intensifiers.
    """
    out: dict[int, Counter] = {}
    for doc in parsed:
        for sentence in doc.sentences:
            target_positions = {
                i + 1 for i, tok in enumerate(sentence) if _is_target_token(tok, target)
            }
            if not target_positions:
                continue
            for tok in sentence:
                if tok.deprel == relation and tok.head in target_positions:
                    out.setdefault(doc.year, Counter())[tok.lemma.lower()] += 1
    return out


def _token_is_target(token: str, target: str) -> bool:
    return token == target or token.strip(_PUNCT) == target


def salience(raw_docs: Iterable[Document], target: str) -> IndexSeries:
    """Annual relative frequency of the fused target token in the raw view.

    Tokenization is whitespace splitting of the cleaned text; a token counts
    as the target after stripping surrounding punctuation (case-sensitive).
    Years with zero corpus tokens are absent; a populated year without the
    target is a true 0.0.
    """
    token_totals: Counter = Counter()
    target_counts: Counter = Counter()
    for doc in raw_docs:
        tokens = doc.text.split()
        token_totals[doc.year] += len(tokens)
        target_counts[doc.year] += sum(1 for t in tokens if _token_is_target(t, target))
    points = [
        IndexPoint(year, target_counts[year] / token_totals[year], token_totals[year])
        for year in sorted(token_totals)
        if token_totals[year] > 0
    ]
    return IndexSeries(target, "salience", tuple(points), UNIT_SCALE)
