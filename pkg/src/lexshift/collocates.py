"""Windowed collocate extraction and annual aggregation.

The context window counts positions in the stop-word-removed lemma stream
and never crosses sentence boundaries. Each target occurrence contributes a
full window, so a lemma sitting inside two occurrences' windows counts twice.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .ingest import LemmaSentence

DEFAULT_WINDOW = 5


@dataclass
class AnnualCollocateCounts:
    """target -> year -> (lemma -> count), plus per-year totals.

    Unfiltered counts; norm matching happens downstream in the indices.
    """

    target: str
    per_year: dict[int, Counter] = field(default_factory=dict)

    @property
    def totals(self) -> dict[int, int]:
        return {year: sum(c.values()) for year, c in self.per_year.items()}

    def years(self) -> list[int]:
        return sorted(self.per_year)

    def merge(self, other: "AnnualCollocateCounts") -> None:
        """Associative, commutative year-level reduction for parallel workers."""
        if other.target != self.target:
            raise ValueError("cannot merge counts for different targets")
        for year, c in other.per_year.items():
            self.per_year.setdefault(year, Counter()).update(c)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["target", "year", "lemma", "count"])
            for year in self.years():
                for lemma in sorted(self.per_year[year]):
                    writer.writerow([self.target, year, lemma, self.per_year[year][lemma]])


def extract_collocates(
    sentence: LemmaSentence | Sequence[str],
    target: str,
    window: int = DEFAULT_WINDOW,
) -> list[str]:
    """Collect context lemmas around every target occurrence in one sentence.

    Up to `window` lemmas each side, truncated at sentence edges. Occurrences
    contribute independently; target tokens are never emitted as their own
    collocates, even when one occurrence falls inside another's window.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    lemmas = sentence.lemmas if isinstance(sentence, LemmaSentence) else sentence
    out: list[str] = []
    for i, lemma in enumerate(lemmas):
        if lemma != target:
            continue
        lo = max(0, i - window)
        hi = min(len(lemmas), i + window + 1)
        out.extend(w for w in lemmas[lo:i] if w != target)
        out.extend(w for w in lemmas[i + 1 : hi] if w != target)
    return out


def annual_collocate_counts(
    corpus: Iterable[LemmaSentence],
    target: str,
    window: int = DEFAULT_WINDOW,
) -> AnnualCollocateCounts:
    """Aggregate windowed collocate counts per calendar year."""
    counts = AnnualCollocateCounts(target=target)
    for sentence in corpus:
        found = extract_collocates(sentence, target, window)
        if found:
            counts.per_year.setdefault(sentence.year, Counter()).update(found)
    return counts


def top_k(
    counts_by_period: Mapping[int, Mapping[str, int]],
    k: int,
    period_length: int = 10,
) -> dict[int, list[tuple[str, float]]]:
    """Rank terms by relative count within periods of `period_length` years.

    Input keys may be years or period starts; keys are floored to period
    starts and counts pooled. Per period, terms are sorted by
    count / period_total descending, ties broken lexicographically ascending,
    truncated to k entries.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if period_length < 1:
        raise ValueError("period_length must be >= 1")
    pooled: dict[int, Counter] = {}
    for year, terms in counts_by_period.items():
        period = (year // period_length) * period_length
        pooled.setdefault(period, Counter()).update(terms)
    ranked: dict[int, list[tuple[str, float]]] = {}
    for period, c in sorted(pooled.items()):
        total = sum(c.values())
        if total == 0:
            ranked[period] = []
            continue
        ordered = sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))
        ranked[period] = [(term, count / total) for term, count in ordered[:k]]
    return ranked
