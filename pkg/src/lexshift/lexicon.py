"""Affect norms, theme dictionaries, and the intensifier set.

All lexicons are immutable after load and safe for concurrent reads.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import TYPE_CHECKING

from .errors import LexiconError, NormsError

if TYPE_CHECKING:  # pragma: no cover
    from .collocates import AnnualCollocateCounts

_DATA = files("lexshift") / "data"

# Column-name adapter: canonical name -> accepted aliases (published norms
# ship as Word / V.Mean.Sum / A.Mean.Sum).
_NORM_COLUMNS = {
    "word": ("word", "Word"),
    "valence_mean": ("valence_mean", "V.Mean.Sum"),
    "arousal_mean": ("arousal_mean", "A.Mean.Sum"),
}


@dataclass(frozen=True)
class AffectNorms:
    """lemma -> (valence mean, arousal mean), both on the 1-9 scale.

    The arousal column is assumed oriented 1 = low arousal -> 9 = high
    arousal. Files coded the other way must be recoded before loading; the
    toolkit never reverses silently.
    """

    entries: dict[str, tuple[float, float]]

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def rating(self, lemma: str, dimension: str) -> float:
        v, a = self.entries[lemma]
        if dimension == "valence":
            return v
        if dimension == "arousal":
            return a
        raise ValueError(f"unknown norm dimension {dimension!r}")

    def to_csv(self, path: str | Path) -> None:
        """Serialize to the canonical CSV; load_norms round-trips exactly."""
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["word", "valence_mean", "arousal_mean"])
            for word in sorted(self.entries):
                v, a = self.entries[word]
                writer.writerow([word, repr(v), repr(a)])


@dataclass(frozen=True)
class ThemeDictionary:
    """Named set of single-token lowercase lemmas."""

    name: str
    terms: frozenset[str]

    def __post_init__(self):
        if not self.terms:
            raise LexiconError(f"theme dictionary {self.name!r} is empty")
        bad = [t for t in self.terms if (not t) or any(c.isspace() for c in t)]
        if bad:
            raise LexiconError(f"theme dictionary {self.name!r} has non-single-token terms: {bad}")


@dataclass(frozen=True)
class IntensifierSet:
    """Lowercase adjectives counted as intensifying modifiers."""

    adjectives: frozenset[str]

    def __post_init__(self):
        if not self.adjectives:
            raise LexiconError("intensifier set is empty")

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.adjectives


def load_norms(path: str | Path) -> AffectNorms:
    """Load an affect-norms CSV (word, valence_mean, arousal_mean).

    Fatal on: missing column, value outside [1, 9], duplicate lemma
    (reported with row numbers). Lemmas are lowercased on load.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise NormsError(f"{path.name}: empty norms file (no header)") from None

        col: dict[str, int] = {}
        for canonical, aliases in _NORM_COLUMNS.items():
            for alias in aliases:
                if alias in header:
                    col[canonical] = header.index(alias)
                    break
            else:
                raise NormsError(f"{path.name}: missing column {canonical!r} (or alias)")

        entries: dict[str, tuple[float, float]] = {}
        first_row: dict[str, int] = {}
        duplicates: dict[str, list[int]] = {}
        for rownum, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                word = row[col["word"]].strip().lower()
                val = float(row[col["valence_mean"]])
                aro = float(row[col["arousal_mean"]])
            except (IndexError, ValueError) as exc:
                raise NormsError(f"{path.name}:{rownum}: unparseable row ({exc})") from exc
            for name, x in (("valence", val), ("arousal", aro)):
                if not (1.0 <= x <= 9.0):
                    raise NormsError(
                        f"{path.name}:{rownum}: {name} mean {x} outside [1, 9] for {word!r}"
                    )
            if word in entries:
                duplicates.setdefault(word, [first_row[word]]).append(rownum)
                continue
            entries[word] = (val, aro)
            first_row[word] = rownum
        if duplicates:
            detail = "; ".join(f"{w!r} at rows {rows}" for w, rows in sorted(duplicates.items()))
            raise NormsError(f"{path.name}: duplicate lemmas: {detail}")
    return AffectNorms(entries=entries)


def coverage(norms: AffectNorms, counts: "AnnualCollocateCounts") -> float | None:
    """Share of collocate tokens (pooled over years) covered by the norms.

    Returns None when there are no collocate tokens at all.
    """
    total = 0
    matched = 0
    for year_counts in counts.per_year.values():
        for lemma, c in year_counts.items():
            total += c
            if lemma in norms:
                matched += c
    if total == 0:
        return None
    return matched / total


def _read_term_file(src) -> list[str]:
    terms = []
    for line in src.read_text(encoding="utf-8").splitlines():
        term = line.split("#", 1)[0].strip().lower()
        if term:
            terms.append(term)
    return terms


def load_theme_dictionary(path: str | Path | None = None, name: str | None = None) -> ThemeDictionary:
    """Load a theme dictionary (one term per line, # comments allowed).

    With path=None, returns the bundled 17-term pathologization dictionary.
    """
    if path is None:
        src = _DATA / "theme_pathologization.txt"
        name = name or "pathologization"
    else:
        src = Path(path)
        name = name or src.stem
    return ThemeDictionary(name=name, terms=frozenset(_read_term_file(src)))


def load_intensifiers(path: str | Path | None = None) -> IntensifierSet:
    """Load the intensifier set; defaults to the bundled 11 adjectives."""
    src = (_DATA / "intensifiers.txt") if path is None else Path(path)
    return IntensifierSet(adjectives=frozenset(_read_term_file(src)))


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Load the stop-word list; defaults to the bundled 179-entry list."""
    src = (_DATA / "stopwords.txt") if path is None else Path(path)
    return frozenset(_read_term_file(src))
