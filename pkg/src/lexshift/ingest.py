"""Load, clean, and normalize year-tagged corpora.

Three corpus views feed the analyses:

* raw-fused: cleaned text with multiword targets collapsed to single
  underscore tokens (salience, breadth, and the parsed view's input);
* lemmatized: lowercase lemma sentences, stop words and
  punctuation/number tokens removed (collocate-based indices);
* dependency-parsed: CoNLL-U (intensifier index).

Lemmatization and parsing themselves happen upstream (an external NLP
pipeline or the bundled sidecar service); this module consumes the files.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

from .errors import CorpusFormatError

log = logging.getLogger(__name__)

GENRES = frozenset(
    {"fiction", "magazine", "news", "nonfiction", "spoken", "tv", "abstract", "other"}
)
_GENRE_ALIASES = {
    "mag": "magazine",
    "magazines": "magazine",
    "newspaper": "news",
    "newspapers": "news",
    "fic": "fiction",
    "non-fiction": "nonfiction",
    "acad": "abstract",
    "academic": "abstract",
}

# Literal removals applied to every raw document, in source-list order.
# Application order is longest-first (see CleaningRuleSet).
DEFAULT_CLEANING_RULES = (
    "@",
    "&c?;",
    "q!",
    "|p130",
    "NUL",
    "( STAR )",
    "<p>",
    "<>",
    " // ",
    " | ",
    " -- ",
    "*",
    "..",
    "PHOTO",
    "( COLOR )",
    "ILLUSTRATION",
    "/",
)

_WS_RUN = re.compile(r"\s+")


@dataclass(frozen=True)
class Document:
    """One year-tagged text unit of a corpus."""

    doc_id: str
    year: int
    genre: str
    text: str


class ParsedToken(NamedTuple):
    """One token of a dependency-parsed sentence. head is 1-based, 0 = root."""

    form: str
    lemma: str
    upos: str
    head: int
    deprel: str


class LemmaSentence(NamedTuple):
    """One sentence of the lemmatized view: ordered lowercase lemmas."""

    doc_id: str
    year: int
    lemmas: tuple[str, ...]


class ParsedDocument(NamedTuple):
    doc_id: str
    year: int
    sentences: list[list[ParsedToken]]


@dataclass
class LoadStats:
    """Counters a loader fills in while streaming.

    records = loaded + skipped + out_of_window + dropped_empty for every
    loader in this module.
    """

    records: int = 0
    loaded: int = 0
    skipped: int = 0
    out_of_window: int = 0
    dropped_empty: int = 0
    sentences_skipped: int = 0


class CleaningRuleSet:
    """Ordered literal removals.

    Literals are applied longest-first (stable within equal lengths) so a
    multi-character literal is never destroyed by one of its single-character
    substrings, e.g. "( STAR )" before "*". Each occurrence is replaced by a
    single space; passes repeat until no literal remains, so cleaning is
    idempotent even when one removal exposes another literal.
    """

    def __init__(self, literals: Sequence[str] = DEFAULT_CLEANING_RULES):
        if any(not lit or lit.isspace() for lit in literals):
            raise ValueError("cleaning literals must contain a non-space character")
        self.literals = tuple(literals)
        self._ordered = tuple(sorted(self.literals, key=len, reverse=True))

    def apply(self, text: str) -> str:
        while True:
            out = text
            for lit in self._ordered:
                out = out.replace(lit, " ")
            if out == text:
                break
            text = out
        return _WS_RUN.sub(" ", text).strip()


DEFAULT_RULESET = CleaningRuleSet()


def clean_text(text: str, rules: CleaningRuleSet | None = None) -> str:
    """Remove corpus-artifact literals and collapse whitespace runs.

    Pure and idempotent; casing is preserved.
    """
    return (rules or DEFAULT_RULESET).apply(text)


def _fusion_pattern(variants: dict[str, str]) -> re.Pattern | None:
    keyed = [v for v in variants if v]
    if not keyed:
        return None
    alternation = "|".join(re.escape(v) for v in sorted(keyed, key=len, reverse=True))
    # Lookarounds keep "mental health" inside "fundamental health" unfused.
    return re.compile(r"(?<!\w)(?:%s)(?!\w)" % alternation)


def fuse_targets(
    text: str,
    targets: Sequence[str],
    variants: dict[str, str] | None = None,
) -> str:
    """Replace target phrase occurrences with single underscore tokens.

    targets are canonical lowercase phrases with single spaces. Matching is
    case-sensitive, word-boundary anchored, non-overlapping left-to-right,
    longer phrases first. variants optionally maps surface strings to their
    canonical target; by default each target matches only itself. Every match
    is replaced by the canonical phrase with spaces turned into underscores.
    """
    if variants is None:
        variants = {t: t for t in targets}
    replacement = {v: c.replace(" ", "_") for v, c in variants.items()}
    pattern = _fusion_pattern(replacement)
    if pattern is None:
        return text
    return pattern.sub(lambda m: replacement[m.group(0)], text)


_SENT_BOUNDARY = re.compile(r"(?<=[.!?])\s+")


def split_sentences(text: str) -> list[str]:
    """Naive sentence splitter for the raw view (terminal punctuation + space).

    Good enough for the breadth sampler on cleaned text; corpora with
    pre-segmented sentences should be fed per-sentence upstream instead.
    """
    return [s for s in _SENT_BOUNDARY.split(text) if s.strip()]


def _normalize_genre(value: str) -> str:
    g = value.strip().lower()
    g = _GENRE_ALIASES.get(g, g)
    return g if g in GENRES else "other"


def _in_window(year: int, window: tuple[int, int] | None) -> bool:
    return window is None or (window[0] <= year <= window[1])


def _infer_format(path: Path) -> str:
    if path.suffix.lower() in {".jsonl", ".json", ".ndjson"}:
        return "jsonl"
    if path.suffix.lower() in {".tsv", ".txt"}:
        return "tsv"
    raise CorpusFormatError(f"cannot infer corpus format from {path.name}; pass fmt=")


def load_raw_corpus(
    path: str | Path,
    fmt: str | None = None,
    *,
    rules: CleaningRuleSet | None = DEFAULT_RULESET,
    study_window: tuple[int, int] | None = None,
    stats: LoadStats | None = None,
) -> Iterator[Document]:
    """Stream Documents from a JSONL or TSV raw corpus file.

    Malformed records are counted in stats.skipped and logged, never fatal.
    Documents outside study_window are dropped (stats.out_of_window), as are
    documents whose text is empty after cleaning (stats.dropped_empty).
    Pass rules=None to skip cleaning.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"corpus file not found: {path}")
    fmt = fmt or _infer_format(path)
    if fmt not in {"jsonl", "tsv"}:
        raise CorpusFormatError(f"unknown corpus format {fmt!r}")
    stats = stats if stats is not None else LoadStats()

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            stats.records += 1
            try:
                if fmt == "jsonl":
                    rec = json.loads(line)
                    doc_id = str(rec["doc_id"])
                    year = int(rec["year"])
                    genre = str(rec.get("genre", "other"))
                    text = str(rec["text"])
                else:
                    parts = line.rstrip("\n").split("\t", 3)
                    if len(parts) != 4:
                        raise ValueError(f"expected 4 tab-separated fields, got {len(parts)}")
                    doc_id, year_s, genre, text = parts
                    year = int(year_s)
            except (ValueError, KeyError, TypeError) as exc:
                stats.skipped += 1
                log.warning("%s:%d: skipping malformed record (%s)", path.name, lineno, exc)
                continue

            if not _in_window(year, study_window):
                stats.out_of_window += 1
                continue
            cleaned = clean_text(text, rules) if rules is not None else text.strip()
            if not cleaned:
                stats.dropped_empty += 1
                continue
            stats.loaded += 1
            yield Document(doc_id=doc_id, year=year, genre=_normalize_genre(genre), text=cleaned)


def load_lemma_corpus(
    path: str | Path,
    *,
    study_window: tuple[int, int] | None = None,
    stats: LoadStats | None = None,
) -> Iterator[LemmaSentence]:
    """Stream LemmaSentences from a lemma-corpus JSONL file.

    One input record per document ({doc_id, year, sentences: [[lemma, ...]]});
    yields one LemmaSentence per sentence. Record-level malformations are
    skipped and counted, matching load_raw_corpus semantics.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"lemma corpus file not found: {path}")
    stats = stats if stats is not None else LoadStats()

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            stats.records += 1
            try:
                rec = json.loads(line)
                doc_id = str(rec["doc_id"])
                year = int(rec["year"])
                sentences = rec["sentences"]
                if not isinstance(sentences, list) or any(
                    not isinstance(s, list) for s in sentences
                ):
                    raise ValueError("sentences must be a list of lists")
            except (ValueError, KeyError, TypeError) as exc:
                stats.skipped += 1
                log.warning("%s:%d: skipping malformed record (%s)", path.name, lineno, exc)
                continue
            if not _in_window(year, study_window):
                stats.out_of_window += 1
                continue
            stats.loaded += 1
            for sent in sentences:
                yield LemmaSentence(doc_id=doc_id, year=year, lemmas=tuple(str(x) for x in sent))


_META_RE = re.compile(r"^#\s*(doc_id|year)\s*=\s*(.*)$")


def load_conllu(
    path: str | Path,
    *,
    study_window: tuple[int, int] | None = None,
    stats: LoadStats | None = None,
) -> Iterator[ParsedDocument]:
    """Stream dependency-parsed documents from a CoNLL-U file.

    Documents are delimited by `# doc_id = <id>` comments and carry a
    `# year = <int>` comment. Multiword-range and empty-node lines (ids with
    "-" or ".") are ignored. A sentence whose token lines are malformed
    (column count != 10, unparseable head, head out of bounds, empty deprel)
    is skipped sentence-level; a document without a parseable year is skipped
    document-level with a warning.
    """
    path = Path(path)
    if not path.is_file():
        raise CorpusFormatError(f"conllu file not found: {path}")
    stats = stats if stats is not None else LoadStats()

    doc_id: str | None = None
    year: int | None = None
    sentences: list[list[ParsedToken]] = []
    tokens: list[ParsedToken] = []
    bad_sentence = False

    def finish_sentence() -> None:
        nonlocal tokens, bad_sentence
        if tokens or bad_sentence:
            n = len(tokens)
            if not bad_sentence and all(0 <= t.head <= n for t in tokens):
                sentences.append(tokens)
            else:
                stats.sentences_skipped += 1
        tokens = []
        bad_sentence = False

    def finish_doc() -> Iterator[ParsedDocument]:
        nonlocal doc_id, year, sentences
        finish_sentence()
        if doc_id is None and year is None and not sentences:
            return
        stats.records += 1
        if doc_id is None or year is None:
            stats.skipped += 1
            log.warning("%s: skipping document with missing doc_id/year metadata", path.name)
        elif not _in_window(year, study_window):
            stats.out_of_window += 1
        elif not sentences:
            stats.dropped_empty += 1
        else:
            stats.loaded += 1
            yield ParsedDocument(doc_id=doc_id, year=year, sentences=sentences)
        doc_id = None
        year = None
        sentences = []

    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                m = _META_RE.match(line)
                if not m:
                    continue
                key, value = m.group(1), m.group(2).strip()
                if key == "doc_id":
                    yield from finish_doc()
                    doc_id = value
                elif key == "year":
                    try:
                        year = int(value)
                    except ValueError:
                        year = None
                continue
            if not line.strip():
                finish_sentence()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                bad_sentence = True
                continue
            tid = cols[0]
            if "-" in tid or "." in tid:
                continue  # multiword range / empty node
            try:
                head = int(cols[6])
            except ValueError:
                bad_sentence = True
                continue
            deprel = cols[7]
            if not deprel or deprel == "_":
                bad_sentence = True
                continue
            tokens.append(
                ParsedToken(form=cols[1], lemma=cols[2], upos=cols[3], head=head, deprel=deprel)
            )
    yield from finish_doc()
