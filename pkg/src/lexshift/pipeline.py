"""End-to-end pipeline: configuration, orchestration, and emission.

One analysis cell is a (corpus, target, index) triple. Cells run in a fixed
sorted order; a fatal error inside a cell is recorded in the manifest and
the remaining cells proceed. All CSV output is byte-deterministic for a
given (config, inputs, seed): floats are serialized with repr and every
iteration order is sorted.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import __version__
from .breadth import Intervals, SentenceRecord, breadth_series
from .collocates import AnnualCollocateCounts, annual_collocate_counts, top_k
from .embedding import (
    EmbeddingSession,
    FileEmbeddingProvider,
    HttpEmbeddingProvider,
    StubEmbeddingProvider,
)
from .errors import ConfigError, LexshiftError
from .indices import (
    IndexPoint,
    IndexSeries,
    NORM_SCALE,
    UNIT_SCALE,
    annual_modifier_counts,
    intensifier_index,
    salience,
    theme_index,
    weighted_norm_index,
)
from .ingest import (
    Document,
    LoadStats,
    fuse_targets,
    load_conllu,
    load_lemma_corpus,
    load_raw_corpus,
    split_sentences,
)
from .lexicon import coverage, load_intensifiers, load_norms, load_theme_dictionary
from .svgplot import emit_plot
from .trend import TrendFit, fit_trend

log = logging.getLogger(__name__)

TREND_COLUMNS = [
    "index",
    "concept",
    "corpus",
    "model",
    "term",
    "B",
    "SE",
    "t",
    "p",
    "F",
    "df1",
    "df2",
    "adj_r2",
    "estimator",
    "dw_stat",
    "dw_p",
    "rho",
    "bic",
    "beta",
    "beta_se",
    "ci_lo",
    "ci_hi",
]


@dataclass(frozen=True)
class CorpusSpec:
    name: str
    raw: Path
    lemma: Path
    conllu: Path


@dataclass(frozen=True)
class BreadthSettings:
    interval_length: int = 5
    sample_size: int = 50
    repeats: int = 10
    window: tuple[int, int] = (1970, 2014)

    def intervals(self) -> Intervals:
        return Intervals(self.window[0], self.window[1], self.interval_length)


@dataclass(frozen=True)
class MaskRule:
    corpus: str
    index: str
    start: int
    end: int

    def matches(self, corpus: str, index: str) -> bool:
        return self.corpus == corpus and (
            self.index == index or self.index == index.split(":", 1)[0]
        )


@dataclass
class AnalysisConfig:
    corpora: list[CorpusSpec]
    targets: list[str]
    control_targets: list[str] = field(default_factory=list)
    window: int = 5
    study_window: tuple[int, int] = (1970, 2016)
    breadth: BreadthSettings = field(default_factory=BreadthSettings)
    seed: int = 0
    provider: str = "stub"
    provider_options: dict = field(default_factory=dict)
    norms_path: Path | None = None
    theme_path: Path | None = None
    intensifiers_path: Path | None = None
    amod_relation: str = "amod"
    min_matched: int = 1
    quadratic_indices: list[str] = field(default_factory=lambda: ["intensifier"])
    table_k: int = 10
    period_length: int = 10
    year_mask: list[MaskRule] = field(default_factory=list)
    indices_filter: list[str] | None = None
    out_dir: Path = Path("out")
    cache_dir: Path | None = None

    def all_targets(self) -> list[str]:
        seen = []
        for t in self.targets + self.control_targets:
            if t not in seen:
                seen.append(t)
        return seen

    def validate(self) -> None:
        if not self.corpora:
            raise ConfigError("no corpora configured")
        if not self.all_targets():
            raise ConfigError("no targets configured")
        if self.study_window[0] > self.study_window[1]:
            raise ConfigError(f"empty study window {self.study_window}")
        if self.breadth.sample_size < 2:
            raise ConfigError("breadth sample_size must be >= 2")
        if self.window < 1:
            raise ConfigError("collocate window must be >= 1")
        if self.norms_path is None:
            raise ConfigError("norms path is required (lexicon.norms)")
        missing = []
        for spec in self.corpora:
            for p in (spec.raw, spec.lemma, spec.conllu):
                if not Path(p).is_file():
                    missing.append(str(p))
        if self.norms_path is not None and not Path(self.norms_path).is_file():
            missing.append(str(self.norms_path))
        for p in (self.theme_path, self.intensifiers_path):
            if p is not None and not Path(p).is_file():
                missing.append(str(p))
        if missing:
            raise ConfigError("missing input files: " + ", ".join(sorted(missing)))
        if self.provider not in ("stub", "file", "http"):
            raise ConfigError(f"unknown provider {self.provider!r}")
        if self.provider == "file" and "path" not in self.provider_options:
            raise ConfigError("file provider needs provider_options.path")
        if self.provider == "http" and "url" not in self.provider_options:
            raise ConfigError("http provider needs provider_options.url")

    def canonical(self) -> dict:
        return {
            "corpora": [
                {"name": c.name, "raw": str(c.raw), "lemma": str(c.lemma), "conllu": str(c.conllu)}
                for c in self.corpora
            ],
            "targets": self.targets,
            "control_targets": self.control_targets,
            "window": self.window,
            "study_window": list(self.study_window),
            "breadth": {
                "interval_length": self.breadth.interval_length,
                "sample_size": self.breadth.sample_size,
                "repeats": self.breadth.repeats,
                "window": list(self.breadth.window),
            },
            "seed": self.seed,
            "provider": self.provider,
            "provider_options": {k: self.provider_options[k] for k in sorted(self.provider_options)},
            "norms": str(self.norms_path),
            "theme": str(self.theme_path) if self.theme_path else None,
            "intensifiers": str(self.intensifiers_path) if self.intensifiers_path else None,
            "amod_relation": self.amod_relation,
            "min_matched": self.min_matched,
            "quadratic_indices": self.quadratic_indices,
            "table_k": self.table_k,
            "period_length": self.period_length,
            "year_mask": [
                {"corpus": m.corpus, "index": m.index, "start": m.start, "end": m.end}
                for m in self.year_mask
            ],
            "indices_filter": self.indices_filter,
        }

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def _pair(value, name: str) -> tuple[int, int]:
    if not (isinstance(value, (list, tuple)) and len(value) == 2):
        raise ConfigError(f"{name} must be a [start, end] pair")
    return (int(value[0]), int(value[1]))


def load_config(path: str | Path, **overrides) -> AnalysisConfig:
    """Parse a TOML config file; keyword overrides win over file values."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path.name}: invalid TOML ({exc})") from exc
    base = path.parent

    def respath(v) -> Path:
        p = Path(v)
        return p if p.is_absolute() else (base / p)

    corpora = []
    for entry in raw.get("corpora", []):
        try:
            corpora.append(
                CorpusSpec(
                    name=str(entry["name"]),
                    raw=respath(entry["raw"]),
                    lemma=respath(entry["lemma"]),
                    conllu=respath(entry["conllu"]),
                )
            )
        except KeyError as exc:
            raise ConfigError(f"corpus entry missing key {exc}") from exc

    br = raw.get("breadth", {})
    breadth = BreadthSettings(
        interval_length=int(br.get("interval_length", 5)),
        sample_size=int(br.get("sample_size", 50)),
        repeats=int(br.get("repeats", 10)),
        window=_pair(br.get("window", [1970, 2014]), "breadth.window"),
    )
    lex = raw.get("lexicon", {})
    masks = [
        MaskRule(
            corpus=str(m["corpus"]),
            index=str(m["index"]),
            start=int(m["start"]),
            end=int(m["end"]),
        )
        for m in raw.get("year_mask", [])
    ]

    config = AnalysisConfig(
        corpora=corpora,
        targets=[str(t) for t in raw.get("targets", [])],
        control_targets=[str(t) for t in raw.get("control_targets", [])],
        window=int(raw.get("window", 5)),
        study_window=_pair(raw.get("study_window", [1970, 2016]), "study_window"),
        breadth=breadth,
        seed=int(raw.get("seed", 0)),
        provider=str(raw.get("provider", "stub")),
        provider_options=dict(raw.get("provider_options", {})),
        norms_path=respath(lex["norms"]) if "norms" in lex else None,
        theme_path=respath(lex["theme"]) if "theme" in lex else None,
        intensifiers_path=respath(lex["intensifiers"]) if "intensifiers" in lex else None,
        amod_relation=str(raw.get("amod_relation", "amod")),
        min_matched=int(raw.get("min_matched", 1)),
        quadratic_indices=[str(x) for x in raw.get("quadratic_indices", ["intensifier"])],
        table_k=int(raw.get("table_k", 10)),
        period_length=int(raw.get("period_length", 10)),
        year_mask=masks,
        out_dir=respath(raw.get("out_dir", "out")),
        cache_dir=respath(raw["cache_dir"]) if "cache_dir" in raw else None,
    )
    for key, value in overrides.items():
        if value is None:
            continue
        if key == "out_dir":
            config.out_dir = Path(value)
        elif key == "targets":
            config.targets = list(value)
            config.control_targets = []
        elif key == "indices_filter":
            config.indices_filter = list(value)
        elif key == "seed":
            config.seed = int(value)
        elif key == "provider":
            config.provider = str(value)
        else:
            raise ConfigError(f"unknown config override {key!r}")
    return config


def make_provider(config: AnalysisConfig):
    po = config.provider_options
    if config.provider == "stub":
        return StubEmbeddingProvider(dim=int(po.get("dim", 16)), seed=int(po.get("seed", 0)))
    if config.provider == "file":
        return FileEmbeddingProvider(po["path"])
    if config.provider == "http":
        return HttpEmbeddingProvider(po["url"], max_batch=int(po.get("max_batch", 64)))
    raise ConfigError(f"unknown provider {config.provider!r}")


def _rf(x: float | None) -> str:
    """repr-format a float for CSV; empty string for missing."""
    if x is None:
        return ""
    return repr(float(x))


def write_series_csv(series: IndexSeries, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["target", "index", "time_unit", "value", "n"])
        for p in series.points:
            writer.writerow([series.target, series.index_name, p.time_unit, _rf(p.value), p.n])


def read_series_csv(path: str | Path) -> list[IndexSeries]:
    """Read one or more series back from the IndexSeries CSV format."""
    groups: dict[tuple[str, str], list[IndexPoint]] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["target"], row["index"])
            groups.setdefault(key, []).append(
                IndexPoint(int(row["time_unit"]), float(row["value"]), int(row["n"]))
            )
    out = []
    for (target, index_name), points in sorted(groups.items()):
        scale = NORM_SCALE if index_name in ("valence", "arousal") else UNIT_SCALE
        out.append(
            IndexSeries(target, index_name, tuple(sorted(points, key=lambda p: p.time_unit)), scale)
        )
    return out


def apply_year_mask(
    series: IndexSeries, corpus: str, masks: Sequence[MaskRule]
) -> IndexSeries:
    active = [m for m in masks if m.matches(corpus, series.index_name)]
    if not active:
        return series
    kept = tuple(
        p for p in series.points if not any(m.start <= p.time_unit <= m.end for m in active)
    )
    return IndexSeries(series.target, series.index_name, kept, series.scale, series.flags)


def _safe_name(text: str) -> str:
    return "".join(c if (c.isalnum() or c in "-_") else "-" for c in text)


@dataclass
class ReportBundle:
    out_dir: Path
    manifest: dict

    @property
    def n_errors(self) -> int:
        return sum(1 for c in self.manifest["cells"] if c["status"] == "error")


class _CorpusData:
    """All three loaded views of one corpus, fused and window-filtered."""

    def __init__(self, spec: CorpusSpec, config: AnalysisConfig):
        targets = config.all_targets()
        self.stats = {"raw": LoadStats(), "lemma": LoadStats(), "conllu": LoadStats()}
        self.raw_docs = [
            Document(d.doc_id, d.year, d.genre, fuse_targets(d.text, targets))
            for d in load_raw_corpus(
                spec.raw, study_window=config.study_window, stats=self.stats["raw"]
            )
        ]
        self.sentences = [
            SentenceRecord(d.doc_id, d.year, s)
            for d in self.raw_docs
            for s in split_sentences(d.text)
        ]
        self.lemma_sentences = list(
            load_lemma_corpus(
                spec.lemma, study_window=config.study_window, stats=self.stats["lemma"]
            )
        )
        self.parsed_docs = list(
            load_conllu(spec.conllu, study_window=config.study_window, stats=self.stats["conllu"])
        )


def run_pipeline(config: AnalysisConfig) -> ReportBundle:
    """Run every configured (corpus, target, index) cell and emit the report.

    Outputs under config.out_dir: series/, counts/, tables/, plots/,
    trends.csv, and manifest.json. Per-cell fatal errors are recorded in the
    manifest with status "error"; cells with no data points are "skipped".
    """
    config.validate()
    out = Path(config.out_dir)
    for sub in ("series", "counts", "tables", "plots"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    norms = load_norms(config.norms_path)
    theme = load_theme_dictionary(config.theme_path)
    intensifiers = load_intensifiers(config.intensifiers_path)
    provider = make_provider(config)
    session = EmbeddingSession(provider, cache_dir=config.cache_dir)

    index_names = ["valence", "arousal", "breadth", "intensifier", f"theme:{theme.name}", "salience"]
    if config.indices_filter:
        wanted = set(config.indices_filter)
        index_names = [
            i for i in index_names if i in wanted or i.split(":", 1)[0] in wanted
        ]
        if not index_names:
            raise ConfigError(f"index filter {sorted(wanted)} matches no index")

    targets = config.all_targets()
    cells: list[dict] = []
    trend_rows: list[dict] = []
    corpora_stats: dict[str, dict] = {}
    table_files: list[str] = []
    norm_coverage: dict[str, float | None] = {}

    for spec in sorted(config.corpora, key=lambda s: s.name):
        data = _CorpusData(spec, config)
        corpora_stats[spec.name] = {
            view: vars(st).copy() for view, st in sorted(data.stats.items())
        }
        for raw_target in targets:
            # analysis operates on the fused single-token form
            target = raw_target.replace(" ", "_")
            counts = annual_collocate_counts(data.lemma_sentences, target, config.window)
            norm_coverage[f"{spec.name}/{target}"] = coverage(norms, counts)
            counts_path = out / "counts" / f"{spec.name}__{_safe_name(target)}.csv"
            counts.to_csv(counts_path)
            _emit_tables(
                out, spec.name, target, counts, data.parsed_docs, norms, config, table_files
            )
            for index_name in index_names:
                cell = {
                    "corpus": spec.name,
                    "target": target,
                    "index": index_name,
                    "status": "ok",
                    "points": 0,
                }
                try:
                    series = _compute_series(
                        index_name, data, target, counts, norms, theme, intensifiers,
                        session, config,
                    )
                    series = apply_year_mask(series, spec.name, config.year_mask)
                    cell["points"] = len(series.points)
                    if series.flags:
                        cell["flags"] = list(series.flags)
                    if not series.points:
                        cell["status"] = "skipped"
                        cell["reason"] = "no data points"
                        cells.append(cell)
                        continue
                    stem = f"{spec.name}__{_safe_name(target)}__{_safe_name(index_name)}"
                    write_series_csv(series, out / "series" / f"{stem}.csv")
                    fits = _fit_cell(series, index_name, config)
                    for model_name, fit in fits:
                        trend_rows.extend(
                            _trend_rows(index_name, target, spec.name, model_name, fit)
                        )
                    plot_fit = fits[-1][1] if fits else None
                    emit_plot(series, plot_fit, out / "plots" / f"{stem}.svg")
                    cell["fits"] = [m for m, _ in fits]
                except LexshiftError as exc:
                    cell["status"] = "error"
                    cell["error"] = str(exc)
                    log.error("cell %s/%s/%s failed: %s", spec.name, target, index_name, exc)
                cells.append(cell)

    trends_path = out / "trends.csv"
    with open(trends_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TREND_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in trend_rows:
            writer.writerow(row)

    csv_hashes = {}
    for f in sorted(out.rglob("*.csv")):
        rel = f.relative_to(out).as_posix()
        csv_hashes[rel] = hashlib.sha256(f.read_bytes()).hexdigest()

    manifest = {
        "toolkit": f"lexshift {__version__}",
        "config_hash": config.hash(),
        "seed": config.seed,
        "provider_id": provider.provider_id,
        "corpora": corpora_stats,
        "norm_coverage": norm_coverage,
        "cells": cells,
        "tables": sorted(table_files),
        "csv_sha256": csv_hashes,
        "row_counts": {"trends.csv": len(trend_rows)},
    }
    manifest["manifest_hash"] = hashlib.sha256(
        json.dumps(manifest, sort_keys=True).encode("utf-8")
    ).hexdigest()
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return ReportBundle(out_dir=out, manifest=manifest)


def _compute_series(
    index_name: str,
    data: _CorpusData,
    target: str,
    counts: AnnualCollocateCounts,
    norms,
    theme,
    intensifiers,
    session: EmbeddingSession,
    config: AnalysisConfig,
) -> IndexSeries:
    if index_name in ("valence", "arousal"):
        return weighted_norm_index(counts, norms, index_name, config.min_matched)
    if index_name.startswith("theme:"):
        return theme_index(counts, theme)
    if index_name == "intensifier":
        return intensifier_index(data.parsed_docs, target, intensifiers, config.amod_relation)
    if index_name == "salience":
        return salience(data.raw_docs, target)
    if index_name == "breadth":
        return breadth_series(
            data.sentences,
            target,
            session,
            sample_size=config.breadth.sample_size,
            repeats=config.breadth.repeats,
            seed=config.seed,
            intervals=config.breadth.intervals(),
        )
    raise ConfigError(f"unknown index {index_name!r}")


def _fit_cell(
    series: IndexSeries, index_name: str, config: AnalysisConfig
) -> list[tuple[str, TrendFit]]:
    family = index_name.split(":", 1)[0]
    models = ["linear"]
    if index_name in config.quadratic_indices or family in config.quadratic_indices:
        models.append("quadratic")
    return [(m, fit_trend(series, m, seed=config.seed)) for m in models]


def _trend_rows(
    index_name: str, target: str, corpus: str, model: str, fit: TrendFit
) -> list[dict]:
    rows = []
    dw_stat = fit.dw.statistic if fit.dw else None
    dw_p = fit.dw.p if fit.dw else None
    for term in fit.terms:
        coef = fit.coefficients[term]
        std = fit.std_betas.get(term)
        rows.append(
            {
                "index": index_name,
                "concept": target,
                "corpus": corpus,
                "model": model,
                "term": term,
                "B": _rf(coef.b),
                "SE": _rf(coef.se),
                "t": _rf(coef.t),
                "p": _rf(coef.p),
                "F": _rf(fit.f_stat),
                "df1": fit.df1,
                "df2": fit.df2,
                "adj_r2": _rf(fit.adj_r2),
                "estimator": fit.estimator,
                "dw_stat": _rf(dw_stat),
                "dw_p": _rf(dw_p),
                "rho": _rf(fit.rho),
                "bic": _rf(fit.bic),
                "beta": _rf(std.beta) if std else "",
                "beta_se": _rf(std.se_hc3) if std else "",
                "ci_lo": _rf(std.ci95[0]) if std else "",
                "ci_hi": _rf(std.ci95[1]) if std else "",
            }
        )
    return rows


def _emit_tables(
    out: Path,
    corpus: str,
    target: str,
    counts: AnnualCollocateCounts,
    parsed_docs,
    norms,
    config: AnalysisConfig,
    table_files: list[str],
) -> None:
    """Top-k modifier and norm-matched collocate tables, rank x decade."""
    modifier_counts = annual_modifier_counts(parsed_docs, target, config.amod_relation)
    matched_counts = {
        year: {w: c for w, c in year_counts.items() if w in norms}
        for year, year_counts in counts.per_year.items()
    }
    for what, source in (("modifiers", modifier_counts), ("collocates", matched_counts)):
        ranked = top_k(source, config.table_k, config.period_length)
        path = out / "tables" / f"top_{what}__{corpus}__{_safe_name(target)}.csv"
        _write_rank_table(ranked, config.table_k, path)
        table_files.append(path.relative_to(out).as_posix())


def _write_rank_table(
    ranked: dict[int, list[tuple[str, float]]], k: int, path: Path
) -> None:
    periods = sorted(ranked)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["rank"] + [str(p) for p in periods])
        for rank in range(1, k + 1):
            row = [str(rank)]
            for period in periods:
                entries = ranked[period]
                row.append(entries[rank - 1][0] if rank <= len(entries) else "")
            writer.writerow(row)
