"""Command-line interface.

Exit codes: 0 ok, 1 configuration error, 2 run finished with per-cell
failures, 3 fatal error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .collocates import annual_collocate_counts, top_k
from .errors import ConfigError, LexshiftError
from .indices import annual_modifier_counts
from .lexicon import load_norms
from .pipeline import _CorpusData, load_config, read_series_csv, run_pipeline
from .trend import fit_trend

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PARTIAL = 2
EXIT_FATAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexshift",
        description="Diachronic lexical semantic change analysis over year-tagged corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full index + trend pipeline")
    analyze.add_argument("--config", required=True, help="TOML analysis config")
    analyze.add_argument("--target", action="append", help="restrict to target (repeatable)")
    analyze.add_argument("--index", action="append", help="restrict to index (repeatable)")
    analyze.add_argument("--seed", type=int, help="override master seed")
    analyze.add_argument("--provider", choices=["file", "http", "stub"], help="embedding provider")
    analyze.add_argument("--out", help="output directory")

    topcmd = sub.add_parser("top", help="print top-k modifier/collocate tables per decade")
    topcmd.add_argument("--config", required=True)
    topcmd.add_argument("--what", required=True, choices=["modifiers", "collocates"])
    topcmd.add_argument("--decade", type=int, required=True, help="decade start, e.g. 1990")
    topcmd.add_argument("--k", type=int, default=10)
    topcmd.add_argument("--target", action="append")
    topcmd.add_argument("--corpus", help="restrict to one corpus name")

    fitcmd = sub.add_parser("fit", help="fit a trend model to a series CSV")
    fitcmd.add_argument("--series", required=True, help="IndexSeries CSV path")
    fitcmd.add_argument("--model", choices=["linear", "quadratic"], default="linear")
    fitcmd.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_analyze(args) -> int:
    try:
        config = load_config(
            args.config,
            targets=args.target,
            indices_filter=args.index,
            seed=args.seed,
            provider=args.provider,
            out_dir=args.out,
        )
        config.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        bundle = run_pipeline(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LexshiftError, OSError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL
    statuses = [c["status"] for c in bundle.manifest["cells"]]
    print(
        f"{len(statuses)} cells: {statuses.count('ok')} ok, "
        f"{statuses.count('skipped')} skipped, {statuses.count('error')} error"
    )
    print(f"outputs in {bundle.out_dir} (manifest hash {bundle.manifest['manifest_hash'][:12]})")
    return EXIT_PARTIAL if bundle.n_errors else EXIT_OK


def _cmd_top(args) -> int:
    try:
        config = load_config(args.config)
        config.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        norms = load_norms(config.norms_path)
        targets = args.target or config.all_targets()
        for spec in sorted(config.corpora, key=lambda s: s.name):
            if args.corpus and spec.name != args.corpus:
                continue
            data = _CorpusData(spec, config)
            for raw_target in targets:
                target = raw_target.replace(" ", "_")
                if args.what == "modifiers":
                    source = annual_modifier_counts(data.parsed_docs, target, config.amod_relation)
                else:
                    counts = annual_collocate_counts(data.lemma_sentences, target, config.window)
                    source = {
                        year: {w: c for w, c in yc.items() if w in norms}
                        for year, yc in counts.per_year.items()
                    }
                ranked = top_k(source, args.k, config.period_length).get(args.decade, [])
                print(f"{spec.name} / {target} / top {args.k} {args.what}, {args.decade}s:")
                if not ranked:
                    print("  (no data)")
                for rank, (term, rel) in enumerate(ranked, 1):
                    print(f"  {rank:2d}. {term}  ({rel:.4f})")
    except (LexshiftError, OSError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL
    return EXIT_OK


def _cmd_fit(args) -> int:
    try:
        for series in read_series_csv(args.series):
            fit = fit_trend(series, args.model, seed=args.seed)
            dw = fit.dw
            print(
                f"{series.target} / {series.index_name}: n={fit.n} model={fit.model} "
                f"estimator={fit.estimator}"
            )
            for term in fit.terms:
                c = fit.coefficients[term]
                std = fit.std_betas.get(term)
                beta = f" beta={std.beta:.4f} (se {std.se_hc3:.4f})" if std else ""
                print(
                    f"  {term:10s} B={c.b:+.6g} SE={c.se:.6g} t={c.t:+.3f} p={c.p:.4g}{beta}"
                )
            dw_text = (
                "perfect fit" if dw.perfect_fit else f"DW={dw.statistic:.3f} (p={dw.p:.4f})"
            )
            rho = f" rho={fit.rho:.4f}" if fit.rho is not None else ""
            print(
                f"  F({fit.df1},{fit.df2})={fit.f_stat:.4g} adjR2={fit.adj_r2:.4f} "
                f"{dw_text}{rho} BIC={fit.bic:.2f}"
            )
    except (LexshiftError, OSError, ValueError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "analyze":
        return _cmd_analyze(args)
    if args.command == "top":
        return _cmd_top(args)
    return _cmd_fit(args)


if __name__ == "__main__":
    sys.exit(main())
