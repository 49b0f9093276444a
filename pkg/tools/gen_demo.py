#!/usr/bin/env python3
"""Generate the bundled demo corpus (raw/lemma/parsed views + synthetic norms).

200 documents over 1970-2016 with two fused targets, written to demo/.
Deterministic for a given seed; the committed files come from seed 7.
The norms CSV is synthetic (real affect norms are licensed data the user
supplies); ratings are chosen so every year has matched collocates.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

TARGETS = ("mental_health", "perception")

# (word, valence, arousal): synthetic ratings on the 1-9 scale.
NORM_WORDS = [
    ("happy", 8.21, 6.05), ("hope", 7.84, 5.12), ("support", 7.12, 4.33),
    ("care", 7.45, 4.91), ("calm", 6.89, 1.67), ("friend", 7.92, 5.44),
    ("family", 7.66, 4.82), ("community", 6.95, 4.05), ("service", 6.10, 3.88),
    ("program", 5.92, 3.71), ("school", 6.01, 4.26), ("research", 6.33, 4.11),
    ("study", 5.88, 3.64), ("people", 6.42, 4.47), ("child", 7.08, 5.23),
    ("worker", 5.51, 4.02), ("problem", 2.91, 5.67), ("burden", 2.55, 5.31),
    ("crisis", 2.11, 7.42), ("fear", 2.32, 6.93), ("risk", 3.24, 6.12),
    ("stress", 2.44, 6.78), ("stigma", 2.61, 5.88), ("struggle", 3.02, 5.95),
    ("decline", 3.11, 4.87), ("loss", 2.23, 5.52), ("pain", 2.04, 6.41),
    ("poverty", 2.18, 5.74), ("illness", 2.48, 5.83), ("disorder", 2.72, 5.96),
    ("treatment", 5.12, 4.64), ("clinical", 4.87, 4.21), ("symptom", 3.35, 5.08),
    ("diagnosis", 3.91, 5.27), ("medicine", 5.74, 4.39), ("recovery", 7.21, 5.01),
]
# Plausible words deliberately absent from the norms file (unmatched collocates).
PLAIN_WORDS = ["bridge", "window", "corridor", "ledger", "harbor", "meadow", "lantern", "gravel"]
VERBS = ["remains", "appears", "changes", "matters", "persists", "improves", "declines", "shifts"]
INTENSIFIERS = ["severe", "serious", "major", "extreme"]
OTHER_ADJ = ["public", "general", "recent", "national", "rural", "modern"]
STOPS = ["the", "a", "of", "in", "for", "and", "to", "is"]
GENRES = ["news", "magazine", "fiction", "spoken", "abstract"]

YEARS = list(range(1970, 2017))


def _sentence_words(rng, target: str) -> tuple[list[str], list[str]]:
    """Return (surface tokens, context-word pool used) for one target sentence."""
    n_ctx = int(rng.integers(3, 7))
    ctx = [NORM_WORDS[int(i)][0] for i in rng.choice(len(NORM_WORDS), size=n_ctx)]
    if rng.random() < 0.35:
        ctx.append(PLAIN_WORDS[int(rng.integers(len(PLAIN_WORDS)))])
    verb = VERBS[int(rng.integers(len(VERBS)))]
    left = ctx[: len(ctx) // 2]
    right = ctx[len(ctx) // 2 :]
    words = (
        [STOPS[int(rng.integers(len(STOPS)))]]
        + left
        + [target, verb]
        + [STOPS[int(rng.integers(len(STOPS)))]]
        + right
    )
    return words, ctx


def _parsed_sentence(rng, target: str) -> list[tuple[str, str, str, int, str]]:
    """(form, lemma, upos, head, deprel) rows: [det] [amod]* target verb obj."""
    rows = []
    adjs = []
    if rng.random() < 0.4:
        pool = INTENSIFIERS if rng.random() < 0.5 else OTHER_ADJ
        adjs.append(pool[int(rng.integers(len(pool)))])
    det_n = 1
    target_pos = det_n + len(adjs) + 1
    verb_pos = target_pos + 1
    obj = NORM_WORDS[int(rng.integers(len(NORM_WORDS)))][0]
    rows.append(("The", "the", "DET", target_pos, "det"))
    for adj in adjs:
        rows.append((adj, adj, "ADJ", target_pos, "amod"))
    rows.append((target, target, "NOUN", verb_pos, "nsubj"))
    rows.append((VERBS[int(rng.integers(len(VERBS)))], "persist", "VERB", 0, "root"))
    rows.append((obj, obj, "NOUN", verb_pos, "obj"))
    return rows


def generate(out_dir: Path, seed: int = 7, n_docs: int = 200) -> None:
    rng = np.random.Generator(np.random.PCG64(seed))
    out_dir.mkdir(parents=True, exist_ok=True)

    raw_lines = []
    lemma_lines = []
    conllu_blocks = []
    stopset = set(STOPS)

    for i in range(n_docs):
        year = YEARS[i % len(YEARS)]
        doc_id = f"demo-{i:04d}"
        genre = GENRES[i % len(GENRES)]
        sentences: list[str] = []
        lemma_sents: list[list[str]] = []
        parsed: list[list[tuple]] = []

        for target in TARGETS:
            words, _ = _sentence_words(rng, target)
            sentences.append(" ".join(words) + ".")
            lemma_sents.append([w for w in words if w not in stopset])
            parsed.append(_parsed_sentence(rng, target))
        if rng.random() < 0.5:
            filler = [PLAIN_WORDS[int(j)] for j in rng.choice(len(PLAIN_WORDS), size=4)]
            sentences.append(" ".join(filler) + ".")
            lemma_sents.append(filler)

        raw_lines.append(
            json.dumps(
                {"doc_id": doc_id, "year": year, "genre": genre, "text": " ".join(sentences)}
            )
        )
        lemma_lines.append(
            json.dumps({"doc_id": doc_id, "year": year, "sentences": lemma_sents})
        )
        block = [f"# doc_id = {doc_id}", f"# year = {year}"]
        for sent in parsed:
            for tid, (form, lemma, upos, head, deprel) in enumerate(sent, 1):
                block.append(
                    f"{tid}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_"
                )
            block.append("")
        conllu_blocks.append("\n".join(block))

    (out_dir / "raw.jsonl").write_text("\n".join(raw_lines) + "\n", encoding="utf-8")
    (out_dir / "lemmas.jsonl").write_text("\n".join(lemma_lines) + "\n", encoding="utf-8")
    (out_dir / "parsed.conllu").write_text("\n".join(conllu_blocks) + "\n", encoding="utf-8")

    with open(out_dir / "norms.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("word,valence_mean,arousal_mean\n")
        for word, val, aro in sorted(NORM_WORDS):
            fh.write(f"{word},{val},{aro}\n")

    config = """\
# Demo analysis config; paths resolve relative to this file.
seed = 42
window = 5
study_window = [1970, 2016]
targets = ["mental health", "perception"]
provider = "stub"
out_dir = "out"

[provider_options]
dim = 16
seed = 0

[breadth]
interval_length = 5
sample_size = 50
repeats = 10
window = [1970, 2014]

[lexicon]
norms = "norms.csv"

[[corpora]]
name = "demo"
raw = "raw.jsonl"
lemma = "lemmas.jsonl"
conllu = "parsed.conllu"

# Sparse early periods can be excluded per (corpus, index) at the analysis
# layer, e.g. valence before 1990:
[[year_mask]]
corpus = "demo"
index = "valence"
start = 1970
end = 1989
"""
    (out_dir / "config.toml").write_text(config, encoding="utf-8")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "demo"))
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--docs", type=int, default=200)
    args = ap.parse_args()
    generate(Path(args.out), seed=args.seed, n_docs=args.docs)
    print(f"wrote demo corpus to {args.out}")
