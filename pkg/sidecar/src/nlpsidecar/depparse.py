"""Heuristic dependency parser producing CoNLL-U.

A deterministic sequence-rule parser, not a statistical one: closed-class
words come from small lexicons, adjectives attach to the nearest following
noun as amod, the first verb is the root, and remaining nouns attach as
nsubj/obj around it. The output contract is structural: valid 10-column
CoNLL-U with in-bounds heads, one root per sentence, and faithful amod
edges for adjective-noun pairs such as intensified fused targets.
"""

from __future__ import annotations

from .conventions import is_number, is_punct, split_sentences, tokenize
from .lemmatizer import lemmatize

PARSER_VERSION = "rule-parser-v1"

DETS = {"the", "a", "an", "this", "that", "these", "those", "his", "her", "its",
        "their", "our", "my", "your", "some", "any", "no", "each", "every"}
ADPS = {"of", "in", "on", "at", "by", "for", "with", "from", "to", "into",
        "through", "during", "between", "against", "about", "over", "under",
        "after", "before", "since", "among", "within"}
PRONOUNS = {"i", "you", "he", "she", "it", "we", "they", "me", "him", "them",
            "us", "who", "whom", "which"}
CONJS = {"and", "or", "but", "nor"}

_VERB_STEMS = {
    "persist", "remain", "appear", "change", "matter", "improve", "decline",
    "shift", "increase", "decrease", "rise", "fall", "grow", "affect",
    "suffer", "say", "show", "seem", "become", "stay", "run", "go", "help",
    "need", "want", "treat", "cure", "report", "describe", "concern",
    "continue", "reflect", "indicate", "suggest", "reveal", "include",
}
_VERB_FORMS = {"is", "are", "was", "were", "be", "been", "being", "am", "has",
               "have", "had", "do", "does", "did", "can", "will", "may",
               "might", "must", "should", "would", "could", "ran", "went",
               "rose", "fell", "grew", "became", "said", "showed", "seemed"}
for _stem in _VERB_STEMS:
    _VERB_FORMS.update({_stem, _stem + "s", _stem + "ed", _stem + "ing"})
    if _stem.endswith("e"):
        _VERB_FORMS.update({_stem[:-1] + "ed", _stem[:-1] + "ing", _stem + "d"})

ADJ_LEXICON = {
    "severe", "serious", "major", "extreme", "great", "intense", "harsh",
    "powerful", "devastating", "destructive", "debilitating", "poor", "good",
    "bad", "new", "old", "high", "low", "public", "general", "recent",
    "common", "positive", "negative", "maternal", "parental", "chronic",
    "acute", "clinical", "mental", "physical", "social", "rural", "modern",
    "national", "calm", "happy", "same", "other", "such", "own",
}
_ADJ_SUFFIXES = ("ous", "ful", "ive", "ical", "able", "ible", "ant", "ent",
                 "less", "ish", "al")


def _tag(token: str) -> str:
    if is_punct(token):
        return "PUNCT"
    if is_number(token):
        return "NUM"
    low = token.lower()
    if "_" in low:
        return "NOUN"
    if low in DETS:
        return "DET"
    if low in ADPS:
        return "ADP"
    if low in PRONOUNS:
        return "PRON"
    if low in CONJS:
        return "CCONJ"
    if low in _VERB_FORMS:
        return "VERB"
    if low in ADJ_LEXICON or low.endswith(_ADJ_SUFFIXES):
        return "ADJ"
    return "NOUN"


def parse_sentence(text: str) -> list[tuple[str, str, str, int, str]]:
    """Rows of (form, lemma, upos, head, deprel); empty list for no tokens."""
    forms = tokenize(text)
    if not forms:
        return []
    tags = [_tag(f) for f in forms]
    n = len(forms)

    root = next((i for i, t in enumerate(tags) if t == "VERB"), None)
    if root is None:
        root = next((i for i, t in enumerate(tags) if t in ("NOUN", "PRON")), 0)

    def next_nominal(start: int) -> int | None:
        for j in range(start + 1, n):
            if tags[j] in ("NOUN", "PRON"):
                return j
        return None

    heads = [0] * n
    rels = [""] * n
    for i, tag in enumerate(tags):
        if i == root:
            heads[i] = 0
            rels[i] = "root"
            continue
        if tag == "DET":
            j = next_nominal(i)
            heads[i], rels[i] = (j + 1, "det") if j is not None else (root + 1, "dep")
        elif tag == "ADJ":
            j = next_nominal(i)
            heads[i], rels[i] = (j + 1, "amod") if j is not None else (root + 1, "dep")
        elif tag == "ADP":
            j = next_nominal(i)
            heads[i], rels[i] = (j + 1, "case") if j is not None else (root + 1, "dep")
        elif tag == "NUM":
            j = next_nominal(i)
            heads[i], rels[i] = (j + 1, "nummod") if j is not None else (root + 1, "dep")
        elif tag in ("NOUN", "PRON"):
            heads[i] = root + 1
            rels[i] = "nsubj" if (i < root and tags[root] == "VERB") else (
                "obj" if tags[root] == "VERB" else "nmod"
            )
        elif tag == "CCONJ":
            heads[i], rels[i] = root + 1, "cc"
        elif tag == "PUNCT":
            heads[i], rels[i] = root + 1, "punct"
        else:
            heads[i], rels[i] = root + 1, "dep"

    return [
        (forms[i], lemmatize(forms[i]) if tags[i] != "PUNCT" else forms[i], tags[i], heads[i], rels[i])
        for i in range(n)
    ]


def conllu_document(doc_id: str, year: int, text: str) -> str:
    """Full CoNLL-U block for one document, with metadata comments."""
    lines = [f"# doc_id = {doc_id}", f"# year = {year}"]
    for sentence in split_sentences(text):
        rows = parse_sentence(sentence)
        if not rows:
            continue
        for tid, (form, lemma, upos, head, deprel) in enumerate(rows, 1):
            lines.append(f"{tid}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{deprel}\t_\t_")
        lines.append("")
    return "\n".join(lines) + "\n"
