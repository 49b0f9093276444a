"""Rule-based English lemmatizer and the lemma-corpus view builder.

A lightweight approximation of a statistical lemmatizer: an irregular-form
table plus ordered suffix rules with consonant undoubling and a small
silent-e restoration lexicon. The lemma view drops tokens with
uninformative tags (punctuation, symbols, numbers) and stop words, then
lowercases. Underscore-fused target tokens pass through untouched.
"""

from __future__ import annotations

from importlib.resources import files

from .conventions import has_letters, is_number, is_punct, split_sentences, tokenize

LEMMATIZER_VERSION = "rule-lemmatizer-v1"

STOPWORDS = frozenset(
    line.split("#", 1)[0].strip()
    for line in (files("nlpsidecar") / "data" / "stopwords.txt")
    .read_text(encoding="utf-8")
    .splitlines()
    if line.split("#", 1)[0].strip()
)

IRREGULAR = {
    "am": "be", "is": "be", "are": "be", "was": "be", "were": "be", "been": "be",
    "being": "be", "has": "have", "had": "have", "having": "have", "does": "do",
    "did": "do", "done": "do", "went": "go", "gone": "go", "ran": "run",
    "said": "say", "made": "make", "took": "take", "taken": "take", "got": "get",
    "gotten": "get", "gave": "give", "given": "give", "came": "come", "saw": "see",
    "seen": "see", "knew": "know", "known": "know", "found": "find",
    "thought": "think", "felt": "feel", "left": "leave", "kept": "keep",
    "held": "hold", "told": "tell", "became": "become", "began": "begin",
    "begun": "begin", "brought": "bring", "bought": "buy", "grew": "grow",
    "grown": "grow", "led": "lead", "met": "meet", "paid": "pay", "rose": "rise",
    "risen": "rise", "sat": "sit", "spoke": "speak", "spoken": "speak",
    "stood": "stand", "wrote": "write", "written": "write", "children": "child",
    "men": "man", "women": "woman", "feet": "foot", "teeth": "tooth",
    "mice": "mouse", "lives": "life", "worse": "bad", "worst": "bad",
    "better": "good", "best": "good",
}

# Stems whose silent e must be restored after stripping -ed/-ing/-es.
_E_RESTORE = {
    "make", "take", "change", "use", "cause", "give", "come", "live", "move",
    "serve", "note", "care", "share", "hope", "believe", "create", "describe",
    "provide", "increase", "decrease", "reduce", "produce", "improve",
    "include", "involve", "require", "examine", "compare", "relate",
    "associate", "evaluate", "indicate", "experience", "calculate", "estimate",
    "decline", "rise", "become", "face", "receive", "achieve", "measure",
    "manage", "range", "state", "outcome", "service", "base", "value", "house",
}

_DOUBLES = ("bb", "dd", "gg", "pp", "tt", "mm", "nn", "rr", "ll")
_ES_DROP = ("ches", "shes", "xes", "zes", "sses", "oes")


def _strip_inflection(stem: str) -> str:
    if stem + "e" in _E_RESTORE:
        return stem + "e"
    if stem.endswith(_DOUBLES) and len(stem) > 3:
        return stem[:-1]
    return stem


def lemmatize(token: str) -> str:
    """Lowercase lemma of one word token."""
    word = token.lower()
    if word in IRREGULAR:
        return IRREGULAR[word]
    if "_" in word or len(word) <= 3:
        return word
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith(_ES_DROP):
        return word[:-2]
    if word.endswith("ss") or word.endswith("us") or word.endswith("is"):
        return word
    if word.endswith("ied"):
        return word[:-3] + "y"
    if word.endswith("eed"):
        return word[:-1]
    if word.endswith("ed") and len(word) > 4:
        return _strip_inflection(word[:-2])
    if word.endswith("ing") and len(word) > 5:
        return _strip_inflection(word[:-3])
    if word.endswith("s"):
        return word[:-1]
    return word


def lemma_sentences(text: str) -> list[list[str]]:
    """Sentence-segmented lemmas: punctuation, numbers, stop words removed."""
    out = []
    for sentence in split_sentences(text):
        lemmas = []
        for token in tokenize(sentence):
            if is_punct(token) or is_number(token) or not has_letters(token):
                continue
            low = token.lower()
            if low in STOPWORDS:
                continue
            lemma = lemmatize(low)
            if lemma in STOPWORDS:
                continue
            lemmas.append(lemma)
        if lemmas:
            out.append(lemmas)
    return out
