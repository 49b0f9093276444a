from nlpsidecar.conventions import sentence_hash, split_sentences, tokenize
from nlpsidecar.depparse import conllu_document, parse_sentence
from nlpsidecar.lemmatizer import lemma_sentences, lemmatize


class TestLemmatizer:
    def test_cats_ran(self):
        assert lemma_sentences("The cats ran") == [["cat", "run"]]

    def test_stopword_only_doc(self):
        assert lemma_sentences("the of and is") == []

    def test_numbers_and_punct_skipped(self):
        assert lemma_sentences("Results: 42 items!") == [["result", "item"]]

    def test_fused_token_passthrough(self):
        got = lemma_sentences("severe mental_health issues")
        assert got == [["severe", "mental_health", "issue"]]

    def test_suffix_rules(self):
        assert lemmatize("illnesses") == "illness"
        assert lemmatize("studies") == "study"
        assert lemmatize("changed") == "change"
        assert lemmatize("running") == "run"
        assert lemmatize("boxes") == "box"
        assert lemmatize("classes") == "class"
        assert lemmatize("agreed") == "agree"

    def test_irregulars(self):
        assert lemmatize("went") == "go"
        assert lemmatize("children") == "child"
        assert lemmatize("wrote") == "write"

    def test_non_inflected_stable(self):
        for word in ("illness", "disorder", "severe", "treatment"):
            assert lemmatize(word) == word

    def test_sentence_segmentation(self):
        got = lemma_sentences("Dogs bark. Cats sleep.")
        assert got == [["dog", "bark"], ["cat", "sleep"]]


class TestParser:
    def test_amod_to_fused_target(self):
        rows = parse_sentence("severe mental_illness persists")
        assert rows[0] == ("severe", "severe", "ADJ", 2, "amod")
        assert rows[1][2] == "NOUN" and rows[1][4] == "nsubj"
        assert rows[2][3] == 0 and rows[2][4] == "root"

    def test_exactly_one_root(self):
        for text in (
            "The quick dog runs fast.",
            "severe illness",
            "Hello!",
            "The condition of the patient improves now.",
        ):
            rows = parse_sentence(text)
            assert sum(1 for r in rows if r[3] == 0) == 1

    def test_heads_in_bounds(self):
        rows = parse_sentence("The severe burden of mental_illness remains a public problem .")
        n = len(rows)
        assert all(0 <= r[3] <= n for r in rows)

    def test_det_attaches_to_noun(self):
        rows = parse_sentence("The illness persists")
        assert rows[0][4] == "det" and rows[0][3] == 2

    def test_punct_tagged(self):
        rows = parse_sentence("It persists .")
        assert rows[-1][2] == "PUNCT" and rows[-1][4] == "punct"

    def test_empty_sentence(self):
        assert parse_sentence("") == []


class TestConlluDocument:
    def test_structure(self):
        block = conllu_document("d1", 1999, "Severe illness persists. It matters.")
        lines = block.splitlines()
        assert lines[0] == "# doc_id = d1"
        assert lines[1] == "# year = 1999"
        token_lines = [l for l in lines if l and not l.startswith("#")]
        assert all(len(l.split("\t")) == 10 for l in token_lines)
        assert block.count("\n\n") >= 2  # blank line ends each sentence


class TestConventions:
    def test_tokenize_keeps_fused(self):
        assert tokenize("severe mental_illness, truly.") == [
            "severe", "mental_illness", ",", "truly", ".",
        ]

    def test_split_sentences(self):
        assert split_sentences("One. Two! Three?") == ["One.", "Two!", "Three?"]

    def test_sentence_hash_is_16_hex(self):
        h = sentence_hash("abc")
        assert len(h) == 16
        int(h, 16)
