import random
import string

import pytest

from augkit.corpus import (
    LabeledRecord,
    StopwordSet,
    detokenize,
    from_tokens,
    load_dataset,
    load_stopwords,
    make_token,
    tokenize,
    write_dataset,
)
from augkit.errors import DuplicateId, IoError, MalformedRow, TabInText


def surfaces(text):
    return [t.surface for t in tokenize(text).tokens]


class TestTokenize:
    def test_trailing_punctuation_split(self):
        assert surfaces("Hunden sprang.") == ["Hunden", "sprang", "."]

    def test_empty_input(self):
        assert tokenize("").tokens == ()

    def test_plain_words(self):
        assert surfaces("Mattias Larsson äter") == ["Mattias", "Larsson", "äter"]

    def test_leading_punctuation(self):
        assert surfaces("(hej) du!") == ["(", "hej", ")", "du", "!"]

    def test_interior_punctuation_kept(self):
        assert surfaces("e-post don't 3.14") == ["e-post", "don't", "3.14"]

    def test_punctuation_only_chunk(self):
        assert surfaces("hej ...") == ["hej", ".", ".", "."]

    def test_no_whitespace_inside_tokens(self):
        for tok in tokenize("en\tkatt sprang  fort").tokens:
            assert not any(ch.isspace() for ch in tok.surface)

    def test_token_fields(self):
        tok = tokenize("Katt").tokens[0]
        assert tok.surface == "Katt"
        assert tok.lookup_form == "katt"
        assert tok.is_alphabetic
        assert not tok.is_stopword
        assert tok.pos_tag is None

    def test_stopword_flag(self):
        stops = StopwordSet(frozenset({"och"}))
        toks = tokenize("Och katt", stops).tokens
        assert toks[0].is_stopword and not toks[1].is_stopword

    def test_non_alphabetic_flags(self):
        toks = tokenize("katt 42 .").tokens
        assert [t.is_alphabetic for t in toks] == [True, False, False]


class TestDetokenize:
    def test_punctuation_attaches(self):
        s = from_tokens([make_token("a"), make_token(","), make_token("b")])
        assert detokenize(s) == "a, b"

    def test_inverse_of_tokenize(self):
        assert detokenize(tokenize("Hunden sprang.")) == "Hunden sprang."

    def test_empty(self):
        assert detokenize(tokenize("")) == ""

    def test_roundtrip_stability_fixed_cases(self):
        for text in ["Hunden sprang.", "a, b", "(hej) du!", "ord ... ord", "x"]:
            once = surfaces(text)
            again = surfaces(detokenize(tokenize(text)))
            assert once == again

    def test_roundtrip_stability_random(self):
        rng = random.Random(991)
        letters = string.ascii_letters + "åäö"
        puncts = ".,!?()"
        for _ in range(300):
            chunks = []
            for _ in range(rng.randint(1, 12)):
                word = "".join(rng.choice(letters) for _ in range(rng.randint(1, 8)))
                if rng.random() < 0.3:
                    word = rng.choice(puncts) + word
                if rng.random() < 0.4:
                    word += rng.choice(puncts)
                chunks.append(word)
            text = " ".join(chunks)
            assert surfaces(detokenize(tokenize(text))) == surfaces(text)

    def test_token_count_case_invariant(self):
        rng = random.Random(992)
        for _ in range(100):
            words = ["Hej", "du", "(glada)", "Katt!", "42"]
            rng.shuffle(words)
            text = " ".join(words)
            assert len(tokenize(text).tokens) == len(tokenize(text.upper()).tokens)
            assert len(tokenize(text).tokens) == len(tokenize(text.lower()).tokens)


class TestDatasets:
    def test_tsv_load(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("bra film\t5\n", encoding="utf-8")
        records = load_dataset(p, "tsv")
        assert records == [LabeledRecord("0", "bra film", "5")]

    def test_jsonl_load(self, tmp_path):
        p = tmp_path / "d.jsonl"
        p.write_text('{"id":"a1","text":"x","label":"1"}\n', encoding="utf-8")
        assert load_dataset(p, "jsonl") == [LabeledRecord("a1", "x", "1")]

    def test_tsv_three_fields_malformed(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("a\tb\tc\n", encoding="utf-8")
        with pytest.raises(MalformedRow, match="line 1"):
            load_dataset(p, "tsv")

    def test_jsonl_bad_json(self, tmp_path):
        p = tmp_path / "d.jsonl"
        p.write_text("{nope\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_dataset(p, "jsonl")

    def test_duplicate_ids(self, tmp_path):
        p = tmp_path / "d.jsonl"
        p.write_text('{"id":"x","text":"a","label":"1"}\n{"id":"x","text":"b","label":"1"}\n', encoding="utf-8")
        with pytest.raises(DuplicateId):
            load_dataset(p, "jsonl")

    def test_empty_label_rejected(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text("text\t\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_dataset(p, "tsv")

    def test_meta_lines_skipped(self, tmp_path):
        p = tmp_path / "d.tsv"
        p.write_text('#meta {"tool": "augkit"}\nbra\t1\n', encoding="utf-8")
        assert len(load_dataset(p, "tsv")) == 1

    def test_missing_file(self, tmp_path):
        with pytest.raises(IoError):
            load_dataset(tmp_path / "absent.tsv", "tsv")

    @pytest.mark.parametrize("fmt", ["tsv", "jsonl"])
    def test_roundtrip_single(self, tmp_path, fmt):
        records = [LabeledRecord("0", "en bra film", "pos")]
        p = tmp_path / f"d.{fmt}"
        write_dataset(records, p, fmt)
        assert load_dataset(p, fmt) == records

    @pytest.mark.parametrize("fmt", ["tsv", "jsonl"])
    def test_roundtrip_empty(self, tmp_path, fmt):
        p = tmp_path / f"d.{fmt}"
        write_dataset([], p, fmt)
        assert load_dataset(p, fmt) == []

    def test_roundtrip_many_jsonl_arbitrary_ids(self, tmp_path):
        records = [LabeledRecord(f"r{i}", f"text {i} åäö", str(i % 3 + 1)) for i in range(50)]
        p = tmp_path / "d.jsonl"
        write_dataset(records, p, "jsonl")
        assert load_dataset(p, "jsonl") == records

    def test_tab_in_text_refused(self, tmp_path):
        with pytest.raises(TabInText):
            write_dataset([LabeledRecord("0", "a\tb", "1")], tmp_path / "d.tsv", "tsv")

    def test_newline_in_text_refused(self, tmp_path):
        with pytest.raises(TabInText):
            write_dataset([LabeledRecord("0", "a\nb", "1")], tmp_path / "d.tsv", "tsv")


class TestStopwords:
    def test_load(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("och\nen\n", encoding="utf-8")
        stops = load_stopwords(p)
        assert len(stops) == 2

    def test_case_folding(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("OCH\n", encoding="utf-8")
        stops = load_stopwords(p)
        assert stops.contains("och") and stops.contains("Och") and "oCH" in stops

    def test_comments_and_blanks(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("# kommentar\n\nen\n", encoding="utf-8")
        assert len(load_stopwords(p)) == 1

    def test_empty_file(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("", encoding="utf-8")
        stops = load_stopwords(p)
        assert len(stops) == 0
        assert not any(t.is_stopword for t in tokenize("en katt och", stops).tokens)
