import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rerrfact.corpus import (
    AbstractDoc,
    Claim,
    Corpus,
    DataError,
    GoldEvidence,
    GoldRationale,
    Label,
    load_claims,
    load_corpus,
    parse_evidence_label,
    save_claims,
    save_corpus,
    split_claims,
)


def write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")


def make_corpus_file(path, docs):
    write_jsonl(path, [{"doc_id": d, "title": t, "abstract": s} for d, t, s in docs])
    return path


class TestLoadCorpus:
    def test_minimal_record(self, tmp_path):
        path = make_corpus_file(tmp_path / "c.jsonl", [(1, "T", ["a."])])
        corpus = load_corpus(path)
        assert len(corpus) == 1
        assert corpus[1].n == 1
        assert corpus[1].title == "T"

    def test_duplicate_doc_id_names_both_lines(self, tmp_path):
        docs = [(1, "A", ["x."]), (7, "B", ["y."]), (2, "C", ["z."]), (3, "D", ["w."]), (7, "E", ["v."])]
        path = make_corpus_file(tmp_path / "c.jsonl", docs)
        with pytest.raises(DataError, match=r"line 5.*line 2|:5:.*line 2"):
            load_corpus(path)

    def test_three_line_fixture_hand_parsed(self, tmp_path):
        docs = [
            (10, "First title", ["One.", "Two."]),
            (20, "Second title", ["Three."]),
            (30, "Third title", ["Four.", "Five.", "Six."]),
        ]
        path = make_corpus_file(tmp_path / "c.jsonl", docs)
        corpus = load_corpus(path)
        assert corpus.doc_ids == (10, 20, 30)  # line order preserved
        assert corpus[10].sentences == ("One.", "Two.")
        assert corpus[20].n == 1
        assert corpus[30].sentences[2] == "Six."

    def test_malformed_line_reports_line_number(self, tmp_path):
        path = tmp_path / "c.jsonl"
        path.write_text('{"doc_id": 1, "title": "T", "abstract": ["a."]}\nnot json\n')
        with pytest.raises(DataError, match=":2:"):
            load_corpus(path)

    def test_empty_sentence_list_rejected(self, tmp_path):
        path = make_corpus_file(tmp_path / "c.jsonl", [(1, "T", [])])
        with pytest.raises(DataError, match="empty sentence list"):
            load_corpus(path)

    def test_blank_sentence_rejected(self, tmp_path):
        path = make_corpus_file(tmp_path / "c.jsonl", [(1, "T", ["ok.", "   "])])
        with pytest.raises(DataError, match="sentence 1 is empty"):
            load_corpus(path)

    def test_extra_keys_ignored(self, tmp_path):
        write_jsonl(
            tmp_path / "c.jsonl",
            [{"doc_id": 1, "title": "T", "abstract": ["a."], "structured": True}],
        )
        corpus = load_corpus(tmp_path / "c.jsonl")
        assert len(corpus) == 1


@pytest.fixture
def small_corpus(tmp_path):
    path = make_corpus_file(
        tmp_path / "corpus.jsonl",
        [(1, "One", ["a."]), (2, "Two", ["b.", "c.", "d.", "e.", "f."])],
    )
    return load_corpus(path)


class TestLoadClaims:
    def test_minimal_valid_claim(self, tmp_path, small_corpus):
        write_jsonl(
            tmp_path / "claims.jsonl",
            [
                {
                    "id": 5,
                    "claim": "c",
                    "evidence": {"1": [{"sentences": [0], "label": "SUPPORT"}]},
                    "cited_doc_ids": [1],
                }
            ],
        )
        claims = load_claims(tmp_path / "claims.jsonl", small_corpus)
        assert len(claims) == 1
        assert claims[0].label is Label.SUPPORTS
        assert claims[0].evidence[0].rationales[0].sentence_indices == (0,)

    def test_rationale_index_out_of_bounds(self, tmp_path, small_corpus):
        write_jsonl(
            tmp_path / "claims.jsonl",
            [{"id": 1, "claim": "c", "evidence": {"2": [{"sentences": [9], "label": "SUPPORT"}]}}],
        )
        with pytest.raises(DataError, match="index 9 out of bounds"):
            load_claims(tmp_path / "claims.jsonl", small_corpus)

    def test_mixed_labels_across_docs_rejected(self, tmp_path, small_corpus):
        write_jsonl(
            tmp_path / "claims.jsonl",
            [
                {
                    "id": 1,
                    "claim": "c",
                    "evidence": {
                        "1": [{"sentences": [0], "label": "SUPPORT"}],
                        "2": [{"sentences": [1], "label": "CONTRADICT"}],
                    },
                }
            ],
        )
        with pytest.raises(DataError, match="mixed"):
            load_claims(tmp_path / "claims.jsonl", small_corpus)

    def test_unknown_doc_id(self, tmp_path, small_corpus):
        write_jsonl(
            tmp_path / "claims.jsonl",
            [{"id": 1, "claim": "c", "evidence": {"99": [{"sentences": [0], "label": "SUPPORT"}]}}],
        )
        with pytest.raises(DataError, match="unknown doc_id 99"):
            load_claims(tmp_path / "claims.jsonl", small_corpus)

    def test_label_spellings_case_insensitive(self):
        assert parse_evidence_label("support") is Label.SUPPORTS
        assert parse_evidence_label("SUPPORTS") is Label.SUPPORTS
        assert parse_evidence_label("Contradict") is Label.REFUTES
        assert parse_evidence_label("refutes") is Label.REFUTES
        with pytest.raises(DataError):
            parse_evidence_label("noinfo")

    def test_more_than_three_rationales_rejected(self, tmp_path, small_corpus):
        entries = [{"sentences": [i], "label": "SUPPORT"} for i in range(4)]
        write_jsonl(tmp_path / "claims.jsonl", [{"id": 1, "claim": "c", "evidence": {"2": entries}}])
        with pytest.raises(DataError, match="rationales exceed"):
            load_claims(tmp_path / "claims.jsonl", small_corpus)

    def test_cited_only_flag(self, tmp_path, small_corpus):
        write_jsonl(
            tmp_path / "claims.jsonl",
            [{"id": 1, "claim": "c", "evidence": {}, "cited_doc_ids": [2]}],
        )
        claims = load_claims(tmp_path / "claims.jsonl", small_corpus)
        assert claims[0].cited_only
        assert claims[0].label is None


class TestRoundTrip:
    def test_corpus_round_trip(self, tmp_path, small_corpus):
        out = tmp_path / "again.jsonl"
        save_corpus(small_corpus, out)
        assert load_corpus(out) == small_corpus

    def test_claims_round_trip(self, tmp_path, small_corpus):
        claims = [
            Claim(
                id=3,
                text="some claim",
                evidence=(
                    GoldEvidence(2, Label.REFUTES, (GoldRationale((1, 3)), GoldRationale((0,)))),
                ),
                cited_doc_ids=(1, 2),
            ),
            Claim(id=4, text="bare claim"),
        ]
        out = tmp_path / "claims.jsonl"
        save_claims(claims, out)
        assert load_claims(out, small_corpus) == claims

    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_generated_corpus_round_trip(self, tmp_path_factory, data):
        word = st.text(alphabet="abcdefgh XYZ0", min_size=1, max_size=12).filter(
            lambda s: s.strip()
        )
        docs = []
        doc_ids = data.draw(st.lists(st.integers(0, 10_000), min_size=1, max_size=6, unique=True))
        for doc_id in doc_ids:
            sentences = tuple(data.draw(st.lists(word, min_size=1, max_size=4)))
            docs.append(AbstractDoc(doc_id=doc_id, title=data.draw(word), sentences=sentences))
        corpus = Corpus(docs)
        path = tmp_path_factory.mktemp("roundtrip") / "corpus.jsonl"
        save_corpus(corpus, path)
        assert load_corpus(path) == corpus


class TestInvariants:
    def test_mixed_label_claim_rejected_at_construction(self):
        with pytest.raises(DataError, match="mixed"):
            Claim(
                id=1,
                text="c",
                evidence=(
                    GoldEvidence(1, Label.SUPPORTS, (GoldRationale((0,)),)),
                    GoldEvidence(2, Label.REFUTES, (GoldRationale((0,)),)),
                ),
            )

    def test_gold_evidence_never_noinfo(self):
        with pytest.raises(DataError):
            GoldEvidence(1, Label.NOINFO, (GoldRationale((0,)),))

    def test_empty_rationale_rejected(self):
        with pytest.raises(DataError):
            GoldRationale(())


class TestSplitClaims:
    def make_claims(self, n):
        return [Claim(id=i, text=f"claim {i}") for i in range(n)]

    def test_three_quarters_of_four(self):
        split = split_claims(self.make_claims(4), 0.75, seed=0)
        assert len(split.train) == 3
        assert len(split.validation) == 1

    def test_half_of_two_any_seed(self):
        for seed in range(5):
            split = split_claims(self.make_claims(2), 0.5, seed=seed)
            assert len(split.train) == 1
            assert len(split.validation) == 1

    def test_deterministic(self):
        claims = self.make_claims(20)
        first = split_claims(claims, 0.75, seed=42)
        second = split_claims(claims, 0.75, seed=42)
        assert first == second

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            split_claims([], 0.5, seed=0)

    def test_bad_fraction_rejected(self):
        with pytest.raises(DataError):
            split_claims(self.make_claims(2), 1.0, seed=0)

    @settings(max_examples=50)
    @given(n=st.integers(1, 60), fraction=st.floats(0.01, 0.99), seed=st.integers(0, 1000))
    def test_partition_property(self, n, fraction, seed):
        claims = self.make_claims(n)
        split = split_claims(claims, fraction, seed)
        assert len(split.train) + len(split.validation) == n
        train_ids = {c.id for c in split.train}
        val_ids = {c.id for c in split.validation}
        assert not (train_ids & val_ids)
        assert train_ids | val_ids == {c.id for c in claims}
