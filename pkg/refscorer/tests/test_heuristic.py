import pytest

from refscorer.heuristic import heuristic_score, tokenize


class TestTokenize:
    def test_lowercases_and_splits_alnum_runs(self):
        assert tokenize("Hello, World-2!") == ["hello", "world", "2"]

    def test_underscore_splits(self):
        assert tokenize("a_b") == ["a", "b"]


class TestHeuristicScore:
    def test_identical_texts(self):
        assert heuristic_score("Same words here", "same WORDS here") == 1.0

    def test_disjoint_texts(self):
        assert heuristic_score("alpha beta", "gamma delta") == 0.5

    def test_one_third_overlap(self):
        # tokens {a, b} vs {a, c}: J = 1/3 -> 0.5 + 0.5/3.
        assert heuristic_score("a b", "a c") == pytest.approx(0.6667, abs=1e-4)

    def test_both_empty(self):
        assert heuristic_score("", "") == 1.0

    def test_one_empty(self):
        assert heuristic_score("", "words") == 0.5

    def test_range(self):
        for claim, context in [("a", "a b c d"), ("x y z", "z"), ("q", "q")]:
            assert 0.5 <= heuristic_score(claim, context) <= 1.0
