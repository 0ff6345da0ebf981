"""Scorer protocol failures must exit 3 and name the failing claim."""

import sys
from pathlib import Path

import pytest

from rerrfact.cli import main
from rerrfact.pipeline import run_pipeline
from rerrfact.remote import ScorerProtocolError
from rerrfact.synthetic import write_synthetic_dataset

STUB = Path(__file__).with_name("stub_scorer.py")


def test_predict_with_broken_scorer_exits_three(tmp_path, capsys):
    data = tmp_path / "data"
    write_synthetic_dataset(data)
    code = main(
        [
            "predict",
            "--paths.corpus", str(data / "corpus.jsonl"),
            "--paths.claims", str(data / "claims.jsonl"),
            "--paths.model_dir", str(tmp_path / "models"),
            "--paths.output_dir", str(tmp_path / "out"),
            "--scorers.abstract", f"stdio:{sys.executable} {STUB} badscore",
            "--scorers.rationale", "builtin:jaccard",
            "--scorers.stance_noinfo", "builtin:jaccard",
            "--scorers.stance_sr", "builtin:jaccard",
            "--workers", "1",
        ]
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "scorer protocol error" in err
    assert "claim" in err  # failing claim named


def test_pipeline_attaches_claim_context(dataset, index, strategy):
    corpus, claims = dataset

    class Broken:
        def score_pairs(self, pairs):
            raise ScorerProtocolError("endpoint fell over")

    from rerrfact.pipeline import StageScorers

    scorers = StageScorers(abstract=Broken(), rationale=Broken())
    with pytest.raises(ScorerProtocolError, match=r"claim 1: endpoint fell over"):
        run_pipeline(claims, corpus, index, scorers, strategy)
