import json
import subprocess
import sys

import pytest

from rerrfact.cli import main
from rerrfact.corpus import load_claims, load_corpus
from rerrfact.evaluation import load_metrics
from rerrfact.pipeline import load_predictions
from rerrfact.synthetic import write_synthetic_dataset


@pytest.fixture()
def workspace(tmp_path):
    data = tmp_path / "data"
    corpus, claims = write_synthetic_dataset(data)
    return {
        "corpus": str(corpus),
        "claims": str(claims),
        "models": str(tmp_path / "models"),
        "out": str(tmp_path / "out"),
        "root": tmp_path,
    }


def run(workspace, *argv):
    base = [
        "--paths.corpus", workspace["corpus"],
        "--paths.claims", workspace["claims"],
        "--paths.model_dir", workspace["models"],
        "--paths.output_dir", workspace["out"],
    ]
    return main([*argv, *base])


def train_all(workspace):
    assert run(workspace, "train", "--stage", "abstract") == 0
    assert run(workspace, "train", "--stage", "rationale") == 0
    assert run(workspace, "train", "--stage", "stance") == 0


class TestValidate:
    def test_clean_dataset_counts(self, workspace, capsys):
        assert run(workspace, "validate") == 0
        out = capsys.readouterr().out
        assert "20 docs, 10 claims, 8 evidence pairs" in out

    def test_out_of_range_rationale_names_claim(self, workspace, tmp_path, capsys):
        bad = tmp_path / "bad_claims.jsonl"
        bad.write_text(
            json.dumps(
                {
                    "id": 77,
                    "claim": "broken",
                    "evidence": {"201": [{"sentences": [40], "label": "SUPPORT"}]},
                }
            )
            + "\n"
        )
        workspace["claims"] = str(bad)
        assert run(workspace, "validate") == 1
        assert "77" in capsys.readouterr().err

    def test_missing_corpus_is_usage_error(self, workspace):
        workspace["corpus"] = str(workspace["root"] / "nope.jsonl")
        assert run(workspace, "validate") == 2

    def test_unknown_flag_is_usage_error(self, workspace):
        assert main(["validate", "--no.such.flag", "1"]) == 2


class TestTrain:
    def test_abstract_model_deterministic_across_runs(self, workspace, tmp_path):
        assert run(workspace, "train", "--stage", "abstract") == 0
        first = (workspace["root"] / "models" / "abstract.model.json").read_bytes()
        other_models = tmp_path / "models2"
        workspace["models"] = str(other_models)
        assert run(workspace, "train", "--stage", "abstract") == 0
        assert (other_models / "abstract.model.json").read_bytes() == first

    def test_rationale_loose_coupling_requires_abstract_model(self, workspace, capsys):
        assert run(workspace, "train", "--stage", "rationale") == 2
        assert "abstract" in capsys.readouterr().err

    def test_stance_writes_two_model_files(self, workspace):
        train_all(workspace)
        models = workspace["root"] / "models"
        assert (models / "stance_noinfo.model.json").exists()
        assert (models / "stance_sr.model.json").exists()

    def test_oracle_mode_needs_no_abstract_model(self, workspace):
        assert run(workspace, "train", "--stage", "rationale", "--mode", "oracle") == 0

    def test_multiclass_stance_mode_trains_and_predicts(self, workspace):
        assert run(workspace, "train", "--stage", "abstract") == 0
        assert run(workspace, "train", "--stage", "rationale") == 0
        assert run(workspace, "train", "--stage", "stance", "--stance.mode", "multiclass") == 0
        assert (workspace["root"] / "models" / "stance_multiclass.model.json").exists()
        assert run(workspace, "predict", "--stance.mode", "multiclass") == 0
        predictions = load_predictions(workspace["root"] / "out" / "predictions.jsonl")
        assert any(p.evidence for p in predictions)


class TestPredictAndEvaluate:
    def test_perfect_fixture_round_trip(self, workspace, capsys):
        train_all(workspace)
        assert run(workspace, "predict") == 0
        predictions_path = workspace["root"] / "out" / "predictions.jsonl"
        corpus = load_corpus(workspace["corpus"])
        claims = load_claims(workspace["claims"], corpus)
        predictions = {p.claim_id: p for p in load_predictions(predictions_path)}
        for claim in claims:
            predicted = predictions[claim.id]
            assert set(predicted.evidence.keys()) == set(claim.evidence_doc_ids)
            for evidence in claim.evidence:
                got = predicted.evidence[evidence.doc_id]
                assert got.label is evidence.label
                assert tuple(sorted(got.sentence_indices)) == evidence.sentence_union

        assert run(workspace, "evaluate", "--predictions", str(predictions_path)) == 0
        out = capsys.readouterr().out
        assert "100.00" in out
        metrics = load_metrics(workspace["root"] / "out" / "metrics.json")
        assert metrics.sentence_selection_label.f1 == 1.0

    def test_emit_intermediate_writes_stage_dumps(self, workspace):
        train_all(workspace)
        assert run(workspace, "predict", "--emit-intermediate") == 0
        out = workspace["root"] / "out"
        assert (out / "retrieved.jsonl").exists()
        assert (out / "rationales.jsonl").exists()

    def test_empty_claims_file_gives_empty_predictions(self, workspace, tmp_path):
        train_all(workspace)
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        workspace["claims"] = str(empty)
        assert run(workspace, "predict") == 0
        assert (workspace["root"] / "out" / "predictions.jsonl").read_text() == ""

    def test_missing_predictions_file_usage_error(self, workspace):
        assert run(workspace, "evaluate", "--predictions", "missing.jsonl") == 2

    def test_hybrid_local_and_remote_scorers(self, workspace, monkeypatch):
        # Local abstract + rationale models, stance stages via scorer endpoints.
        assert run(workspace, "train", "--stage", "abstract") == 0
        assert run(workspace, "train", "--stage", "rationale") == 0
        monkeypatch.setenv("RERRFACT_SCORER_STANCE_NOINFO", "builtin:jaccard")
        monkeypatch.setenv("RERRFACT_SCORER_STANCE_SR", "builtin:jaccard")
        assert run(workspace, "predict") == 0
        predictions = load_predictions(workspace["root"] / "out" / "predictions.jsonl")
        assert any(p.evidence for p in predictions)

    def test_gold_as_predictions_scores_hundred(self, workspace, tmp_path, capsys):
        corpus = load_corpus(workspace["corpus"])
        claims = load_claims(workspace["claims"], corpus)
        lines = []
        for claim in claims:
            evidence = {
                str(ev.doc_id): {
                    "label": "SUPPORT" if ev.label.value == "SUPPORTS" else "CONTRADICT",
                    "sentences": list(ev.sentence_union),
                }
                for ev in claim.evidence
            }
            lines.append(json.dumps({"id": claim.id, "evidence": evidence}))
        path = tmp_path / "gold_predictions.jsonl"
        path.write_text("\n".join(lines) + "\n")
        assert run(workspace, "evaluate", "--predictions", str(path)) == 0
        table = capsys.readouterr().out
        assert table.count("100.00") == 12


class TestReportCommand:
    def test_combined_table(self, workspace, tmp_path, capsys):
        train_all(workspace)
        assert run(workspace, "predict") == 0
        predictions = workspace["root"] / "out" / "predictions.jsonl"
        assert run(workspace, "evaluate", "--predictions", str(predictions)) == 0
        metrics = workspace["root"] / "out" / "metrics.json"
        capsys.readouterr()
        assert main(["report", f"alpha={metrics}", f"beta={metrics}"]) == 0
        out = capsys.readouterr().out
        assert "alpha" in out and "beta" in out

    def test_bad_entry_format(self):
        assert main(["report", "justapath.json"]) == 2


class TestConfigFile:
    def test_config_file_with_dotted_override(self, workspace, tmp_path, capsys):
        config = {
            "paths": {
                "corpus": workspace["corpus"],
                "claims": workspace["claims"],
                "model_dir": workspace["models"],
                "output_dir": workspace["out"],
            },
            "retrieval": {"k": 5},
        }
        path = tmp_path / "config.json"
        path.write_text(json.dumps(config))
        assert main(["validate", "--config", str(path)]) == 0
        assert main(["validate", "--config", str(path), "--retrieval.k", "7"]) == 0

    def test_unknown_config_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"retrieval": {"q": 1}}')
        assert main(["validate", "--config", str(path)]) == 2


class TestSubprocessEntry:
    def test_module_invocation(self, workspace):
        result = subprocess.run(
            [
                sys.executable, "-m", "rerrfact", "validate",
                "--paths.corpus", workspace["corpus"],
                "--paths.claims", workspace["claims"],
            ],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0
        assert "20 docs" in result.stdout

    def test_usage_error_exit_code(self):
        result = subprocess.run(
            [sys.executable, "-m", "rerrfact", "no-such-command"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 2
