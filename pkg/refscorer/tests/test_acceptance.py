"""Acceptance: protocol conformance fuzz plus pipeline equivalence.

The equivalence check drives the main pipeline's CLI twice: once with every
stage scored by this package over the wire, once with the pipeline's
in-process twin of the same heuristic. The two prediction files must be
byte-identical.
"""

import json
import os
import random
import subprocess
import sys
import time
from pathlib import Path

import pytest


def report(elapsed, budget, detail):
    print(f"\nacceptance 9: PASS ({elapsed:.2f}s < {budget:.0f}s) {detail}")


def random_text(rng):
    words = ["alpha", "beta", "Gamma", "delta-9", "épsilon", "zeta_z", "", "42"]
    return " ".join(rng.choices(words, k=rng.randint(0, 6)))


def test_criterion_9_protocol_conformance_and_pipeline_equivalence(tmp_path):
    start = time.monotonic()
    rng = random.Random(99)

    # 1000-request fuzz over one stdio session: schema valid, ids bijective,
    # scores in range.
    ids = rng.sample(range(1_000_000), 1000)
    requests = [
        json.dumps({"id": i, "claim": random_text(rng), "context": random_text(rng)})
        for i in ids
    ]
    payload = "\n".join(
        [json.dumps({"protocol": "rerrfact-scorer/1", "task": "abstract"}), *requests]
    ) + "\n"
    result = subprocess.run(
        [sys.executable, "-m", "refscorer", "stdio"],
        input=payload,
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert result.returncode == 0
    lines = result.stdout.splitlines()
    assert len(lines) == 1001
    ack = json.loads(lines[0])
    assert ack["ok"] is True and ack["max_inflight"] >= 1
    seen = []
    for line in lines[1:]:
        response = json.loads(line)
        assert set(response) == {"id", "score"}
        assert isinstance(response["id"], int)
        assert 0.0 <= response["score"] <= 1.0
        seen.append(response["id"])
    assert sorted(seen) == sorted(ids)  # bijective: every id exactly once

    # Pipeline equivalence through the primary CLI.
    data_dir = tmp_path / "data"
    subprocess.run(
        [sys.executable, "-m", "rerrfact", "make-dataset", str(data_dir)],
        check=True,
        capture_output=True,
    )

    def predict(tag, endpoints):
        out_dir = tmp_path / f"out_{tag}"
        env = dict(os.environ)
        for stage in ("abstract", "rationale", "stance_noinfo", "stance_sr"):
            env[f"RERRFACT_SCORER_{stage.upper()}"] = endpoints
        subprocess.run(
            [
                sys.executable, "-m", "rerrfact", "predict",
                "--paths.corpus", str(data_dir / "corpus.jsonl"),
                "--paths.claims", str(data_dir / "claims.jsonl"),
                "--paths.model_dir", str(tmp_path / "models"),
                "--paths.output_dir", str(out_dir),
                "--thresholds.abstract", "0.62",
                "--thresholds.rationale", "0.62",
                "--thresholds.stance_noinfo", "0.55",
                "--workers", "1",
            ],
            check=True,
            capture_output=True,
            env=env,
            timeout=120,
        )
        return (out_dir / "predictions.jsonl").read_bytes()

    wire = predict("wire", f"stdio:{sys.executable} -m refscorer stdio")
    inprocess = predict("inprocess", "builtin:jaccard")
    assert wire == inprocess
    assert wire  # the thresholds above keep some evidence

    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    report(elapsed, 60, "1000-request fuzz conformant; wire and in-process runs byte-identical")
