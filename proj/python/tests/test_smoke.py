# Copyright 2026 The CEGI Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Smoke tests for the Python bindings."""

import math
import os
import pathlib

import pytest

import cegi

FIXTURES = pathlib.Path(
    os.environ.get(
        "CEGI_FIXTURE_DIR",
        pathlib.Path(__file__).resolve().parents[2] / "tests" / "fixtures",
    )
)


def test_squash_shrinks_norm():
    out = cegi.squash([3.0, 4.0])
    norm = math.hypot(*out)
    assert norm == pytest.approx(25.0 / 26.0)
    assert out[0] / out[1] == pytest.approx(0.75)


def test_routing_couplings_sum_to_one():
    votes = [[[0.1, 0.2], [0.3, -0.1], [0.0, 0.5]], [[0.2, 0.2], [-0.3, 0.1], [0.4, 0.0]]]
    capsules, couplings = cegi.route_votes(votes, iterations=3)
    assert len(capsules) == 2
    for i in range(3):
        assert couplings[2 * i] + couplings[2 * i + 1] == pytest.approx(1.0)
    for c in capsules:
        assert math.hypot(*c) < 1.0


def test_margin_loss_anchor():
    assert cegi.margin_loss([[0.95], [0.05]], 0) == pytest.approx(0.0)
    assert cegi.margin_loss([[0.0], [0.0]], 0) == pytest.approx(0.81)


def test_bleu_and_self_bleu():
    assert cegi.bleu("the cat sat", ["the cat sat"], max_order=2) == pytest.approx(1.0)
    assert cegi.bleu("a b", ["c d"], max_order=2) == 0.0
    value = cegi.self_bleu(["a b c", "a b d", "x y z"], max_order=2)
    assert 0.0 <= value <= 1.0


def test_verbalize_and_novelty():
    assert cegi.verbalize("trouble", "PartOf", "life") == "trouble is part of life"
    assert len(cegi.relations()) == 34
    triples, objects = cegi.novelty(
        [["bee", "CapableOf", "sting"], ["bee", "CapableOf", "fly"]],
        [["bee", "CapableOf", "sting"]],
    )
    assert triples == pytest.approx(0.5)
    assert objects == pytest.approx(0.5)


def test_ingest_fixture():
    report = cegi.ingest_triples(str(FIXTURES / "triples_50.tsv"))
    assert report["accepted"] == 50


def test_synth_is_deterministic():
    a_samples, a_evidence = cegi.synth(20, seed=3)
    b_samples, b_evidence = cegi.synth(20, seed=3)
    assert a_samples == b_samples
    assert a_evidence == b_evidence
    assert all(s["label"] in range(4) for s in a_samples)


def test_train_and_predict(tmp_path):
    samples = cegi.load_dataset(str(FIXTURES / "dataset_3.jsonl"))
    assert [s["label"] for s in samples] == [0, 1, 2]
    config = "\n".join(
        ["dim = 8", "layers = 1", "heads = 2", "max_length = 48",
         "capsule_dim = 4", "epochs = 2", "batch_size = 3", "evidence = none"]
    )
    ckpt = tmp_path / "reader.ckpt"
    losses = cegi.train_reader(str(FIXTURES / "dataset_3.jsonl"), "", config, str(ckpt))
    assert len(losses) == 2
    predictions = cegi.predict(str(ckpt), str(FIXTURES / "dataset_3.jsonl"))
    assert [p[0] for p in predictions] == ["fx-1", "fx-2", "fx-3"]
    assert all(len(p[2]) == 4 for p in predictions)
    assert cegi.config_fingerprint(config) == cegi.config_fingerprint(config)
