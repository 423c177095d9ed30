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
"""Python bindings for the cegi reader library."""

from cegi._cegi import (
    bleu,
    config_fingerprint,
    ingest_triples,
    load_dataset,
    margin_loss,
    novelty,
    predict,
    relations,
    route_votes,
    self_bleu,
    squash,
    synth,
    train_reader,
    verbalize,
)

__all__ = [
    "bleu",
    "config_fingerprint",
    "ingest_triples",
    "load_dataset",
    "margin_loss",
    "novelty",
    "predict",
    "relations",
    "route_votes",
    "self_bleu",
    "squash",
    "synth",
    "train_reader",
    "verbalize",
]
