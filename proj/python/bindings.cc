// Copyright 2026 The CEGI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "cegi/capsule/capsule_head.h"
#include "cegi/encoder/tokenizer.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/factual/novelty.h"
#include "cegi/numerics/ops.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/pipeline/evidence.h"
#include "cegi/pipeline/synth.h"
#include "cegi/pipeline/trainer.h"
#include "cegi/textual/text_metrics.h"

namespace py = pybind11;

namespace cegi {
namespace {

std::vector<Tensor> ToColumns(const std::vector<std::vector<double>>& vectors) {
  std::vector<Tensor> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(Tensor::Column(v));
  return out;
}

std::vector<double> ValuesOf(const Tensor& t) {
  const auto v = t.values();
  return {v.begin(), v.end()};
}

BleuSmoothing ParseSmoothing(const std::string& name) {
  if (name == "none") return BleuSmoothing::kNone;
  if (name == "add-one") return BleuSmoothing::kAddOne;
  throw std::invalid_argument("smoothing must be 'none' or 'add-one'");
}

Triple ToTriple(const std::vector<std::string>& row) {
  if (row.size() != 3) throw std::invalid_argument("a triple has three fields");
  return {SplitWords(row[0]), row[1], SplitWords(row[2])};
}

py::dict SampleToDict(const Sample& sample) {
  py::dict d;
  d["id"] = sample.id;
  d["paragraph"] = sample.paragraph;
  d["question"] = sample.question;
  d["options"] = sample.options;
  if (sample.label) {
    d["label"] = *sample.label;
  } else {
    d["label"] = py::none();
  }
  return d;
}

}  // namespace
}  // namespace cegi

PYBIND11_MODULE(_cegi, m) {
  using namespace cegi;
  m.doc() = "Evidence-injected multiple-choice reader with capsule answer head";

  m.def("squash", [](const std::vector<double>& s) {
    return ValuesOf(Squash(Tensor::Column(s)));
  }, py::arg("vector"));

  m.def("route_votes",
        [](const std::vector<std::vector<std::vector<double>>>& votes, int iterations) {
          // votes[j][i] is the prediction vector of input i for output j.
          std::vector<Tensor> matrices;
          for (const auto& per_output : votes) {
            if (per_output.empty()) throw std::invalid_argument("no inputs");
            const int64_t dim = static_cast<int64_t>(per_output[0].size());
            const int64_t inputs = static_cast<int64_t>(per_output.size());
            std::vector<double> values(dim * inputs);
            for (int64_t i = 0; i < inputs; ++i) {
              if (static_cast<int64_t>(per_output[i].size()) != dim) {
                throw std::invalid_argument("ragged votes");
              }
              for (int64_t r = 0; r < dim; ++r) values[r * inputs + i] = per_output[i][r];
            }
            matrices.push_back(Tensor::FromVector({dim, inputs}, std::move(values)));
          }
          NoGradGuard guard;
          RoutingResult result = RouteVotes(matrices, iterations);
          std::vector<std::vector<double>> capsules;
          for (const Tensor& c : result.capsules) capsules.push_back(ValuesOf(c));
          return py::make_tuple(capsules, result.couplings.back());
        },
        py::arg("votes"), py::arg("iterations") = 3,
        "Routes votes[j][i] to output capsules; returns (capsules, final couplings).");

  m.def("margin_loss",
        [](const std::vector<std::vector<double>>& capsules, int64_t label,
           double m_plus, double m_minus, double lambda) {
          NoGradGuard guard;
          return MarginLoss(ToColumns(capsules), label,
                            MarginLossParams{m_plus, m_minus, lambda}).item();
        },
        py::arg("capsules"), py::arg("label"), py::arg("m_plus") = 0.9,
        py::arg("m_minus") = 0.1, py::arg("lam") = 0.5);

  m.def("bleu",
        [](const std::string& candidate, const std::vector<std::string>& references,
           int max_order, const std::string& smoothing) {
          std::vector<TokenSequence> refs;
          for (const auto& r : references) refs.push_back(SplitWords(r));
          return Bleu(SplitWords(candidate), refs, max_order, ParseSmoothing(smoothing));
        },
        py::arg("candidate"), py::arg("references"), py::arg("max_order") = 4,
        py::arg("smoothing") = "add-one");

  m.def("self_bleu",
        [](const std::vector<std::string>& corpus, int max_order,
           const std::string& smoothing) {
          std::vector<TokenSequence> seqs;
          for (const auto& s : corpus) seqs.push_back(SplitWords(s));
          return SelfBleu(seqs, max_order, ParseSmoothing(smoothing));
        },
        py::arg("corpus"), py::arg("max_order") = 4, py::arg("smoothing") = "add-one");

  m.def("verbalize",
        [](const std::string& subject, const std::string& relation,
           const std::string& object) {
          return Verbalize(ToTriple({subject, relation, object}),
                           RelationTemplates::Bundled());
        },
        py::arg("subject"), py::arg("relation"), py::arg("object"));

  m.def("relations", [] { return RelationTemplates::Bundled().Labels(); });

  m.def("novelty",
        [](const std::vector<std::vector<std::string>>& generated,
           const std::vector<std::vector<std::string>>& training) {
          KnowledgeStore store;
          for (const auto& row : training) store.Insert(ToTriple(row));
          std::vector<Triple> triples;
          for (const auto& row : generated) triples.push_back(ToTriple(row));
          const NoveltyMetrics metrics = ComputeNovelty(triples, store);
          return py::make_tuple(metrics.novel_triples, metrics.novel_objects);
        },
        py::arg("generated"), py::arg("training"),
        "Returns (novel triple fraction, novel object fraction).");

  m.def("ingest_triples", [](const std::string& path) {
    KnowledgeStore store;
    const IngestReport report = store.IngestFile(path);
    py::dict d;
    d["rows"] = report.rows;
    d["accepted"] = report.accepted;
    d["duplicates"] = report.duplicates;
    d["skipped"] = report.skipped;
    d["diagnostics"] = report.diagnostics;
    return d;
  }, py::arg("path"));

  m.def("synth",
        [](int64_t n, uint64_t seed, bool similar, bool evidence_required) {
          SynthSpec spec;
          spec.samples = n;
          spec.similar_distractors = similar;
          spec.dependency = evidence_required ? EvidenceDependency::kRequired
                                              : EvidenceDependency::kNone;
          const SynthData data = SynthTask(spec, seed);
          py::list samples;
          for (const auto& s : data.samples) samples.append(SampleToDict(s));
          py::list evidence;
          for (const auto& e : data.gold_evidence) {
            evidence.append(py::make_tuple(e.sample_id, e.text));
          }
          return py::make_tuple(samples, evidence);
        },
        py::arg("n"), py::arg("seed") = 1, py::arg("similar") = false,
        py::arg("evidence_required") = true);

  m.def("load_dataset", [](const std::string& path) {
    py::list out;
    for (const auto& s : LoadDataset(path)) out.append(SampleToDict(s));
    return out;
  }, py::arg("path"));

  m.def("config_fingerprint", [](const std::string& text) {
    return PipelineConfig::Parse(text).Fingerprint();
  }, py::arg("config_text"));

  m.def("train_reader",
        [](const std::string& data, const std::string& evidence,
           const std::string& config_text, const std::string& out) {
          PipelineConfig config = PipelineConfig::Parse(config_text);
          std::vector<Sample> samples = LoadDataset(data);
          if (!evidence.empty()) {
            AttachEvidence(samples, LoadEvidence(evidence), config.evidence,
                           config.max_factual_sentences);
          }
          config.options = OptionCount(samples);
          Reader reader =
              CreateReader(config, BuildReaderVocabulary(samples, config.vocab_cap));
          const TrainResult result = TrainReader(reader, samples, {});
          SaveReader(reader, out);
          return result.epoch_losses;
        },
        py::arg("data"), py::arg("evidence"), py::arg("config_text"), py::arg("out"),
        "Trains a reader and writes a checkpoint; returns per-epoch losses.");

  m.def("predict",
        [](const std::string& checkpoint, const std::string& data,
           const std::string& evidence) {
          Reader reader = LoadReader(checkpoint);
          std::vector<Sample> samples = LoadDataset(data);
          if (!evidence.empty()) {
            AttachEvidence(samples, LoadEvidence(evidence), reader.config.evidence,
                           reader.config.max_factual_sentences);
          }
          py::list out;
          for (const auto& p : PredictSamples(reader, samples)) {
            out.append(py::make_tuple(p.id, p.predicted, p.scores));
          }
          return out;
        },
        py::arg("checkpoint"), py::arg("data"), py::arg("evidence") = "",
        "Returns (id, predicted option, scores) per sample.");
}
