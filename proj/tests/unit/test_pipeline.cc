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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cegi/encoder/vocabulary.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/pipeline/evidence.h"
#include "cegi/pipeline/reader.h"
#include "cegi/pipeline/synth.h"
#include "cegi/pipeline/trainer.h"
#include "doctest.h"

namespace cegi {
namespace {

namespace fs = std::filesystem;

std::string Fixture(const std::string& name) {
  return std::string(CEGI_FIXTURE_DIR) + "/" + name;
}

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path TempPath(const std::string& name) {
  return fs::temp_directory_path() / ("cegi_test_pipeline_" + name);
}

PipelineConfig TinyConfig() {
  PipelineConfig config;
  config.encoder.dim = 8;
  config.encoder.layers = 1;
  config.encoder.heads = 2;
  config.encoder.max_length = 48;
  config.routing.capsule_dim = 4;
  config.batch_size = 5;
  config.learning_rate = 3e-3;
  config.epochs = 3;
  config.patience = 3;
  config.evidence = EvidenceSources::kTextual;
  config.seed = 5;
  return config;
}

std::vector<Sample> SynthWithEvidence(int64_t n, uint64_t seed) {
  SynthSpec spec;
  spec.samples = n;
  spec.vocab_size = 40;
  spec.paragraph_length = 6;
  SynthData data = SynthTask(spec, seed);
  AttachEvidence(data.samples, data.gold_evidence, EvidenceSources::kTextual, 3);
  return data.samples;
}

TEST_CASE("dataset fixture loads with labels") {
  const auto samples = LoadDataset(Fixture("dataset_3.jsonl"));
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].id == "fx-1");
  CHECK(samples[1].label == std::optional<int64_t>(1));
  CHECK(samples[2].num_options() == 4);
  CHECK(samples[0].LabelVector() == std::vector<double>{1, 0, 0, 0});
  CHECK(samples[2].LabelVector() == std::vector<double>{0, 0, 1, 0});
  CHECK(AllLabeled(samples));
  // Serialization round-trips.
  std::string text;
  for (const auto& s : samples) text += SerializeSample(s) + "\n";
  const auto again = ParseDataset(text);
  REQUIRE(again.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(again[i].id == samples[i].id);
    CHECK(again[i].options == samples[i].options);
    CHECK(again[i].label == samples[i].label);
  }
}

TEST_CASE("malformed records name their line") {
  const std::string good =
      R"({"id": "a", "context": "p", "question": "q", "answer0": "x", "answer1": "y", "label": 1})";
  const std::string missing =
      R"({"id": "b", "context": "p", "question": "q", "answer0": "x", "label": 0})";
  try {
    ParseDataset(good + "\n" + missing + "\n");
    FAIL("expected a dataset error");
  } catch (const DatasetError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("answer1") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseDataset(good + "\n" + good + "\n"), DatasetError);
  CHECK_THROWS_AS(ParseDataset("{not json\n"), DatasetError);
  const std::string out_of_range =
      R"({"id": "c", "context": "p", "question": "q", "answer0": "x", "answer1": "y", "label": 2})";
  CHECK_THROWS_AS(ParseDataset(out_of_range), DatasetError);
  const std::string unlabeled =
      R"({"id": "d", "context": "p", "question": "q", "answer0": "x", "answer1": "y"})";
  const auto samples = ParseDataset(unlabeled);
  REQUIRE(samples.size() == 1);
  CHECK_FALSE(samples[0].label.has_value());
  CHECK_FALSE(AllLabeled(samples));
  CHECK_THROWS_AS(samples[0].Validate(true), DatasetError);
}

TEST_CASE("evidence attachment") {
  auto samples = LoadDataset(Fixture("dataset_3.jsonl"));
  std::vector<EvidenceRecord> records = {
      {"fx-1", EvidenceSource::kFactual, "bee is capable of sting"},
      {"fx-1", EvidenceSource::kTextual, "he was stung ."},
      {"fx-1", EvidenceSource::kFactual, "bee is a insect"},
      {"fx-1", EvidenceSource::kFactual, "bee at location hive"},
      {"fx-1", EvidenceSource::kFactual, "garden has property green"},
      {"fx-3", EvidenceSource::kFactual, "trouble is part of life"},
  };
  AttachEvidence(samples, records, EvidenceSources::kNone, 3);
  for (const auto& s : samples) CHECK(s.evidence.empty());

  AttachEvidence(samples, records, EvidenceSources::kBoth, 3);
  REQUIRE(samples[0].evidence.size() == 4);
  CHECK(samples[0].evidence[0].source == EvidenceSource::kTextual);
  CHECK(samples[0].evidence[1].text == "bee is capable of sting");
  CHECK(samples[0].evidence[3].text == "bee at location hive");
  CHECK(samples[1].evidence.empty());
  CHECK(samples[2].evidence.size() == 1);
  const auto once = samples;
  AttachEvidence(samples, records, EvidenceSources::kBoth, 3);
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].evidence == once[i].evidence);
  }
  CHECK(samples[0].EvidenceText() ==
        "he was stung . [SEP] bee is capable of sting [SEP] bee is a insect "
        "[SEP] bee at location hive");
  Vocabulary vocab = BuildReaderVocabulary(samples, 1000);
  const TokenizedSample tokens = TokenizeSample(samples[0], vocab, 256);
  CHECK(std::count(tokens.evidence.begin(), tokens.evidence.end(), kSepId) == 3);
  AttachEvidence(samples, records, EvidenceSources::kTextual, 3);
  CHECK(samples[0].evidence.size() == 1);
  CHECK(samples[0].EvidenceText() == "he was stung .");
  AttachEvidence(samples, records, EvidenceSources::kFactual, 2);
  CHECK(samples[0].evidence.size() == 2);

  // Evidence files round-trip.
  const fs::path path = TempPath("evidence.jsonl");
  SaveEvidence(path.string(), records);
  CHECK(LoadEvidence(path.string()) == records);
  fs::remove(path);
}

TEST_CASE("no evidence leaves an empty evidence block") {
  auto samples = LoadDataset(Fixture("dataset_3.jsonl"));
  PipelineConfig config = TinyConfig();
  config.evidence = EvidenceSources::kNone;
  Reader reader = CreateReader(config, BuildReaderVocabulary(samples, 1000));
  const TokenizedSample tokens =
      TokenizeSample(samples[0], reader.vocab, config.encoder.max_length);
  CHECK(tokens.evidence.empty());
  CHECK(ComputeBatchWidths(tokens).evidence == 0);
  const ReaderOutput out = reader.model->Forward(tokens);
  CHECK(out.scores.size() == 4);
  CHECK(out.loss.defined());
}

TEST_CASE("config parse, serialize and fingerprint") {
  PipelineConfig config = PipelineConfig::Parse(
      "# comment\n"
      "dim = 32\n"
      "head = maxpool\n"
      "evidence = factual\n"
      "learning_rate = 0.002\n"
      "filter_mode = count\n"
      "seed = 9\n");
  CHECK(config.encoder.dim == 32);
  CHECK(config.head == HeadKind::kMaxPool);
  CHECK(config.evidence == EvidenceSources::kFactual);
  CHECK(config.learning_rate == doctest::Approx(0.002));
  CHECK(config.filter.mode == FrequencyRule::kCount);
  CHECK(config.seed == 9);
  const PipelineConfig again = PipelineConfig::Parse(config.Serialize());
  CHECK(again.Serialize() == config.Serialize());
  CHECK(again.Fingerprint() == config.Fingerprint());
  PipelineConfig other = config;
  other.seed = 10;
  CHECK(other.Fingerprint() != config.Fingerprint());
  CHECK_THROWS_AS(PipelineConfig::Parse("no_such_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::Parse("head = transformer\n"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::Parse("epochs = 0\n").Validate(), ConfigError);
  CHECK(Fnv1aHex("") == "cbf29ce484222325");
}

TEST_CASE("training decreases the loss and is seed-deterministic") {
  const auto samples = SynthWithEvidence(20, 3);
  PipelineConfig config = TinyConfig();
  config.epochs = 6;
  const fs::path a = TempPath("a.ckpt");
  const fs::path b = TempPath("b.ckpt");
  std::vector<double> losses;
  for (const fs::path& path : {a, b}) {
    Reader reader = CreateReader(config, BuildReaderVocabulary(samples, 1000));
    TrainResult result = TrainReader(reader, samples, {});
    losses = result.epoch_losses;
    SaveReader(reader, path.string());
  }
  REQUIRE(losses.size() == 6);
  CHECK(losses.back() < losses.front());
  CHECK(ReadBytes(a) == ReadBytes(b));
  Reader loaded = LoadReader(a.string());
  CHECK(loaded.config.Fingerprint() == config.Fingerprint());
  fs::remove(a);
  fs::remove(b);
}

TEST_CASE("zero learning rate leaves parameters unchanged") {
  const auto samples = SynthWithEvidence(10, 4);
  PipelineConfig config = TinyConfig();
  config.learning_rate = 0.0;
  config.epochs = 1;
  Reader reader = CreateReader(config, BuildReaderVocabulary(samples, 1000));
  std::vector<std::vector<double>> before;
  for (const auto& entry : reader.params->entries()) {
    const auto v = entry.tensor.values();
    before.emplace_back(v.begin(), v.end());
  }
  TrainReader(reader, samples, {});
  for (size_t i = 0; i < before.size(); ++i) {
    const auto v = reader.params->entries()[i].tensor.values();
    CHECK(std::vector<double>(v.begin(), v.end()) == before[i]);
  }
}

TEST_CASE("report accuracy matches a recount") {
  auto samples = SynthWithEvidence(8, 5);
  std::vector<Prediction> predictions;
  for (size_t i = 0; i < samples.size(); ++i) {
    Prediction p;
    p.id = samples[i].id;
    p.predicted = i < 6 ? *samples[i].label : (*samples[i].label + 1) % 4;
    p.scores.assign(4, 0.0);
    predictions.push_back(p);
  }
  const EvalReport report = BuildReport(predictions, samples, 4);
  CHECK(report.total == 8);
  CHECK(report.correct == 6);
  CHECK(report.accuracy == 0.75);
  int64_t diagonal = 0;
  int64_t total = 0;
  for (size_t g = 0; g < 4; ++g) {
    for (size_t p = 0; p < 4; ++p) {
      total += report.confusion[g][p];
      if (g == p) diagonal += report.confusion[g][p];
    }
  }
  CHECK(total == 8);
  CHECK(diagonal == 6);
  CHECK(report.Serialize().find("accuracy: 0.750000") != std::string::npos);

  // Property: accuracy from Evaluate equals a recount of PredictSamples.
  PipelineConfig config = TinyConfig();
  Reader reader = CreateReader(config, BuildReaderVocabulary(samples, 1000));
  const auto predicted = PredictSamples(reader, samples);
  int64_t correct = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& scores = predicted[i].scores;
    CHECK(predicted[i].predicted ==
          std::max_element(scores.begin(), scores.end()) - scores.begin());
    if (predicted[i].predicted == *samples[i].label) ++correct;
  }
  CHECK(Evaluate(reader, samples).accuracy == static_cast<double>(correct) / 8.0);
}

TEST_CASE("synthetic task determinism and label balance") {
  SynthSpec spec;
  spec.samples = 400;
  const SynthData a = SynthTask(spec, 7);
  const SynthData b = SynthTask(spec, 7);
  const SynthData c = SynthTask(spec, 8);
  REQUIRE(a.samples.size() == 400);
  std::string sa, sb, sc;
  for (const auto& s : a.samples) sa += SerializeSample(s);
  for (const auto& s : b.samples) sb += SerializeSample(s);
  for (const auto& s : c.samples) sc += SerializeSample(s);
  CHECK(sa == sb);
  CHECK(sa != sc);
  CHECK(a.gold_evidence == b.gold_evidence);
  std::map<int64_t, int64_t> counts;
  for (const auto& s : a.samples) ++counts[*s.label];
  REQUIRE(counts.size() == 4);
  for (const auto& [label, count] : counts) {
    CHECK(count >= 70);
    CHECK(count <= 130);
  }
  spec.similar_distractors = true;
  const SynthData similar = SynthTask(spec, 7);
  for (const auto& s : similar.samples) s.Validate(true);
  spec.options = 1;
  CHECK_THROWS(spec.Validate());
}

}  // namespace
}  // namespace cegi
