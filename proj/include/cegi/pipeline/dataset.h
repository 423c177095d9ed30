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

#ifndef CEGI_PIPELINE_DATASET_H_
#define CEGI_PIPELINE_DATASET_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cegi {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EvidenceSource { kTextual, kFactual };

const char* EvidenceSourceName(EvidenceSource source);
EvidenceSource ParseEvidenceSource(const std::string& name);

// One generated evidence text for one sample.
struct EvidenceRecord {
  std::string sample_id;
  EvidenceSource source = EvidenceSource::kTextual;
  std::string text;
  bool operator==(const EvidenceRecord&) const = default;
};

// One multiple-choice item.
struct Sample {
  std::string id;
  std::string paragraph;
  std::string question;
  std::vector<std::string> options;
  std::optional<int64_t> label;
  std::vector<EvidenceRecord> evidence;

  int64_t num_options() const { return static_cast<int64_t>(options.size()); }
  // One-hot label; throws when unlabeled.
  std::vector<double> LabelVector() const;
  // Non-empty evidence texts in attachment order, separated by " [SEP] ".
  std::string EvidenceText() const;
  // Throws DatasetError on broken invariants.
  void Validate(bool require_label) const;
};

// JSON lines with fields id, context, question, answer0..answerN and an
// optional label (integer or digit string). Errors carry line numbers.
std::vector<Sample> LoadDataset(const std::string& path);
std::vector<Sample> ParseDataset(const std::string& text);
// Writes records readable by LoadDataset (evidence is not written).
void SaveDataset(const std::string& path, const std::vector<Sample>& samples);
std::string SerializeSample(const Sample& sample);

bool AllLabeled(const std::vector<Sample>& samples);

}  // namespace cegi

#endif  // CEGI_PIPELINE_DATASET_H_
