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

#include "cegi/pipeline/dataset.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cegi {
namespace {

using nlohmann::json;

std::string LinePrefix(int64_t line) {
  std::ostringstream out;
  out << "line " << line << ": ";
  return out.str();
}

std::string RequireString(const json& record, const std::string& field,
                          int64_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw DatasetError(LinePrefix(line) + "missing field '" + field + "'");
  }
  if (!it->is_string()) {
    throw DatasetError(LinePrefix(line) + "field '" + field +
                       "' is not a string");
  }
  return it->get<std::string>();
}

std::optional<int64_t> ParseLabel(const json& record, int64_t line) {
  auto it = record.find("label");
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<int64_t>();
  if (it->is_string()) {
    const std::string text = it->get<std::string>();
    if (text.empty()) return std::nullopt;
    try {
      size_t used = 0;
      int64_t value = std::stoll(text, &used);
      if (used == text.size()) return value;
    } catch (const std::exception&) {
    }
  }
  throw DatasetError(LinePrefix(line) + "label is not an integer");
}

}  // namespace

const char* EvidenceSourceName(EvidenceSource source) {
  return source == EvidenceSource::kTextual ? "textual" : "factual";
}

EvidenceSource ParseEvidenceSource(const std::string& name) {
  if (name == "textual") return EvidenceSource::kTextual;
  if (name == "factual") return EvidenceSource::kFactual;
  throw DatasetError("unknown evidence source '" + name + "'");
}

std::vector<double> Sample::LabelVector() const {
  if (!label) throw DatasetError("sample " + id + " has no label");
  std::vector<double> y(options.size(), 0.0);
  y[*label] = 1.0;
  return y;
}

std::string Sample::EvidenceText() const {
  std::string out;
  for (const auto& record : evidence) {
    if (record.text.empty()) continue;
    if (!out.empty()) out += " [SEP] ";
    out += record.text;
  }
  return out;
}

void Sample::Validate(bool require_label) const {
  if (id.empty()) throw DatasetError("sample with empty id");
  if (options.size() < 2) {
    throw DatasetError("sample " + id + " has fewer than two options");
  }
  if (paragraph.empty() || question.empty()) {
    throw DatasetError("sample " + id + " has empty paragraph or question");
  }
  for (const auto& option : options) {
    if (option.empty()) throw DatasetError("sample " + id + " has an empty option");
  }
  if (label && (*label < 0 || *label >= num_options())) {
    throw DatasetError("sample " + id + " label out of range");
  }
  if (require_label && !label) throw DatasetError("sample " + id + " is unlabeled");
}

std::vector<Sample> ParseDataset(const std::string& text) {
  std::vector<Sample> samples;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DatasetError(LinePrefix(line_number) + "malformed record: " + e.what());
    }
    if (!record.is_object()) {
      throw DatasetError(LinePrefix(line_number) + "record is not an object");
    }
    Sample sample;
    sample.id = RequireString(record, "id", line_number);
    sample.paragraph = RequireString(record, "context", line_number);
    sample.question = RequireString(record, "question", line_number);
    for (int64_t i = 0;; ++i) {
      const std::string field = "answer" + std::to_string(i);
      if (!record.contains(field)) break;
      sample.options.push_back(RequireString(record, field, line_number));
    }
    if (sample.options.size() < 2) {
      throw DatasetError(LinePrefix(line_number) +
                         "missing field 'answer" +
                         std::to_string(sample.options.size()) + "'");
    }
    sample.label = ParseLabel(record, line_number);
    try {
      sample.Validate(false);
    } catch (const DatasetError& e) {
      throw DatasetError(LinePrefix(line_number) + e.what());
    }
    if (!ids.insert(sample.id).second) {
      throw DatasetError(LinePrefix(line_number) + "duplicate id '" +
                         sample.id + "'");
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::vector<Sample> LoadDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseDataset(text.str());
}

std::string SerializeSample(const Sample& sample) {
  nlohmann::ordered_json record = nlohmann::ordered_json::object();
  record["id"] = sample.id;
  record["context"] = sample.paragraph;
  record["question"] = sample.question;
  for (size_t i = 0; i < sample.options.size(); ++i) {
    record["answer" + std::to_string(i)] = sample.options[i];
  }
  if (sample.label) record["label"] = *sample.label;
  return record.dump();
}

void SaveDataset(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write dataset " + path);
  for (const auto& sample : samples) out << SerializeSample(sample) << '\n';
}

bool AllLabeled(const std::vector<Sample>& samples) {
  for (const auto& sample : samples) {
    if (!sample.label) return false;
  }
  return true;
}

}  // namespace cegi
