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

#include "cegi/pipeline/evidence.h"

#include <fstream>
#include <map>
#include <sstream>

#include "cegi/encoder/tokenizer.h"
#include "json.hpp"

namespace cegi {

std::vector<EvidenceRecord> ParseEvidence(const std::string& text) {
  std::vector<EvidenceRecord> records;
  std::istringstream in(text);
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "evidence line " + std::to_string(line_number) + ": ";
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(where + "malformed record: " + e.what());
    }
    for (const char* field : {"id", "source", "text"}) {
      if (!record.is_object() || !record.contains(field) ||
          !record[field].is_string()) {
        throw DatasetError(where + "missing string field '" + field + "'");
      }
    }
    EvidenceRecord out;
    out.sample_id = record["id"].get<std::string>();
    try {
      out.source = ParseEvidenceSource(record["source"].get<std::string>());
    } catch (const DatasetError& e) {
      throw DatasetError(where + e.what());
    }
    out.text = record["text"].get<std::string>();
    records.push_back(std::move(out));
  }
  return records;
}

std::vector<EvidenceRecord> LoadEvidence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open evidence file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseEvidence(text.str());
}

void SaveEvidence(const std::string& path,
                  std::span<const EvidenceRecord> records) {
  std::ofstream out(path);
  if (!out) throw DatasetError("cannot write evidence file " + path);
  for (const auto& record : records) {
    nlohmann::ordered_json row;
    row["id"] = record.sample_id;
    row["source"] = EvidenceSourceName(record.source);
    row["text"] = record.text;
    out << row.dump() << '\n';
  }
}

std::vector<std::vector<std::string>> SampleWords(const Sample& sample) {
  std::vector<std::vector<std::string>> words;
  words.push_back(SplitWords(sample.paragraph));
  words.push_back(SplitWords(sample.question));
  for (const auto& option : sample.options) words.push_back(SplitWords(option));
  return words;
}

TextualEvidenceGenerator::TextualEvidenceGenerator(const LanguageModel& model,
                                                   const Vocabulary& vocab,
                                                   LMTrainConfig decoding)
    : model_(model), vocab_(vocab), decoding_(decoding) {}

EvidenceRecord TextualEvidenceGenerator::Generate(const Sample& sample) const {
  std::vector<int64_t> prompt = BuildPrompt(Tokenize(sample.paragraph, vocab_),
                                            Tokenize(sample.question, vocab_));
  const int64_t period = vocab_.Contains(".") ? vocab_.Id(".") : -1;
  Rng rng(decoding_.seed ^ std::stoull(Fnv1aHex(sample.id), nullptr, 16));
  std::vector<int64_t> ids = model_.Generate(
      prompt, decoding_, period,
      decoding_.decode == DecodeMode::kTopK ? &rng : nullptr);
  return {sample.id, EvidenceSource::kTextual, Detokenize(ids, vocab_)};
}

FactualEvidenceGenerator::FactualEvidenceGenerator(
    const KnowledgeStore& store, const FrequencyTable& frequencies,
    const PosLexicon& lexicon, FilterParams params, int64_t max_sentences)
    : store_(store),
      frequencies_(frequencies),
      lexicon_(lexicon),
      params_(params),
      max_sentences_(max_sentences) {
  params_.Validate();
}

void FactualEvidenceGenerator::EnableCompletion(
    const TripleCompleter* completer, std::vector<std::string> relations) {
  completer_ = completer;
  completion_relations_ = std::move(relations);
}

std::vector<Triple> FactualEvidenceGenerator::Candidates(
    std::span<const Entity> entities) const {
  std::vector<Triple> candidates;
  for (const Entity& entity : entities) {
    for (const Triple* triple : store_.BySubjectHead(entity.word)) {
      candidates.push_back(*triple);
    }
  }
  if (completer_) {
    const LMTrainConfig decoding = TripleCompleter::DefaultDecoding();
    for (const Entity& entity : entities) {
      const std::vector<std::string> subject{entity.word};
      for (const auto& relation : completion_relations_) {
        for (Triple& triple : completer_->Complete(subject, relation, decoding)) {
          candidates.push_back(std::move(triple));
        }
      }
    }
  }
  return candidates;
}

std::vector<Triple> FactualEvidenceGenerator::Select(const Sample& sample) const {
  const auto words = SampleWords(sample);
  const std::vector<Entity> entities = ExtractEntities(words, lexicon_);
  const std::vector<Triple> candidates = Candidates(entities);
  std::vector<Triple> accepted =
      FilterTriples(candidates, entities, frequencies_, lexicon_, params_);
  if (static_cast<int64_t>(accepted.size()) > max_sentences_) {
    accepted.resize(max_sentences_);
  }
  return accepted;
}

std::vector<EvidenceRecord> FactualEvidenceGenerator::Generate(
    const Sample& sample) const {
  std::vector<EvidenceRecord> records;
  for (const Triple& triple : Select(sample)) {
    records.push_back(
        {sample.id, EvidenceSource::kFactual, Verbalize(triple, store_)});
  }
  return records;
}

std::vector<EvidenceRecord> GenerateEvidence(
    std::span<const Sample> samples, const TextualEvidenceGenerator* textual,
    const FactualEvidenceGenerator* factual) {
  std::vector<EvidenceRecord> records;
  for (const Sample& sample : samples) {
    if (textual) records.push_back(textual->Generate(sample));
    if (factual) {
      for (auto& record : factual->Generate(sample)) {
        records.push_back(std::move(record));
      }
    }
  }
  return records;
}

void AttachEvidence(std::vector<Sample>& samples,
                    std::span<const EvidenceRecord> records,
                    EvidenceSources sources, int64_t max_factual) {
  const bool use_textual =
      sources == EvidenceSources::kTextual || sources == EvidenceSources::kBoth;
  const bool use_factual =
      sources == EvidenceSources::kFactual || sources == EvidenceSources::kBoth;
  std::map<std::string, std::vector<const EvidenceRecord*>> by_id;
  for (const auto& record : records) by_id[record.sample_id].push_back(&record);
  for (Sample& sample : samples) {
    sample.evidence.clear();
    auto it = by_id.find(sample.id);
    if (it == by_id.end()) continue;
    if (use_textual) {
      for (const auto* record : it->second) {
        if (record->source == EvidenceSource::kTextual) {
          sample.evidence.push_back(*record);
        }
      }
    }
    if (use_factual) {
      int64_t added = 0;
      for (const auto* record : it->second) {
        if (record->source != EvidenceSource::kFactual) continue;
        if (added >= max_factual) break;
        sample.evidence.push_back(*record);
        ++added;
      }
    }
  }
}

}  // namespace cegi
