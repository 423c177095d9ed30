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

#ifndef CEGI_PIPELINE_EVIDENCE_H_
#define CEGI_PIPELINE_EVIDENCE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/vocabulary.h"
#include "cegi/factual/filter.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/factual/lexicon.h"
#include "cegi/factual/triple_completion.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/textual/language_model.h"

namespace cegi {

// JSON lines {"id": ..., "source": "textual"|"factual", "text": ...}.
std::vector<EvidenceRecord> ParseEvidence(const std::string& text);
std::vector<EvidenceRecord> LoadEvidence(const std::string& path);
void SaveEvidence(const std::string& path,
                  std::span<const EvidenceRecord> records);

// Lowercased word tokens of P, Q and every option.
std::vector<std::vector<std::string>> SampleWords(const Sample& sample);

// One generated sentence per sample from [P [SEP] Q [SEP]].
class TextualEvidenceGenerator {
 public:
  TextualEvidenceGenerator(const LanguageModel& model, const Vocabulary& vocab,
                           LMTrainConfig decoding);
  EvidenceRecord Generate(const Sample& sample) const;

 private:
  const LanguageModel& model_;
  const Vocabulary& vocab_;
  LMTrainConfig decoding_;
};

// Verbalized knowledge-graph triples about the sample's entities.
class FactualEvidenceGenerator {
 public:
  FactualEvidenceGenerator(const KnowledgeStore& store,
                           const FrequencyTable& frequencies,
                           const PosLexicon& lexicon, FilterParams params,
                           int64_t max_sentences);

  // Adds model completions for each entity under `relations`.
  void EnableCompletion(const TripleCompleter* completer,
                        std::vector<std::string> relations);

  // Stored triples whose subject head is an entity, in entity order, then
  // completions.
  std::vector<Triple> Candidates(std::span<const Entity> entities) const;
  // Filtered triples for the sample, at most max_sentences.
  std::vector<Triple> Select(const Sample& sample) const;
  std::vector<EvidenceRecord> Generate(const Sample& sample) const;

 private:
  const KnowledgeStore& store_;
  const FrequencyTable& frequencies_;
  const PosLexicon& lexicon_;
  FilterParams params_;
  int64_t max_sentences_;
  const TripleCompleter* completer_ = nullptr;
  std::vector<std::string> completion_relations_;
};

// Evidence for every sample, textual before factual; null generators are
// skipped.
std::vector<EvidenceRecord> GenerateEvidence(
    std::span<const Sample> samples, const TextualEvidenceGenerator* textual,
    const FactualEvidenceGenerator* factual);

// Replaces each sample's evidence with its records from enabled sources:
// textual records first, then at most `max_factual` factual ones, each in
// file order. kNone leaves every sample without evidence.
void AttachEvidence(std::vector<Sample>& samples,
                    std::span<const EvidenceRecord> records,
                    EvidenceSources sources, int64_t max_factual);

}  // namespace cegi

#endif  // CEGI_PIPELINE_EVIDENCE_H_
