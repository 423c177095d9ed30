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

#ifndef CEGI_FACTUAL_TRIPLE_COMPLETION_H_
#define CEGI_FACTUAL_TRIPLE_COMPLETION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/vocabulary.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/numerics/rng.h"
#include "cegi/textual/language_model.h"

namespace cegi {

// Longest completion-model sequence, s [SEP] r [SEP] o [EOS].
inline constexpr int64_t kTripleMaxLength = 15;

// Single vocabulary token standing for a relation, e.g. "capableof".
std::string RelationToken(std::string_view label);

// Token strings of s [SEP] r [SEP] o [EOS] (for vocabulary building).
std::vector<std::string> TripleWords(const Triple& triple);
// s [SEP] r [SEP]
std::vector<int64_t> TriplePrompt(std::span<const std::string> subject,
                                  std::string_view relation,
                                  const Vocabulary& vocab);
// s [SEP] r [SEP] o [EOS]
std::vector<int64_t> TripleSequence(const Triple& triple,
                                    const Vocabulary& vocab);

// Knowledge-graph completion with a causal language model trained on
// triple sequences.
class TripleCompleter {
 public:
  TripleCompleter(const LanguageModel& model, const Vocabulary& vocab,
                  const RelationTemplates& templates);

  // Decoding settings used by Complete; period stopping is off and the
  // length budget fits kTripleMaxLength.
  static LMTrainConfig DefaultDecoding();

  // Up to `samples` distinct object candidates for (subject, relation),
  // marked as generated. Greedy decoding yields at most one. Throws for an
  // unknown relation.
  std::vector<Triple> Complete(std::span<const std::string> subject,
                               std::string_view relation,
                               const LMTrainConfig& decoding,
                               int64_t samples = 1, Rng* rng = nullptr) const;

 private:
  const LanguageModel& model_;
  const Vocabulary& vocab_;
  const RelationTemplates& templates_;
};

}  // namespace cegi

#endif  // CEGI_FACTUAL_TRIPLE_COMPLETION_H_
