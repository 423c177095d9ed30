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

#ifndef CEGI_FACTUAL_FILTER_H_
#define CEGI_FACTUAL_FILTER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cegi/factual/knowledge_store.h"
#include "cegi/factual/lexicon.h"

namespace cegi {

// How the subject/object frequency comparison is made.
//   kRank:  rank(s) > rank(o) - object_slack
//   kCount: count(s) < count(o) + object_slack
// Words missing from the table are maximally rare (infinite rank, count 0).
enum class FrequencyRule { kRank, kCount };

struct FilterParams {
  int64_t top_k = 500;         // K
  int64_t object_slack = 100;  // K^o
  int64_t max_objects = 2;     // K^r
  FrequencyRule mode = FrequencyRule::kRank;

  void Validate() const;
};

// Which rules a single candidate passes, ignoring the per-subject cap.
struct RuleChecks {
  const Entity* entity = nullptr;  // matched by subject head word
  bool pos = false;
  bool frequency = false;
  bool rare_subject = false;
  bool Passes() const { return entity && pos && frequency && rare_subject; }
};

RuleChecks CheckRules(const Triple& candidate, std::span<const Entity> entities,
                      const FrequencyTable& frequencies,
                      const PosLexicon& lexicon, const FilterParams& params);

// Keeps candidates whose subject head matches an entity and that pass the
// POS, frequency and top-K rules, then at most max_objects per
// (subject, relation) in candidate order. Repeated triples are kept once.
std::vector<Triple> FilterTriples(std::span<const Triple> candidates,
                                  std::span<const Entity> entities,
                                  const FrequencyTable& frequencies,
                                  const PosLexicon& lexicon,
                                  const FilterParams& params);

}  // namespace cegi

#endif  // CEGI_FACTUAL_FILTER_H_
