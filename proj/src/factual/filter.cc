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

#include "cegi/factual/filter.h"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace cegi {

void FilterParams::Validate() const {
  if (top_k < 1 || object_slack < 1 || max_objects < 1) {
    throw std::invalid_argument(
        "filter parameters K, K^o and K^r must be positive");
  }
}

namespace {

bool FrequencyRulePasses(const std::string& subject, const std::string& object,
                         const FrequencyTable& frequencies,
                         const FilterParams& params) {
  if (params.mode == FrequencyRule::kRank) {
    std::optional<int64_t> subject_rank = frequencies.Rank(subject);
    if (!subject_rank) return true;
    std::optional<int64_t> object_rank = frequencies.Rank(object);
    if (!object_rank) return false;
    return *subject_rank > *object_rank - params.object_slack;
  }
  if (!frequencies.has_counts()) {
    throw std::invalid_argument("count-based filtering needs word counts");
  }
  return *frequencies.Count(subject) <
         *frequencies.Count(object) + params.object_slack;
}

}  // namespace

RuleChecks CheckRules(const Triple& candidate, std::span<const Entity> entities,
                      const FrequencyTable& frequencies,
                      const PosLexicon& lexicon, const FilterParams& params) {
  RuleChecks checks;
  const std::string& head = candidate.HeadWord();
  for (const Entity& entity : entities) {
    if (entity.word == head) {
      checks.entity = &entity;
      break;
    }
  }
  if (checks.entity) {
    checks.pos = lexicon.TagInContext(candidate.subject,
                                      candidate.subject.size() - 1) ==
                 checks.entity->tag;
  }
  checks.frequency = FrequencyRulePasses(head, candidate.ObjectHeadWord(),
                                         frequencies, params);
  checks.rare_subject = !frequencies.InTopK(head, params.top_k);
  return checks;
}

std::vector<Triple> FilterTriples(std::span<const Triple> candidates,
                                  std::span<const Entity> entities,
                                  const FrequencyTable& frequencies,
                                  const PosLexicon& lexicon,
                                  const FilterParams& params) {
  params.Validate();
  std::vector<Triple> accepted;
  std::set<Triple> kept;
  std::map<std::pair<std::vector<std::string>, std::string>, int64_t> per_key;
  for (const Triple& candidate : candidates) {
    if (!CheckRules(candidate, entities, frequencies, lexicon, params).Passes()) {
      continue;
    }
    if (kept.count(candidate)) continue;
    int64_t& used = per_key[{candidate.subject, candidate.relation}];
    if (used >= params.max_objects) continue;
    ++used;
    kept.insert(candidate);
    accepted.push_back(candidate);
  }
  return accepted;
}

}  // namespace cegi
