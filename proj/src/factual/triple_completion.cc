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

#include "cegi/factual/triple_completion.h"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace cegi {

std::string RelationToken(std::string_view label) {
  std::string token(label);
  for (char& c : token) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return token;
}

std::vector<std::string> TripleWords(const Triple& triple) {
  std::vector<std::string> words(triple.subject);
  words.emplace_back(kSepToken);
  words.push_back(RelationToken(triple.relation));
  words.emplace_back(kSepToken);
  words.insert(words.end(), triple.object.begin(), triple.object.end());
  words.emplace_back(kEosToken);
  return words;
}

std::vector<int64_t> TriplePrompt(std::span<const std::string> subject,
                                  std::string_view relation,
                                  const Vocabulary& vocab) {
  std::vector<int64_t> ids;
  for (const auto& word : subject) ids.push_back(vocab.Id(word));
  ids.push_back(kSepId);
  ids.push_back(vocab.Id(RelationToken(relation)));
  ids.push_back(kSepId);
  return ids;
}

std::vector<int64_t> TripleSequence(const Triple& triple,
                                    const Vocabulary& vocab) {
  std::vector<int64_t> ids;
  for (const auto& word : TripleWords(triple)) ids.push_back(vocab.Id(word));
  if (static_cast<int64_t>(ids.size()) > kTripleMaxLength) {
    ids.resize(kTripleMaxLength - 1);
    ids.push_back(kEosId);
  }
  return ids;
}

TripleCompleter::TripleCompleter(const LanguageModel& model,
                                 const Vocabulary& vocab,
                                 const RelationTemplates& templates)
    : model_(model), vocab_(vocab), templates_(templates) {}

LMTrainConfig TripleCompleter::DefaultDecoding() {
  LMTrainConfig config;
  config.stop_at_period = false;
  config.max_new_tokens = 8;
  return config;
}

std::vector<Triple> TripleCompleter::Complete(std::span<const std::string> subject,
                                              std::string_view relation,
                                              const LMTrainConfig& decoding,
                                              int64_t samples, Rng* rng) const {
  std::optional<std::string> label = templates_.Canonical(relation);
  if (!label) {
    throw std::invalid_argument("unknown relation label " + std::string(relation));
  }
  if (subject.empty()) throw std::invalid_argument("empty completion subject");
  std::vector<int64_t> prompt = TriplePrompt(subject, *label, vocab_);
  const int64_t budget = kTripleMaxLength - static_cast<int64_t>(prompt.size());
  if (budget < 2) return {};
  LMTrainConfig config = decoding;
  config.stop_at_period = false;
  config.max_new_tokens = std::min(config.max_new_tokens, budget - 1);
  const int64_t attempts =
      config.decode == DecodeMode::kGreedy ? 1 : std::max<int64_t>(samples, 1);

  std::vector<Triple> out;
  std::set<std::vector<std::string>> seen;
  for (int64_t attempt = 0; attempt < attempts; ++attempt) {
    std::vector<int64_t> ids = model_.Generate(prompt, config, -1, rng);
    std::vector<std::string> object;
    for (int64_t id : ids) {
      if (id == kSepId || id == kPadId || id == kClsId) break;
      object.push_back(vocab_.Token(id));
    }
    if (object.empty() || !seen.insert(object).second) continue;
    Triple triple;
    triple.subject.assign(subject.begin(), subject.end());
    triple.relation = *label;
    triple.object = std::move(object);
    triple.provenance = Provenance::kGenerated;
    out.push_back(std::move(triple));
  }
  return out;
}

}  // namespace cegi
