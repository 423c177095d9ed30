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

#include "cegi/encoder/vocabulary.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace cegi {
namespace {

const std::vector<std::string>& ReservedTokens() {
  static const std::vector<std::string> reserved = {
      std::string(kPadToken), std::string(kClsToken), std::string(kSepToken),
      std::string(kUnkToken), std::string(kEosToken)};
  return reserved;
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const auto& token : ReservedTokens()) Add(token);
}

Vocabulary Vocabulary::Build(
    const std::vector<std::vector<std::string>>& corpus, size_t max_size) {
  std::map<std::string, int64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++counts[token];
  }
  std::vector<std::pair<std::string, int64_t>> ranked(counts.begin(),
                                                      counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  Vocabulary vocab;
  for (const auto& [token, count] : ranked) {
    if (static_cast<size_t>(vocab.size()) >= max_size) break;
    vocab.Add(token);
  }
  return vocab;
}

Vocabulary Vocabulary::FromTokens(const std::vector<std::string>& tokens) {
  const auto& reserved = ReservedTokens();
  if (tokens.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), tokens.begin())) {
    throw std::invalid_argument(
        "vocabulary must start with [PAD] [CLS] [SEP] [UNK] [EOS]");
  }
  Vocabulary vocab;
  for (size_t i = reserved.size(); i < tokens.size(); ++i) {
    if (vocab.Contains(tokens[i])) {
      throw std::invalid_argument("duplicate vocabulary token '" + tokens[i] +
                                  "' at id " + std::to_string(i));
    }
    vocab.Add(tokens[i]);
  }
  return vocab;
}

Vocabulary Vocabulary::Load(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open vocabulary " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return FromTokens(tokens);
}

void Vocabulary::Save(const std::string& path) const {
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write vocabulary " + path);
  for (const auto& token : tokens_) file << token << '\n';
}

int64_t Vocabulary::Id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnkId : it->second;
}

bool Vocabulary::Contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

const std::string& Vocabulary::Token(int64_t id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("token id " + std::to_string(id) +
                            " outside vocabulary of size " +
                            std::to_string(size()));
  }
  return tokens_[id];
}

int64_t Vocabulary::Add(std::string_view token) {
  auto [it, inserted] = ids_.emplace(std::string(token), size());
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

}  // namespace cegi
