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

#ifndef CEGI_ENCODER_VOCABULARY_H_
#define CEGI_ENCODER_VOCABULARY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cegi {

inline constexpr int64_t kPadId = 0;
inline constexpr int64_t kClsId = 1;
inline constexpr int64_t kSepId = 2;
inline constexpr int64_t kUnkId = 3;
inline constexpr int64_t kEosId = 4;
inline constexpr int64_t kReservedCount = 5;

inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kEosToken = "[EOS]";

inline constexpr size_t kDefaultVocabularyCap = 20000;

// Dense token <-> id mapping. Ids 0..4 are always the reserved tokens above.
class Vocabulary {
 public:
  Vocabulary();

  // Most frequent tokens first (ties broken lexicographically), capped at
  // max_size entries including the reserved ones.
  static Vocabulary Build(const std::vector<std::vector<std::string>>& corpus,
                          size_t max_size = kDefaultVocabularyCap);
  // Tokens in id order; the first five must be the reserved tokens.
  static Vocabulary FromTokens(const std::vector<std::string>& tokens);

  // One token per line, line number = id.
  static Vocabulary Load(const std::string& path);
  void Save(const std::string& path) const;

  int64_t Id(std::string_view token) const;
  bool Contains(std::string_view token) const;
  const std::string& Token(int64_t id) const;
  int64_t size() const { return static_cast<int64_t>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // Appends the token if absent; returns its id either way.
  int64_t Add(std::string_view token);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int64_t> ids_;
};

}  // namespace cegi

#endif  // CEGI_ENCODER_VOCABULARY_H_
