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

#include "cegi/encoder/tokenizer.h"

#include <array>
#include <cctype>

namespace cegi {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }

bool IsPunct(char c) { return std::ispunct(static_cast<unsigned char>(c)); }

char Lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

// Matches a reserved token (case-insensitive) at text[pos].
std::string_view ReservedAt(std::string_view text, size_t pos) {
  static constexpr std::array<std::string_view, 5> kReserved = {
      kPadToken, kClsToken, kSepToken, kUnkToken, kEosToken};
  for (std::string_view token : kReserved) {
    if (text.size() - pos < token.size()) continue;
    bool match = true;
    for (size_t i = 0; i < token.size() && match; ++i) {
      match = std::toupper(static_cast<unsigned char>(text[pos + i])) ==
              token[i];
    }
    if (match) return token;
  }
  return {};
}

}  // namespace

std::vector<std::string> SplitWords(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(std::move(current));
    current.clear();
  };
  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (IsSpace(c)) {
      flush();
    } else if (c == '[' && !ReservedAt(text, i).empty()) {
      flush();
      std::string_view token = ReservedAt(text, i);
      words.emplace_back(token);
      i += token.size() - 1;
    } else if (IsPunct(c)) {
      flush();
      words.emplace_back(1, c);
    } else {
      current.push_back(Lower(c));
    }
  }
  flush();
  return words;
}

std::vector<int64_t> Tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<int64_t> ids;
  for (const auto& word : SplitWords(text)) ids.push_back(vocab.Id(word));
  return ids;
}

std::string Detokenize(std::span<const int64_t> ids, const Vocabulary& vocab) {
  std::string out;
  for (int64_t id : ids) {
    if (id == kPadId) continue;
    if (!out.empty()) out.push_back(' ');
    out += vocab.Token(id);
  }
  return out;
}

}  // namespace cegi
