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

#ifndef CEGI_ENCODER_TOKENIZER_H_
#define CEGI_ENCODER_TOKENIZER_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cegi/encoder/vocabulary.h"

namespace cegi {

// Lowercased word tokenization: whitespace separates words and every ASCII
// punctuation character is a token of its own. Bracketed reserved tokens
// such as "[SEP]" survive intact.
std::vector<std::string> SplitWords(std::string_view text);

std::vector<int64_t> Tokenize(std::string_view text, const Vocabulary& vocab);

// Space-joined tokens; [PAD] ids are skipped.
std::string Detokenize(std::span<const int64_t> ids, const Vocabulary& vocab);

}  // namespace cegi

#endif  // CEGI_ENCODER_TOKENIZER_H_
