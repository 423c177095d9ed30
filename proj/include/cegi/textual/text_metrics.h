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

#ifndef CEGI_TEXTUAL_TEXT_METRICS_H_
#define CEGI_TEXTUAL_TEXT_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cegi {

using TokenSequence = std::vector<std::string>;

enum class BleuSmoothing {
  kNone,
  // Adds one to the matched and total counts of every order above 1.
  kAddOne,
};

// Counts of every contiguous n-gram of the given order.
std::map<TokenSequence, int64_t> NgramCounts(std::span<const std::string> tokens,
                                             int order);

// Corpus-free BLEU of one candidate against one or more references: the
// geometric mean of clipped n-gram precisions for orders 1..max_order
// (uniform weights) times the brevity penalty against the closest
// reference length. An empty candidate scores 0.
double Bleu(std::span<const std::string> candidate,
            std::span<const TokenSequence> references, int max_order,
            BleuSmoothing smoothing = BleuSmoothing::kAddOne);
double Bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_order,
            BleuSmoothing smoothing = BleuSmoothing::kAddOne);

// Mean BLEU of each text against all the others. Needs >= 2 texts.
double SelfBleu(std::span<const TokenSequence> corpus, int max_order,
                BleuSmoothing smoothing = BleuSmoothing::kAddOne);

}  // namespace cegi

#endif  // CEGI_TEXTUAL_TEXT_METRICS_H_
