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

#include "cegi/textual/text_metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace cegi {

std::map<TokenSequence, int64_t> NgramCounts(
    std::span<const std::string> tokens, int order) {
  std::map<TokenSequence, int64_t> counts;
  if (order < 1) throw std::invalid_argument("n-gram order must be >= 1");
  const int64_t n = static_cast<int64_t>(tokens.size());
  for (int64_t i = 0; i + order <= n; ++i) {
    ++counts[TokenSequence(tokens.begin() + i, tokens.begin() + i + order)];
  }
  return counts;
}

double Bleu(std::span<const std::string> candidate,
            std::span<const TokenSequence> references, int max_order,
            BleuSmoothing smoothing) {
  if (max_order < 1) throw std::invalid_argument("BLEU order must be >= 1");
  if (references.empty()) {
    throw std::invalid_argument("BLEU needs at least one reference");
  }
  if (candidate.empty()) return 0.0;

  double log_precision = 0.0;
  for (int order = 1; order <= max_order; ++order) {
    const auto cand_counts = NgramCounts(candidate, order);
    std::map<TokenSequence, int64_t> max_ref;
    for (const auto& ref : references) {
      for (const auto& [gram, count] : NgramCounts(ref, order)) {
        max_ref[gram] = std::max(max_ref[gram], count);
      }
    }
    double matched = 0.0;
    double total = 0.0;
    for (const auto& [gram, count] : cand_counts) {
      total += static_cast<double>(count);
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) {
        matched += static_cast<double>(std::min(count, it->second));
      }
    }
    if (smoothing == BleuSmoothing::kAddOne && order > 1) {
      matched += 1.0;
      total += 1.0;
    }
    if (matched == 0.0 || total == 0.0) return 0.0;
    log_precision += std::log(matched / total) / max_order;
  }

  const double c = static_cast<double>(candidate.size());
  // Closest reference length, shorter one on ties.
  double r = static_cast<double>(references[0].size());
  for (const auto& ref : references) {
    const double len = static_cast<double>(ref.size());
    if (std::abs(len - c) < std::abs(r - c) ||
        (std::abs(len - c) == std::abs(r - c) && len < r)) {
      r = len;
    }
  }
  const double brevity = c > r ? 1.0 : std::exp(1.0 - r / c);
  return brevity * std::exp(log_precision);
}

double Bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, int max_order,
            BleuSmoothing smoothing) {
  const TokenSequence refs[] = {
      TokenSequence(reference.begin(), reference.end())};
  return Bleu(candidate, refs, max_order, smoothing);
}

double SelfBleu(std::span<const TokenSequence> corpus, int max_order,
                BleuSmoothing smoothing) {
  if (corpus.size() < 2) {
    throw std::invalid_argument("self-BLEU needs at least two texts");
  }
  double total = 0.0;
  for (size_t i = 0; i < corpus.size(); ++i) {
    std::vector<TokenSequence> others;
    others.reserve(corpus.size() - 1);
    for (size_t j = 0; j < corpus.size(); ++j) {
      if (j != i) others.push_back(corpus[j]);
    }
    total += Bleu(corpus[i], others, max_order, smoothing);
  }
  return total / static_cast<double>(corpus.size());
}

}  // namespace cegi
