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

#include "cegi/encoder/packing.h"

#include <algorithm>
#include <string>

#include "cegi/encoder/vocabulary.h"

namespace cegi {

PackedInput PackInput(std::span<const int64_t> paragraph,
                      std::span<const int64_t> question,
                      std::span<const int64_t> option,
                      std::span<const int64_t> evidence,
                      const PackOptions& options) {
  constexpr int64_t kSpecialColumns = 4;  // [CLS] and three [SEP]
  auto width = [](size_t tokens, int64_t minimum) {
    return std::max(static_cast<int64_t>(tokens), minimum);
  };
  auto total = [&](size_t p, size_t e) {
    return kSpecialColumns + width(p, options.paragraph_width) +
           width(question.size(), options.question_width) +
           width(option.size(), options.option_width) +
           width(e, options.evidence_width);
  };

  size_t p_keep = paragraph.size();
  size_t e_keep = evidence.size();
  while (total(p_keep, e_keep) > options.max_length && p_keep > 0) --p_keep;
  while (total(p_keep, e_keep) > options.max_length && e_keep > 0) --e_keep;
  const int64_t length = total(p_keep, e_keep);
  if (length > options.max_length) {
    throw PackingError("packed input needs " + std::to_string(length) +
                       " positions after truncation, budget is " +
                       std::to_string(options.max_length));
  }
  if (options.pad_to > options.max_length) {
    throw PackingError("pad_to " + std::to_string(options.pad_to) +
                       " exceeds max length " +
                       std::to_string(options.max_length));
  }
  // Front truncation keeps the most recent paragraph context.
  paragraph = paragraph.subspan(paragraph.size() - p_keep);
  evidence = evidence.first(e_keep);

  PackedInput packed;
  packed.ids.reserve(std::max(length, options.pad_to));
  auto append = [&](std::span<const int64_t> tokens, int64_t seg_width,
                    Segment& segment) {
    segment.begin = static_cast<int64_t>(packed.ids.size());
    segment.width = seg_width;
    packed.ids.insert(packed.ids.end(), tokens.begin(), tokens.end());
    packed.ids.insert(packed.ids.end(),
                      seg_width - static_cast<int64_t>(tokens.size()), kPadId);
  };
  packed.ids.push_back(kClsId);
  append(paragraph, width(paragraph.size(), options.paragraph_width),
         packed.paragraph);
  packed.ids.push_back(kSepId);
  append(question, width(question.size(), options.question_width),
         packed.question);
  packed.ids.push_back(kSepId);
  append(option, width(option.size(), options.option_width), packed.option);
  packed.ids.push_back(kSepId);
  append(evidence, width(evidence.size(), options.evidence_width),
         packed.evidence);
  packed.content_length = static_cast<int64_t>(packed.ids.size());
  if (options.pad_to > packed.content_length) {
    packed.ids.resize(options.pad_to, kPadId);
  }
  return packed;
}

}  // namespace cegi
