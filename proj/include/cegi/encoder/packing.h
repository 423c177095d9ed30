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

#ifndef CEGI_ENCODER_PACKING_H_
#define CEGI_ENCODER_PACKING_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace cegi {

class PackingError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Half-open column range [begin, begin + width) of the packed sequence.
struct Segment {
  int64_t begin = 0;
  int64_t width = 0;
  int64_t end() const { return begin + width; }
};

// [CLS] P [SEP] Q [SEP] O [SEP] E [PAD]...
struct PackedInput {
  std::vector<int64_t> ids;
  Segment paragraph;
  Segment question;
  Segment option;
  Segment evidence;
  // Length before the trailing [PAD] run.
  int64_t content_length = 0;
};

struct PackOptions {
  int64_t max_length = 256;
  // Right-pad the whole sequence to this length; 0 leaves it unpadded.
  int64_t pad_to = 0;
  // Segments shorter than these widths are filled with [PAD] inside the
  // segment, so every packing of a batch shares the same boundaries.
  int64_t paragraph_width = 0;
  int64_t question_width = 0;
  int64_t option_width = 0;
  int64_t evidence_width = 0;
};

// Over budget, the paragraph loses tokens from its front first, then the
// evidence from its back. Questions and options are never truncated; if the
// result still does not fit, PackingError is thrown.
PackedInput PackInput(std::span<const int64_t> paragraph,
                      std::span<const int64_t> question,
                      std::span<const int64_t> option,
                      std::span<const int64_t> evidence,
                      const PackOptions& options = {});

}  // namespace cegi

#endif  // CEGI_ENCODER_PACKING_H_
