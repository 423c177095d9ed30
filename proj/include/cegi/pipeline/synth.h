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

#ifndef CEGI_PIPELINE_SYNTH_H_
#define CEGI_PIPELINE_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cegi/pipeline/dataset.h"

namespace cegi {

enum class EvidenceDependency {
  // The cue word naming the correct option appears in the paragraph.
  kNone,
  // The cue word appears only in the gold evidence; P, Q and the options
  // carry no information about the label.
  kRequired,
};

struct SynthSpec {
  int64_t samples = 100;
  int64_t vocab_size = 200;  // content words "w0".."w{vocab_size-1}"
  EvidenceDependency dependency = EvidenceDependency::kRequired;
  // Options are multi-word phrases that differ in a single word.
  bool similar_distractors = false;
  int64_t options = 4;
  int64_t paragraph_length = 12;
  int64_t phrase_length = 3;  // option length with similar distractors
  std::string id_prefix = "synth";

  void Validate() const;
};

struct SynthData {
  std::vector<Sample> samples;
  // One textual record per sample holding the gold evidence sentence.
  std::vector<EvidenceRecord> gold_evidence;
};

// Reproducible multiple-choice samples; labels are uniform over options.
SynthData SynthTask(const SynthSpec& spec, uint64_t seed);

}  // namespace cegi

#endif  // CEGI_PIPELINE_SYNTH_H_
