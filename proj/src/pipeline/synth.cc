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

#include "cegi/pipeline/synth.h"

#include <set>
#include <sstream>
#include <stdexcept>

#include "cegi/numerics/rng.h"

namespace cegi {
namespace {

std::string Word(int64_t index) { return "w" + std::to_string(index); }

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& word : words) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

// Distinct word indices not in `taken`.
std::vector<int64_t> DrawDistinct(Rng& rng, int64_t count, int64_t vocab,
                                  std::set<int64_t>& taken) {
  std::vector<int64_t> out;
  while (static_cast<int64_t>(out.size()) < count) {
    int64_t index = rng.UniformInt(vocab);
    if (taken.insert(index).second) out.push_back(index);
  }
  return out;
}

}  // namespace

void SynthSpec::Validate() const {
  if (samples < 1) throw std::invalid_argument("synth needs at least one sample");
  if (options < 2) throw std::invalid_argument("synth needs at least two options");
  if (paragraph_length < 2 || phrase_length < 2) {
    throw std::invalid_argument("synth lengths are too short");
  }
  const int64_t needed =
      options + paragraph_length + (similar_distractors ? phrase_length : 0) + 8;
  if (vocab_size < needed) {
    throw std::invalid_argument("synth vocabulary too small: need at least " +
                                std::to_string(needed) + " words");
  }
}

SynthData SynthTask(const SynthSpec& spec, uint64_t seed) {
  spec.Validate();
  Rng rng(seed);
  SynthData data;
  const int width = static_cast<int>(std::to_string(spec.samples - 1).size());
  for (int64_t n = 0; n < spec.samples; ++n) {
    std::set<int64_t> taken;
    // Distinguishing word of each option; the cue is the correct one's.
    const std::vector<int64_t> keys =
        DrawDistinct(rng, spec.options, spec.vocab_size, taken);
    std::vector<int64_t> shared;
    if (spec.similar_distractors) {
      shared = DrawDistinct(rng, spec.phrase_length - 1, spec.vocab_size, taken);
    }
    const int64_t label = rng.UniformInt(spec.options);
    const int64_t slot =
        spec.similar_distractors ? rng.UniformInt(spec.phrase_length) : 0;
    std::vector<int64_t> filler =
        DrawDistinct(rng, spec.paragraph_length, spec.vocab_size, taken);

    Sample sample;
    std::ostringstream id;
    id << spec.id_prefix << "-";
    id.width(width);
    id.fill('0');
    id << n;
    sample.id = id.str();
    for (int64_t j = 0; j < spec.options; ++j) {
      std::vector<std::string> words;
      if (spec.similar_distractors) {
        for (int64_t s = 0, k = 0; s < spec.phrase_length; ++s) {
          words.push_back(s == slot ? Word(keys[j]) : Word(shared[k++]));
        }
      } else {
        words.push_back(Word(keys[j]));
      }
      sample.options.push_back(JoinWords(words));
    }
    std::vector<std::string> paragraph;
    for (int64_t index : filler) paragraph.push_back(Word(index));
    const std::string cue = Word(keys[label]);
    std::vector<std::string> evidence = {"the", "answer", "is"};
    if (spec.dependency == EvidenceDependency::kNone) {
      paragraph[rng.UniformInt(spec.paragraph_length)] = cue;
      evidence.push_back("hidden");
    } else {
      evidence.push_back(cue);
    }
    evidence.push_back(".");
    sample.paragraph = JoinWords(paragraph) + " .";
    sample.question = "which option is right ?";
    sample.label = label;
    data.gold_evidence.push_back(
        {sample.id, EvidenceSource::kTextual, JoinWords(evidence)});
    data.samples.push_back(std::move(sample));
  }
  return data;
}

}  // namespace cegi
