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

#ifndef CEGI_PIPELINE_READER_H_
#define CEGI_PIPELINE_READER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cegi/capsule/capsule_head.h"
#include "cegi/encoder/transformer.h"
#include "cegi/encoder/vocabulary.h"
#include "cegi/injection/injection.h"
#include "cegi/numerics/parameters.h"
#include "cegi/numerics/rng.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"

namespace cegi {

// Token ids of one sample, already cut to fit the length budget.
struct TokenizedSample {
  std::string id;
  std::vector<int64_t> paragraph;
  std::vector<int64_t> question;
  std::vector<std::vector<int64_t>> options;
  std::vector<int64_t> evidence;
  std::optional<int64_t> label;
};

// Columns reserved for rounding segment widths up to multiples of 4.
inline constexpr int64_t kWidthSlack = 12;

// Tokenizes P, Q, options and attached evidence. When the longest packing
// exceeds max_length - kWidthSlack, the paragraph loses tokens from the
// front, then the evidence from the back.
TokenizedSample TokenizeSample(const Sample& sample, const Vocabulary& vocab,
                               int64_t max_length);

// Shared segment widths of a batch: the batch maximum of each segment,
// rounded up to a multiple of 4 (zero stays zero).
struct BatchWidths {
  int64_t paragraph = 0;
  int64_t question = 0;
  int64_t option = 0;
  int64_t evidence = 0;
};
BatchWidths ComputeBatchWidths(std::span<const TokenizedSample* const> batch);
BatchWidths ComputeBatchWidths(const TokenizedSample& sample);

struct ReaderOutput {
  Tensor loss;                 // undefined for unlabeled samples
  std::vector<double> scores;  // capsule norms or max-pool scores
  int64_t prediction = 0;
  FinalLayout layout;
  int64_t phrase_columns = 0;  // width of L
};

// Encoder -> evidence injection -> multi-grain features -> answer head.
class ReaderModel {
 public:
  ReaderModel(const PipelineConfig& config, int64_t vocab_size,
              ParameterSet& params, Rng& rng);

  ReaderOutput Forward(const TokenizedSample& sample,
                       const BatchWidths& widths) const;
  ReaderOutput Forward(const TokenizedSample& sample) const {
    return Forward(sample, ComputeBatchWidths(sample));
  }

  // 3d x m(t + n + h) representation and its layout.
  FinalRepresentation Represent(const TokenizedSample& sample,
                                const BatchWidths& widths) const;

  const PipelineConfig& config() const { return config_; }
  int64_t options() const { return options_; }

 private:
  PipelineConfig config_;
  int64_t options_;
  TransformerEncoder encoder_;
  InjectionParams injection_;
  MultiGrainKernels kernels_;
  std::unique_ptr<CapsuleHead> capsule_;
  std::unique_ptr<MaxPoolHead> maxpool_;
};

// Number of options the reader is built for: the first sample's count.
// Throws if samples disagree.
int64_t OptionCount(std::span<const Sample> samples);

}  // namespace cegi

#endif  // CEGI_PIPELINE_READER_H_
