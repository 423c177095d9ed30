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

#ifndef CEGI_TEXTUAL_LANGUAGE_MODEL_H_
#define CEGI_TEXTUAL_LANGUAGE_MODEL_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/transformer.h"
#include "cegi/numerics/optimizer.h"
#include "cegi/numerics/parameters.h"
#include "cegi/numerics/rng.h"
#include "cegi/numerics/tensor.h"

namespace cegi {

enum class DecodeMode { kGreedy, kTopK };

// Which position feeds the option classifier. A causal model's first
// position has seen only itself, so the last non-pad position is the
// default; kFirstToken is the literal reading for bidirectional encoders.
enum class PoolingMode { kLastToken, kFirstToken };

struct LMTrainConfig {
  double lambda = 0.5;
  int64_t max_new_tokens = 40;
  DecodeMode decode = DecodeMode::kGreedy;
  int64_t top_k = 5;
  uint64_t seed = 1;
  PoolingMode pooling = PoolingMode::kLastToken;
  // Stop after emitting a "." token as well as on [EOS].
  bool stop_at_period = true;
  void Validate() const;
};

// P [SEP] Q [SEP] A [EOS]
std::vector<int64_t> BuildLmSequence(std::span<const int64_t> paragraph,
                                     std::span<const int64_t> question,
                                     std::span<const int64_t> answer);
// P [SEP] Q [SEP] O
std::vector<int64_t> BuildOptionSequence(std::span<const int64_t> paragraph,
                                         std::span<const int64_t> question,
                                         std::span<const int64_t> option);
// P [SEP] Q [SEP]: the generation prompt.
std::vector<int64_t> BuildPrompt(std::span<const int64_t> paragraph,
                                 std::span<const int64_t> question);

// One joint-objective training item: the answer-bearing sequence plus one
// sequence per option and the index of the correct option.
struct JointExample {
  std::vector<int64_t> lm_sequence;
  std::vector<std::vector<int64_t>> option_sequences;
  int64_t label = -1;
};

struct NllSum {
  Tensor total;        // summed negative log-likelihood (scalar)
  int64_t tokens = 0;  // number of predicted positions
};

// Causal transformer with a vocabulary head and an option classifier head.
class LanguageModel {
 public:
  LanguageModel(const EncoderConfig& config, ParameterSet& params,
                const std::string& prefix, Rng& rng);

  const TransformerEncoder& encoder() const { return encoder_; }
  const EncoderConfig& config() const { return encoder_.config(); }

  // V x T next-token logits.
  Tensor Logits(std::span<const int64_t> ids) const;

  // NLL of positions 2..T given their prefixes; [PAD] targets are skipped.
  NllSum SequenceNll(std::span<const int64_t> ids) const;
  // Token-weighted mean NLL over the sequences. Throws if no position is
  // predictable (all pads or shorter than two tokens).
  Tensor LmLoss(std::span<const std::vector<int64_t>> sequences) const;

  // Scalar option score W_y h for the pooled feature h.
  Tensor OptionScore(std::span<const int64_t> ids, PoolingMode pooling) const;
  // Cross-entropy of the true option under softmax over option scores.
  Tensor ClassLoss(std::span<const std::vector<int64_t>> option_sequences,
                   int64_t label, PoolingMode pooling) const;
  // LmLoss + lambda * ClassLoss.
  Tensor TotalLoss(const JointExample& example,
                   const LMTrainConfig& config) const;

  // Decodes after the prompt until [EOS], a "." (if enabled) or
  // max_new_tokens. The returned tokens exclude [EOS]. `rng` is required
  // for top-k decoding only.
  std::vector<int64_t> Generate(std::span<const int64_t> prompt,
                                const LMTrainConfig& config,
                                int64_t period_id, Rng* rng = nullptr) const;

  // exp(total NLL / total predicted tokens).
  double Perplexity(std::span<const std::vector<int64_t>> corpus) const;

 private:
  TransformerEncoder encoder_;
  Tensor vocab_weight_;  // V x d
  Tensor vocab_bias_;    // V x 1
  Tensor class_weight_;  // 1 x d
};

struct TrainSchedule {
  int64_t epochs = 10;
  int64_t batch_size = 16;
  OptimizerConfig optimizer;
  uint64_t seed = 1;
};

// Called after every epoch with the epoch index and mean loss.
using EpochCallback = std::function<void(int64_t, double)>;

// Plain language-model training on sequences; returns per-epoch mean loss.
std::vector<double> TrainLanguageModel(
    const LanguageModel& model, ParameterSet& params,
    const std::vector<std::vector<int64_t>>& sequences,
    TrainSchedule schedule, const EpochCallback& on_epoch = {});

// Joint generation + classification fine-tuning.
std::vector<double> TrainJoint(const LanguageModel& model,
                               ParameterSet& params,
                               const std::vector<JointExample>& examples,
                               const LMTrainConfig& config,
                               TrainSchedule schedule,
                               const EpochCallback& on_epoch = {});

}  // namespace cegi

#endif  // CEGI_TEXTUAL_LANGUAGE_MODEL_H_
