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

#include "cegi/textual/language_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cegi/encoder/vocabulary.h"
#include "cegi/numerics/ops.h"

namespace cegi {
namespace {

std::vector<int64_t> Joined(std::span<const int64_t> paragraph,
                            std::span<const int64_t> question) {
  std::vector<int64_t> ids(paragraph.begin(), paragraph.end());
  ids.push_back(kSepId);
  ids.insert(ids.end(), question.begin(), question.end());
  ids.push_back(kSepId);
  return ids;
}

int64_t LastContentPosition(std::span<const int64_t> ids) {
  for (int64_t i = static_cast<int64_t>(ids.size()) - 1; i >= 0; --i) {
    if (ids[i] != kPadId) return i;
  }
  throw std::invalid_argument("sequence contains only [PAD]");
}

template <typename Item, typename LossFn>
std::vector<double> RunEpochs(const std::vector<Item>& items,
                              ParameterSet& params, TrainSchedule schedule,
                              const LossFn& loss_fn,
                              const EpochCallback& on_epoch) {
  if (items.empty()) throw std::invalid_argument("no training items");
  if (schedule.batch_size < 1) {
    throw std::invalid_argument("batch size must be positive");
  }
  const int64_t n = static_cast<int64_t>(items.size());
  const int64_t batches = (n + schedule.batch_size - 1) / schedule.batch_size;
  schedule.optimizer.total_steps = schedule.epochs * batches;
  Optimizer optimizer(params, schedule.optimizer);
  Rng rng(schedule.seed);
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> curve;
  for (int64_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.Shuffle(order);
    double epoch_loss = 0.0;
    for (int64_t b = 0; b < batches; ++b) {
      const int64_t begin = b * schedule.batch_size;
      const int64_t end = std::min(n, begin + schedule.batch_size);
      std::vector<const Item*> batch;
      for (int64_t i = begin; i < end; ++i) batch.push_back(&items[order[i]]);
      Tensor loss = loss_fn(batch);
      params.ZeroGrad();
      Backward(loss);
      optimizer.Step();
      epoch_loss += loss.item();
    }
    curve.push_back(epoch_loss / static_cast<double>(batches));
    if (on_epoch) on_epoch(epoch, curve.back());
  }
  return curve;
}

}  // namespace

void LMTrainConfig::Validate() const {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (max_new_tokens < 1) {
    throw std::invalid_argument("max generated tokens must be >= 1");
  }
  if (decode == DecodeMode::kTopK && top_k < 1) {
    throw std::invalid_argument("top-k decoding needs k >= 1");
  }
}

std::vector<int64_t> BuildLmSequence(std::span<const int64_t> paragraph,
                                     std::span<const int64_t> question,
                                     std::span<const int64_t> answer) {
  std::vector<int64_t> ids = Joined(paragraph, question);
  ids.insert(ids.end(), answer.begin(), answer.end());
  ids.push_back(kEosId);
  return ids;
}

std::vector<int64_t> BuildOptionSequence(std::span<const int64_t> paragraph,
                                         std::span<const int64_t> question,
                                         std::span<const int64_t> option) {
  std::vector<int64_t> ids = Joined(paragraph, question);
  ids.insert(ids.end(), option.begin(), option.end());
  return ids;
}

std::vector<int64_t> BuildPrompt(std::span<const int64_t> paragraph,
                                 std::span<const int64_t> question) {
  return Joined(paragraph, question);
}

LanguageModel::LanguageModel(const EncoderConfig& config, ParameterSet& params,
                             const std::string& prefix, Rng& rng)
    : encoder_(config, params, prefix + ".encoder", rng) {
  vocab_weight_ = params.AddXavier(prefix + ".vocab_weight",
                                   {config.vocab_size, config.dim}, rng);
  vocab_bias_ = params.Add(prefix + ".vocab_bias", {config.vocab_size, 1});
  class_weight_ =
      params.AddXavier(prefix + ".class_weight", {1, config.dim}, rng);
}

Tensor LanguageModel::Logits(std::span<const int64_t> ids) const {
  return AddBias(MatMul(vocab_weight_, CausalEncode(ids, encoder_)),
                 vocab_bias_);
}

NllSum LanguageModel::SequenceNll(std::span<const int64_t> ids) const {
  const int64_t length = static_cast<int64_t>(ids.size());
  if (length < 2) {
    throw std::invalid_argument("language-model loss needs >= 2 tokens");
  }
  std::vector<int64_t> targets(length, -1);
  int64_t count = 0;
  for (int64_t i = 0; i + 1 < length; ++i) {
    if (ids[i + 1] != kPadId) {
      targets[i] = ids[i + 1];
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("language-model loss on an all-pad sequence");
  }
  return {CrossEntropyCols(Logits(ids), targets), count};
}

Tensor LanguageModel::LmLoss(
    std::span<const std::vector<int64_t>> sequences) const {
  if (sequences.empty()) throw std::invalid_argument("empty corpus");
  Tensor total;
  int64_t tokens = 0;
  for (const auto& seq : sequences) {
    NllSum nll = SequenceNll(seq);
    total = total.defined() ? Add(total, nll.total) : nll.total;
    tokens += nll.tokens;
  }
  return Scale(total, 1.0 / static_cast<double>(tokens));
}

Tensor LanguageModel::OptionScore(std::span<const int64_t> ids,
                                  PoolingMode pooling) const {
  const int64_t position =
      pooling == PoolingMode::kFirstToken ? 0 : LastContentPosition(ids);
  Tensor features = CausalEncode(ids, encoder_);
  return MatMul(class_weight_, SliceCols(features, position, 1));
}

Tensor LanguageModel::ClassLoss(
    std::span<const std::vector<int64_t>> option_sequences, int64_t label,
    PoolingMode pooling) const {
  const int64_t m = static_cast<int64_t>(option_sequences.size());
  if (label < 0 || label >= m) {
    throw std::invalid_argument("class loss needs a label in [0, " +
                                std::to_string(m) + ")");
  }
  std::vector<Tensor> scores;
  scores.reserve(m);
  for (const auto& seq : option_sequences) {
    scores.push_back(OptionScore(seq, pooling));
  }
  const int64_t targets[] = {label};
  return CrossEntropyCols(ConcatRows(scores), targets);
}

Tensor LanguageModel::TotalLoss(const JointExample& example,
                                const LMTrainConfig& config) const {
  config.Validate();
  const std::vector<int64_t>* seq = &example.lm_sequence;
  Tensor lm = LmLoss(std::span<const std::vector<int64_t>>(seq, 1));
  if (config.lambda == 0.0) return lm;
  return Add(lm, Scale(ClassLoss(example.option_sequences, example.label,
                                 config.pooling),
                       config.lambda));
}

std::vector<int64_t> LanguageModel::Generate(std::span<const int64_t> prompt,
                                             const LMTrainConfig& config,
                                             int64_t period_id,
                                             Rng* rng) const {
  config.Validate();
  if (config.decode == DecodeMode::kTopK && rng == nullptr) {
    throw std::invalid_argument("top-k decoding needs a random generator");
  }
  NoGradGuard no_grad;
  const int64_t max_length = encoder_.config().max_length;
  std::vector<int64_t> context(prompt.begin(), prompt.end());
  if (context.empty()) context.push_back(kSepId);
  std::vector<int64_t> generated;
  for (int64_t step = 0; step < config.max_new_tokens; ++step) {
    if (static_cast<int64_t>(context.size()) >= max_length) {
      context.erase(context.begin(),
                    context.end() - (max_length - 1));
    }
    Tensor features = CausalEncode(context, encoder_);
    Tensor last = SliceCols(features, features.cols() - 1, 1);
    Tensor logits = AddBias(MatMul(vocab_weight_, last), vocab_bias_);
    const auto lv = logits.values();
    int64_t next = 0;
    if (config.decode == DecodeMode::kGreedy) {
      next = static_cast<int64_t>(std::max_element(lv.begin(), lv.end()) -
                                  lv.begin());
    } else {
      std::vector<int64_t> ranked(lv.size());
      std::iota(ranked.begin(), ranked.end(), 0);
      const int64_t k =
          std::min<int64_t>(config.top_k, static_cast<int64_t>(lv.size()));
      std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end(),
                        [&](int64_t a, int64_t b) {
                          return lv[a] > lv[b] || (lv[a] == lv[b] && a < b);
                        });
      std::vector<double> weights(k);
      double total = 0.0;
      for (int64_t i = 0; i < k; ++i) {
        weights[i] = std::exp(lv[ranked[i]] - lv[ranked[0]]);
        total += weights[i];
      }
      double draw = rng->Uniform() * total;
      next = ranked[k - 1];
      for (int64_t i = 0; i < k; ++i) {
        draw -= weights[i];
        if (draw < 0.0) {
          next = ranked[i];
          break;
        }
      }
    }
    if (next == kEosId) break;
    generated.push_back(next);
    context.push_back(next);
    if (config.stop_at_period && next == period_id) break;
  }
  return generated;
}

double LanguageModel::Perplexity(
    std::span<const std::vector<int64_t>> corpus) const {
  if (corpus.empty()) throw std::invalid_argument("perplexity of empty corpus");
  NoGradGuard no_grad;
  double total = 0.0;
  int64_t tokens = 0;
  for (const auto& seq : corpus) {
    NllSum nll = SequenceNll(seq);
    total += nll.total.item();
    tokens += nll.tokens;
  }
  return std::exp(total / static_cast<double>(tokens));
}

std::vector<double> TrainLanguageModel(
    const LanguageModel& model, ParameterSet& params,
    const std::vector<std::vector<int64_t>>& sequences,
    TrainSchedule schedule, const EpochCallback& on_epoch) {
  return RunEpochs(
      sequences, params, schedule,
      [&](const std::vector<const std::vector<int64_t>*>& batch) {
        std::vector<std::vector<int64_t>> seqs;
        seqs.reserve(batch.size());
        for (const auto* s : batch) seqs.push_back(*s);
        return model.LmLoss(seqs);
      },
      on_epoch);
}

std::vector<double> TrainJoint(const LanguageModel& model,
                               ParameterSet& params,
                               const std::vector<JointExample>& examples,
                               const LMTrainConfig& config,
                               TrainSchedule schedule,
                               const EpochCallback& on_epoch) {
  config.Validate();
  return RunEpochs(
      examples, params, schedule,
      [&](const std::vector<const JointExample*>& batch) {
        Tensor total;
        for (const JointExample* ex : batch) {
          Tensor loss = model.TotalLoss(*ex, config);
          total = total.defined() ? Add(total, loss) : loss;
        }
        return Scale(total, 1.0 / static_cast<double>(batch.size()));
      },
      on_epoch);
}

}  // namespace cegi
