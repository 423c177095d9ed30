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

#include "cegi/pipeline/reader.h"

#include <algorithm>
#include <stdexcept>

#include "cegi/encoder/packing.h"
#include "cegi/encoder/tokenizer.h"
#include "cegi/numerics/ops.h"

namespace cegi {
namespace {

int64_t RoundUp4(int64_t n) { return (n + 3) / 4 * 4; }

int64_t Len(const std::vector<int64_t>& ids) {
  return static_cast<int64_t>(ids.size());
}

EncoderConfig WithVocab(EncoderConfig config, int64_t vocab_size) {
  config.vocab_size = vocab_size;
  config.Validate();
  return config;
}

}  // namespace

TokenizedSample TokenizeSample(const Sample& sample, const Vocabulary& vocab,
                               int64_t max_length) {
  TokenizedSample out;
  out.id = sample.id;
  out.label = sample.label;
  out.paragraph = Tokenize(sample.paragraph, vocab);
  out.question = Tokenize(sample.question, vocab);
  for (const auto& option : sample.options) {
    out.options.push_back(Tokenize(option, vocab));
  }
  out.evidence = Tokenize(sample.EvidenceText(), vocab);

  int64_t longest_option = 0;
  for (const auto& option : out.options) {
    longest_option = std::max(longest_option, Len(option));
  }
  const int64_t budget = max_length - kWidthSlack;
  int64_t total = 4 + Len(out.paragraph) + Len(out.question) + longest_option +
                  Len(out.evidence);
  if (total > budget) {
    const int64_t cut = std::min(total - budget, Len(out.paragraph));
    out.paragraph.erase(out.paragraph.begin(), out.paragraph.begin() + cut);
    total -= cut;
  }
  if (total > budget) {
    const int64_t cut = std::min(total - budget, Len(out.evidence));
    out.evidence.resize(out.evidence.size() - cut);
    total -= cut;
  }
  if (total > budget) {
    throw PackingError("sample " + sample.id +
                       ": question and option exceed the length budget");
  }
  return out;
}

BatchWidths ComputeBatchWidths(std::span<const TokenizedSample* const> batch) {
  BatchWidths widths;
  for (const TokenizedSample* sample : batch) {
    widths.paragraph = std::max(widths.paragraph, Len(sample->paragraph));
    widths.question = std::max(widths.question, Len(sample->question));
    for (const auto& option : sample->options) {
      widths.option = std::max(widths.option, Len(option));
    }
    widths.evidence = std::max(widths.evidence, Len(sample->evidence));
  }
  widths.paragraph = RoundUp4(widths.paragraph);
  widths.question = RoundUp4(widths.question);
  widths.option = RoundUp4(widths.option);
  widths.evidence = RoundUp4(widths.evidence);
  return widths;
}

BatchWidths ComputeBatchWidths(const TokenizedSample& sample) {
  const TokenizedSample* one[] = {&sample};
  return ComputeBatchWidths(one);
}

ReaderModel::ReaderModel(const PipelineConfig& config, int64_t vocab_size,
                         ParameterSet& params, Rng& rng)
    : config_(config),
      options_(0),
      encoder_(WithVocab(config.encoder, vocab_size), params, "reader.encoder",
               rng),
      injection_(config.encoder.dim, config.share_injection, params,
                 "reader.injection", rng),
      kernels_(MultiGrainKernels::Create(3 * config.encoder.dim, params,
                                         "reader.multigrain", rng)) {
  config_.encoder.vocab_size = vocab_size;
  options_ = config.options;
  if (config.head == HeadKind::kCapsule) {
    CapsuleHeadConfig head;
    head.channels = 3 * config.encoder.dim;
    head.options = options_;
    head.routing = config.routing;
    head.max_inputs = config.max_inputs;
    head.vote_init_scale = config.vote_init_scale;
    capsule_ = std::make_unique<CapsuleHead>(head, params, "reader.capsule", rng);
  } else {
    maxpool_ = std::make_unique<MaxPoolHead>(3 * config.encoder.dim, params,
                                             "reader.maxpool", rng);
  }
}

FinalRepresentation ReaderModel::Represent(const TokenizedSample& sample,
                                           const BatchWidths& widths) const {
  if (static_cast<int64_t>(sample.options.size()) != options_) {
    throw std::invalid_argument("sample " + sample.id + " has " +
                                std::to_string(sample.options.size()) +
                                " options; reader expects " +
                                std::to_string(options_));
  }
  PackOptions pack;
  pack.max_length = config_.encoder.max_length;
  pack.paragraph_width = widths.paragraph;
  pack.question_width = widths.question;
  pack.option_width = widths.option;
  pack.evidence_width = widths.evidence;
  std::vector<OptionBlock> blocks;
  blocks.reserve(sample.options.size());
  for (const auto& option : sample.options) {
    PackedInput packed = PackInput(sample.paragraph, sample.question, option,
                                   sample.evidence, pack);
    EncoderOutput encoded = Encode(packed, encoder_);
    blocks.push_back(BuildOptionBlock(encoded, injection_));
  }
  return AssembleFinal(blocks);
}

ReaderOutput ReaderModel::Forward(const TokenizedSample& sample,
                                  const BatchWidths& widths) const {
  FinalRepresentation final_rep = Represent(sample, widths);
  MultiGrainFeatures phrases = MultiGrain(final_rep.features, kernels_);
  ReaderOutput out;
  out.layout = final_rep.layout;
  out.phrase_columns = phrases.combined.cols();
  if (capsule_) {
    RoutingResult routed = capsule_->Forward(phrases, final_rep.layout);
    out.scores = CapsuleNorms(routed.capsules);
    if (sample.label) {
      out.loss = MarginLoss(routed.capsules, *sample.label, config_.margin);
    }
  } else {
    Tensor scores = maxpool_->Forward(phrases, final_rep.layout);
    out.scores.assign(scores.values().begin(), scores.values().end());
    if (sample.label) out.loss = OptionCrossEntropy(scores, *sample.label);
  }
  out.prediction = Predict(out.scores);
  return out;
}

int64_t OptionCount(std::span<const Sample> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  const int64_t m = samples.front().num_options();
  for (const Sample& sample : samples) {
    if (sample.num_options() != m) {
      throw std::invalid_argument("sample " + sample.id + " has " +
                                  std::to_string(sample.num_options()) +
                                  " options, expected " + std::to_string(m));
    }
  }
  return m;
}

}  // namespace cegi
