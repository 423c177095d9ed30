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

#ifndef CEGI_PIPELINE_GENERATORS_H_
#define CEGI_PIPELINE_GENERATORS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/transformer.h"
#include "cegi/encoder/vocabulary.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/numerics/parameters.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/textual/language_model.h"

namespace cegi {

// A language model with its vocabulary and configuration.
struct LanguageModelBundle {
  EncoderConfig config;
  Vocabulary vocab;
  std::unique_ptr<ParameterSet> params;
  std::unique_ptr<LanguageModel> model;
};

LanguageModelBundle CreateLanguageModel(EncoderConfig config, Vocabulary vocab);

// Parameters at `path`, vocabulary at `path`.vocab, encoder settings at
// `path`.config.
void SaveLanguageModel(const LanguageModelBundle& bundle,
                       const std::string& path);
LanguageModelBundle LoadLanguageModel(const std::string& path);

std::string SerializeEncoderConfig(const EncoderConfig& config);
EncoderConfig ParseEncoderConfig(const std::string& text);

struct GeneratorTraining {
  EncoderConfig encoder;  // vocab_size is taken from the vocabulary
  LMTrainConfig lm;
  int64_t pretrain_epochs = 5;
  int64_t finetune_epochs = 5;
  int64_t batch_size = 16;
  double learning_rate = 1e-3;
  double warmup_proportion = 0.1;
  int64_t vocab_cap = 20000;
  uint64_t seed = 1;
  // Called with a phase name, the epoch and its mean loss.
  std::function<void(const std::string&, int64_t, double)> on_epoch;
};

// Joint-objective item built from a labeled sample, cut to `max_length`.
JointExample MakeJointExample(const Sample& sample, const Vocabulary& vocab,
                              int64_t max_length);

// Pretrains on `corpus` sentences (language modelling only, if nonempty),
// then fine-tunes on labeled samples with the joint objective.
LanguageModelBundle TrainTextualGenerator(std::span<const Sample> samples,
                                          std::span<const std::string> corpus,
                                          const GeneratorTraining& training);

// Trains the completion model on s [SEP] r [SEP] o [EOS] sequences of every
// stored triple.
LanguageModelBundle TrainCompletionModel(const KnowledgeStore& store,
                                         const GeneratorTraining& training);

// Non-empty lines of a text file.
std::vector<std::string> ReadLines(const std::string& path);

}  // namespace cegi

#endif  // CEGI_PIPELINE_GENERATORS_H_
