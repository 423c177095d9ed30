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

#include "cegi/pipeline/generators.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cegi/encoder/tokenizer.h"
#include "cegi/factual/triple_completion.h"
#include "cegi/numerics/checkpoint.h"
#include "cegi/pipeline/config.h"

namespace cegi {
namespace {

// Drops tokens from the front of `paragraph`, then of `question`, so that
// the three parts plus `extra` reserved tokens fit `max_length`.
void FitLength(std::vector<int64_t>& paragraph, std::vector<int64_t>& question,
               std::vector<int64_t>& tail, int64_t extra, int64_t max_length) {
  auto size = [&] {
    return static_cast<int64_t>(paragraph.size() + question.size() +
                                tail.size()) +
           extra;
  };
  for (std::vector<int64_t>* part : {&paragraph, &question}) {
    const int64_t over = size() - max_length;
    if (over <= 0) return;
    const int64_t cut = std::min<int64_t>(over, part->size());
    part->erase(part->begin(), part->begin() + cut);
  }
  const int64_t over = size() - max_length;
  if (over > 0) tail.resize(tail.size() - std::min<int64_t>(over, tail.size()));
}

TrainSchedule Schedule(const GeneratorTraining& training, int64_t epochs,
                       int64_t items) {
  TrainSchedule schedule;
  schedule.epochs = epochs;
  schedule.batch_size = training.batch_size;
  schedule.seed = training.seed;
  schedule.optimizer.learning_rate = training.learning_rate;
  schedule.optimizer.warmup_proportion = training.warmup_proportion;
  schedule.optimizer.total_steps =
      epochs * ((items + training.batch_size - 1) / training.batch_size);
  return schedule;
}

EpochCallback Phase(const GeneratorTraining& training, const std::string& name) {
  if (!training.on_epoch) return {};
  return [&training, name](int64_t epoch, double loss) {
    training.on_epoch(name, epoch, loss);
  };
}

}  // namespace

LanguageModelBundle CreateLanguageModel(EncoderConfig config, Vocabulary vocab) {
  LanguageModelBundle bundle;
  config.vocab_size = vocab.size();
  config.Validate();
  bundle.config = config;
  bundle.vocab = std::move(vocab);
  bundle.params = std::make_unique<ParameterSet>();
  Rng rng(config.seed);
  bundle.model =
      std::make_unique<LanguageModel>(config, *bundle.params, "lm", rng);
  return bundle;
}

std::string SerializeEncoderConfig(const EncoderConfig& config) {
  std::ostringstream out;
  out << "dim = " << config.dim << '\n'
      << "layers = " << config.layers << '\n'
      << "heads = " << config.heads << '\n'
      << "ffn_dim = " << config.ffn_dim << '\n'
      << "max_length = " << config.max_length << '\n'
      << "seed = " << config.seed << '\n';
  return out.str();
}

EncoderConfig ParseEncoderConfig(const std::string& text) {
  EncoderConfig config;
  for (const auto& [key, value] : ParseKeyValues(text)) {
    int64_t number = 0;
    try {
      number = std::stoll(value);
    } catch (const std::exception&) {
      throw ConfigError("encoder setting '" + key + "' is not an integer");
    }
    if (key == "dim") {
      config.dim = number;
    } else if (key == "layers") {
      config.layers = number;
    } else if (key == "heads") {
      config.heads = number;
    } else if (key == "ffn_dim") {
      config.ffn_dim = number;
    } else if (key == "max_length") {
      config.max_length = number;
    } else if (key == "seed") {
      config.seed = static_cast<uint64_t>(number);
    } else {
      throw ConfigError("unknown encoder setting '" + key + "'");
    }
  }
  return config;
}

void SaveLanguageModel(const LanguageModelBundle& bundle,
                       const std::string& path) {
  SaveCheckpoint(*bundle.params, path);
  bundle.vocab.Save(path + ".vocab");
  std::ofstream out(path + ".config");
  if (!out) throw ConfigError("cannot write " + path + ".config");
  out << SerializeEncoderConfig(bundle.config);
}

LanguageModelBundle LoadLanguageModel(const std::string& path) {
  std::ifstream in(path + ".config");
  if (!in) throw ConfigError("cannot open " + path + ".config");
  std::ostringstream text;
  text << in.rdbuf();
  LanguageModelBundle bundle = CreateLanguageModel(
      ParseEncoderConfig(text.str()), Vocabulary::Load(path + ".vocab"));
  LoadCheckpointInto(*bundle.params, path);
  return bundle;
}

JointExample MakeJointExample(const Sample& sample, const Vocabulary& vocab,
                              int64_t max_length) {
  if (!sample.label) {
    throw DatasetError("sample " + sample.id + " has no label");
  }
  JointExample example;
  example.label = *sample.label;
  {
    std::vector<int64_t> p = Tokenize(sample.paragraph, vocab);
    std::vector<int64_t> q = Tokenize(sample.question, vocab);
    std::vector<int64_t> a = Tokenize(sample.options[*sample.label], vocab);
    FitLength(p, q, a, 3, max_length);
    example.lm_sequence = BuildLmSequence(p, q, a);
  }
  for (const auto& option : sample.options) {
    std::vector<int64_t> p = Tokenize(sample.paragraph, vocab);
    std::vector<int64_t> q = Tokenize(sample.question, vocab);
    std::vector<int64_t> o = Tokenize(option, vocab);
    FitLength(p, q, o, 2, max_length);
    example.option_sequences.push_back(BuildOptionSequence(p, q, o));
  }
  return example;
}

LanguageModelBundle TrainTextualGenerator(std::span<const Sample> samples,
                                          std::span<const std::string> corpus,
                                          const GeneratorTraining& training) {
  training.lm.Validate();
  std::vector<std::vector<std::string>> words;
  for (const auto& line : corpus) words.push_back(SplitWords(line));
  for (const Sample& sample : samples) {
    words.push_back(SplitWords(sample.paragraph));
    words.push_back(SplitWords(sample.question));
    for (const auto& option : sample.options) words.push_back(SplitWords(option));
  }
  EncoderConfig encoder = training.encoder;
  encoder.seed = training.seed;
  LanguageModelBundle bundle = CreateLanguageModel(
      encoder, Vocabulary::Build(words, static_cast<size_t>(training.vocab_cap)));
  const int64_t max_length = bundle.config.max_length;

  if (!corpus.empty() && training.pretrain_epochs > 0) {
    std::vector<std::vector<int64_t>> sequences;
    for (const auto& line : corpus) {
      std::vector<int64_t> ids = Tokenize(line, bundle.vocab);
      if (static_cast<int64_t>(ids.size()) >= max_length) {
        ids.resize(max_length - 1);
      }
      ids.push_back(kEosId);
      if (ids.size() >= 2) sequences.push_back(std::move(ids));
    }
    TrainLanguageModel(*bundle.model, *bundle.params, sequences,
                       Schedule(training, training.pretrain_epochs,
                                static_cast<int64_t>(sequences.size())),
                       Phase(training, "pretrain"));
  }
  std::vector<JointExample> examples;
  for (const Sample& sample : samples) {
    if (sample.label) {
      examples.push_back(MakeJointExample(sample, bundle.vocab, max_length));
    }
  }
  if (!examples.empty() && training.finetune_epochs > 0) {
    TrainJoint(*bundle.model, *bundle.params, examples, training.lm,
               Schedule(training, training.finetune_epochs,
                        static_cast<int64_t>(examples.size())),
               Phase(training, "finetune"));
  }
  return bundle;
}

LanguageModelBundle TrainCompletionModel(const KnowledgeStore& store,
                                         const GeneratorTraining& training) {
  if (store.size() == 0) throw std::invalid_argument("empty knowledge store");
  std::vector<std::vector<std::string>> words;
  for (const Triple& triple : store.triples()) words.push_back(TripleWords(triple));
  EncoderConfig encoder = training.encoder;
  encoder.seed = training.seed;
  encoder.max_length = std::max(encoder.max_length, kTripleMaxLength);
  LanguageModelBundle bundle = CreateLanguageModel(
      encoder, Vocabulary::Build(words, static_cast<size_t>(training.vocab_cap)));
  std::vector<std::vector<int64_t>> sequences;
  for (const Triple& triple : store.triples()) {
    sequences.push_back(TripleSequence(triple, bundle.vocab));
  }
  TrainLanguageModel(*bundle.model, *bundle.params, sequences,
                     Schedule(training, training.pretrain_epochs,
                              static_cast<int64_t>(sequences.size())),
                     Phase(training, "completion"));
  return bundle;
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

}  // namespace cegi
