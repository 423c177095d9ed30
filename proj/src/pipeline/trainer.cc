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

#include "cegi/pipeline/trainer.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "cegi/encoder/tokenizer.h"
#include "cegi/numerics/checkpoint.h"
#include "cegi/numerics/ops.h"
#include "cegi/numerics/optimizer.h"

namespace cegi {
namespace {

constexpr uint64_t kShuffleStream = 0x9e3779b97f4a7c15ULL;

std::vector<TokenizedSample> TokenizeAll(std::span<const Sample> samples,
                                         const Reader& reader) {
  std::vector<TokenizedSample> out;
  out.reserve(samples.size());
  for (const Sample& sample : samples) {
    out.push_back(
        TokenizeSample(sample, reader.vocab, reader.config.encoder.max_length));
  }
  return out;
}

std::vector<std::vector<double>> Snapshot(const ParameterSet& params) {
  std::vector<std::vector<double>> values;
  for (const auto& entry : params.entries()) {
    auto v = entry.tensor.values();
    values.emplace_back(v.begin(), v.end());
  }
  return values;
}

void Restore(ParameterSet& params,
             const std::vector<std::vector<double>>& values) {
  for (size_t i = 0; i < values.size(); ++i) {
    auto target = params.entries()[i].tensor.mutable_values();
    std::copy(values[i].begin(), values[i].end(), target.begin());
  }
}

std::string FormatNumber(double value) {
  std::ostringstream out;
  out << std::setprecision(10) << value;
  return out.str();
}

}  // namespace

Vocabulary BuildReaderVocabulary(std::span<const Sample> samples, int64_t cap) {
  std::vector<std::vector<std::string>> corpus;
  for (const Sample& sample : samples) {
    corpus.push_back(SplitWords(sample.paragraph));
    corpus.push_back(SplitWords(sample.question));
    for (const auto& option : sample.options) corpus.push_back(SplitWords(option));
    corpus.push_back(SplitWords(sample.EvidenceText()));
  }
  return Vocabulary::Build(corpus, static_cast<size_t>(cap));
}

Reader CreateReader(const PipelineConfig& config, Vocabulary vocab) {
  config.Validate();
  Reader reader;
  reader.config = config;
  reader.vocab = std::move(vocab);
  reader.config.encoder.vocab_size = reader.vocab.size();
  reader.params = std::make_unique<ParameterSet>();
  Rng rng(config.seed);
  reader.model = std::make_unique<ReaderModel>(reader.config, reader.vocab.size(),
                                               *reader.params, rng);
  return reader;
}

void SaveReader(const Reader& reader, const std::string& path) {
  SaveCheckpoint(*reader.params, path);
  reader.vocab.Save(path + ".vocab");
  reader.config.Save(path + ".config");
}

Reader LoadReader(const std::string& path) {
  PipelineConfig config = PipelineConfig::Load(path + ".config");
  Vocabulary vocab = Vocabulary::Load(path + ".vocab");
  Reader reader = CreateReader(config, std::move(vocab));
  LoadCheckpointInto(*reader.params, path);
  return reader;
}

TrainResult TrainReader(Reader& reader, std::span<const Sample> train,
                        std::span<const Sample> dev,
                        const TrainOptions& options) {
  if (train.empty()) throw std::invalid_argument("no training samples");
  for (const Sample& sample : train) sample.Validate(true);
  const PipelineConfig& config = reader.config;
  const std::vector<TokenizedSample> tokens = TokenizeAll(train, reader);
  const int64_t n = static_cast<int64_t>(tokens.size());
  const int64_t batches = (n + config.batch_size - 1) / config.batch_size;

  OptimizerConfig opt;
  opt.method = OptimizerMethod::kAdam;
  opt.learning_rate = config.learning_rate;
  opt.warmup_proportion = config.warmup_proportion;
  opt.total_steps = config.epochs * batches;
  opt.clip_norm = config.clip_norm;
  Optimizer optimizer(*reader.params, opt);
  Rng shuffle_rng(config.seed ^ kShuffleStream);

  TrainResult result;
  std::vector<std::vector<double>> best_values;
  double best_accuracy = -1.0;
  std::vector<int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int64_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.Shuffle(order);
    double epoch_total = 0.0;
    for (int64_t b = 0; b < batches; ++b) {
      std::vector<const TokenizedSample*> batch;
      for (int64_t i = b * config.batch_size;
           i < std::min(n, (b + 1) * config.batch_size); ++i) {
        batch.push_back(&tokens[order[i]]);
      }
      const BatchWidths widths = ComputeBatchWidths(batch);
      Tensor total;
      for (const TokenizedSample* sample : batch) {
        Tensor loss = reader.model->Forward(*sample, widths).loss;
        total = total.defined() ? Add(total, loss) : loss;
      }
      Tensor loss = Scale(total, 1.0 / static_cast<double>(batch.size()));
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw TrainingAborted("non-finite training loss at epoch " +
                              std::to_string(epoch) + ", step " +
                              std::to_string(result.steps));
      }
      reader.params->ZeroGrad();
      Backward(loss);
      try {
        optimizer.Step();
      } catch (const NonFiniteGradientError& e) {
        throw TrainingAborted(e.what());
      }
      ++result.steps;
      result.step_losses.push_back(value);
      epoch_total += value;
    }
    const double epoch_loss = epoch_total / static_cast<double>(batches);
    result.epoch_losses.push_back(epoch_loss);

    double accuracy = std::nan("");
    bool improved = dev.empty();
    if (!dev.empty()) {
      accuracy = Evaluate(reader, dev).accuracy;
      result.dev_accuracy.push_back(accuracy);
      if (accuracy > best_accuracy) {
        best_accuracy = accuracy;
        improved = true;
      }
    }
    if (improved) {
      result.best_epoch = epoch;
      if (!dev.empty()) best_values = Snapshot(*reader.params);
      if (!options.checkpoint_path.empty()) {
        SaveReader(reader, options.checkpoint_path);
      }
    }
    if (options.on_epoch) options.on_epoch(epoch, epoch_loss, accuracy);
    if (!dev.empty() && epoch - result.best_epoch >= config.patience) {
      result.stopped_early = epoch + 1 < config.epochs;
      break;
    }
  }
  if (!best_values.empty()) Restore(*reader.params, best_values);
  return result;
}

std::vector<Prediction> PredictSamples(const Reader& reader,
                                       std::span<const Sample> samples) {
  NoGradGuard no_grad;
  const std::vector<TokenizedSample> tokens = TokenizeAll(samples, reader);
  const int64_t n = static_cast<int64_t>(tokens.size());
  const int64_t size = reader.config.batch_size;
  std::vector<Prediction> predictions;
  predictions.reserve(n);
  for (int64_t begin = 0; begin < n; begin += size) {
    std::vector<const TokenizedSample*> batch;
    for (int64_t i = begin; i < std::min(n, begin + size); ++i) {
      batch.push_back(&tokens[i]);
    }
    const BatchWidths widths = ComputeBatchWidths(batch);
    for (const TokenizedSample* sample : batch) {
      ReaderOutput out = reader.model->Forward(*sample, widths);
      Prediction prediction;
      prediction.id = sample->id;
      prediction.predicted = out.prediction;
      prediction.scores = std::move(out.scores);
      if (out.loss.defined()) prediction.loss = out.loss.item();
      predictions.push_back(std::move(prediction));
    }
  }
  return predictions;
}

std::string FormatPredictions(std::span<const Prediction> predictions) {
  std::ostringstream out;
  for (const auto& prediction : predictions) {
    out << prediction.id << '\t' << prediction.predicted;
    for (double score : prediction.scores) out << '\t' << FormatNumber(score);
    out << '\n';
  }
  return out.str();
}

std::string EvalReport::Serialize() const {
  std::ostringstream out;
  out << "accuracy: " << std::fixed << std::setprecision(6) << accuracy << '\n'
      << "correct: " << correct << '\n'
      << "total: " << total << '\n'
      << "mean_loss: " << std::setprecision(6) << mean_loss << '\n';
  out.unsetf(std::ios::floatfield);
  for (size_t gold = 0; gold < confusion.size(); ++gold) {
    out << "confusion_gold_" << gold << ":";
    for (int64_t count : confusion[gold]) out << ' ' << count;
    out << '\n';
  }
  out << "loss_curve:";
  for (double loss : loss_curve) out << ' ' << FormatNumber(loss);
  out << '\n'
      << "config_fingerprint: " << config_fingerprint << '\n'
      << "seed: " << seed << '\n';
  return out.str();
}

EvalReport BuildReport(std::span<const Prediction> predictions,
                       std::span<const Sample> samples, int64_t options) {
  if (predictions.size() != samples.size()) {
    throw std::invalid_argument("prediction count does not match samples");
  }
  EvalReport report;
  report.confusion.assign(options, std::vector<int64_t>(options, 0));
  double loss_total = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].label) {
      throw DatasetError("sample " + samples[i].id +
                         " is unlabeled; accuracy is undefined");
    }
    const int64_t gold = *samples[i].label;
    const int64_t predicted = predictions[i].predicted;
    ++report.total;
    if (gold == predicted) ++report.correct;
    ++report.confusion[gold][predicted];
    loss_total += predictions[i].loss;
  }
  if (report.total > 0) {
    report.accuracy = static_cast<double>(report.correct) /
                      static_cast<double>(report.total);
    report.mean_loss = loss_total / static_cast<double>(report.total);
  }
  return report;
}

EvalReport Evaluate(const Reader& reader, std::span<const Sample> samples) {
  for (const Sample& sample : samples) {
    if (!sample.label) {
      throw DatasetError("sample " + sample.id +
                         " is unlabeled; accuracy is undefined");
    }
  }
  std::vector<Prediction> predictions = PredictSamples(reader, samples);
  EvalReport report =
      BuildReport(predictions, samples, reader.model->options());
  report.config_fingerprint = reader.config.Fingerprint();
  report.seed = reader.config.seed;
  return report;
}

}  // namespace cegi
