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

#ifndef CEGI_PIPELINE_TRAINER_H_
#define CEGI_PIPELINE_TRAINER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cegi/encoder/vocabulary.h"
#include "cegi/numerics/parameters.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/pipeline/reader.h"

namespace cegi {

class TrainingAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A reader together with everything needed to rebuild it.
struct Reader {
  PipelineConfig config;
  Vocabulary vocab;
  std::unique_ptr<ParameterSet> params;
  std::unique_ptr<ReaderModel> model;
};

// Vocabulary over P, Q, options and attached evidence.
Vocabulary BuildReaderVocabulary(std::span<const Sample> samples,
                                 int64_t cap);

// Fresh reader with parameters drawn from config.seed.
Reader CreateReader(const PipelineConfig& config, Vocabulary vocab);

// Writes the parameters to `path`, the vocabulary to `path`.vocab and the
// configuration to `path`.config.
void SaveReader(const Reader& reader, const std::string& path);
Reader LoadReader(const std::string& path);

struct TrainOptions {
  // Saved after every epoch that becomes the best so far (every epoch
  // without dev data); empty disables.
  std::string checkpoint_path;
  std::function<void(int64_t epoch, double train_loss, double dev_accuracy)>
      on_epoch;
};

struct TrainResult {
  std::vector<double> epoch_losses;  // mean training loss per epoch
  std::vector<double> step_losses;
  std::vector<double> dev_accuracy;  // empty without dev data
  int64_t best_epoch = -1;
  int64_t steps = 0;
  bool stopped_early = false;
};

// Minibatch training of the reader on labeled samples. With dev samples,
// stops after `patience` epochs without a dev accuracy gain and restores
// the best epoch's parameters. A non-finite loss or gradient throws
// TrainingAborted before any parameter is touched, so the last saved
// checkpoint stays the last good one.
TrainResult TrainReader(Reader& reader, std::span<const Sample> train,
                        std::span<const Sample> dev,
                        const TrainOptions& options = {});

struct Prediction {
  std::string id;
  int64_t predicted = 0;
  std::vector<double> scores;
  double loss = 0.0;  // zero for unlabeled samples
};

// Batches of config.batch_size in data order share segment widths.
std::vector<Prediction> PredictSamples(const Reader& reader,
                                       std::span<const Sample> samples);

// "id<TAB>predicted<TAB>score_1<TAB>...<TAB>score_m" lines.
std::string FormatPredictions(std::span<const Prediction> predictions);

struct EvalReport {
  int64_t total = 0;
  int64_t correct = 0;
  double accuracy = 0.0;
  double mean_loss = 0.0;
  // confusion[gold][predicted]
  std::vector<std::vector<int64_t>> confusion;
  std::vector<double> loss_curve;
  std::string config_fingerprint;
  uint64_t seed = 0;

  std::string Serialize() const;
};

// Accuracy is correct / total over argmax predictions. Throws
// DatasetError when any sample is unlabeled.
EvalReport BuildReport(std::span<const Prediction> predictions,
                       std::span<const Sample> samples, int64_t options);
EvalReport Evaluate(const Reader& reader, std::span<const Sample> samples);

}  // namespace cegi

#endif  // CEGI_PIPELINE_TRAINER_H_
