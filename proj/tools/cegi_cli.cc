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

// Command-line front end: dataset synthesis, generator training, evidence
// generation, reader training, evaluation and prediction.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cegi/encoder/tokenizer.h"
#include "cegi/factual/knowledge_store.h"
#include "cegi/factual/lexicon.h"
#include "cegi/factual/triple_completion.h"
#include "cegi/pipeline/config.h"
#include "cegi/pipeline/dataset.h"
#include "cegi/pipeline/evidence.h"
#include "cegi/pipeline/generators.h"
#include "cegi/pipeline/synth.h"
#include "cegi/pipeline/trainer.h"

namespace {

using namespace cegi;

constexpr int kUsageError = 2;

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// --config file, then --set key=value overrides, then dedicated flags.
struct ConfigFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string head;
  std::string evidence;
  int64_t seed = -1;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override a setting, key=value");
    app->add_option("--head", head, "Answer head")
        ->check(CLI::IsMember({"capsule", "maxpool"}));
    app->add_option("--evidence-sources", evidence, "Evidence sources")
        ->check(CLI::IsMember({"none", "textual", "factual", "both"}));
    app->add_option("--seed", seed, "Random seed");
  }

  PipelineConfig Resolve() const {
    PipelineConfig config;
    if (!config_path.empty()) config = PipelineConfig::Load(config_path);
    for (const auto& item : overrides) {
      const size_t eq = item.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("--set expects key=value, got '" + item + "'");
      }
      const auto values = ParseKeyValues(item);
      for (const auto& [key, value] : values) config.Set(key, value);
    }
    if (!head.empty()) config.Set("head", head);
    if (!evidence.empty()) config.Set("evidence", evidence);
    if (seed >= 0) config.seed = static_cast<uint64_t>(seed);
    config.Validate();
    return config;
  }
};

std::vector<Sample> LoadWithEvidence(const std::string& data,
                                     const std::string& evidence,
                                     const PipelineConfig& config) {
  std::vector<Sample> samples = LoadDataset(data);
  std::vector<EvidenceRecord> records;
  if (!evidence.empty()) records = LoadEvidence(evidence);
  AttachEvidence(samples, records, config.evidence,
                 config.max_factual_sentences);
  return samples;
}

struct GeneratorFlags {
  int64_t dim = 64;
  int64_t layers = 2;
  int64_t heads = 4;
  int64_t max_length = 256;
  int64_t batch_size = 16;
  double learning_rate = 1e-3;
  int64_t seed = 1;

  void Register(CLI::App* app) {
    app->add_option("--dim", dim, "Model width")->capture_default_str();
    app->add_option("--layers", layers, "Transformer layers")->capture_default_str();
    app->add_option("--heads", heads, "Attention heads")->capture_default_str();
    app->add_option("--max-length", max_length, "Longest sequence")
        ->capture_default_str();
    app->add_option("--batch-size", batch_size, "Minibatch size")
        ->capture_default_str();
    app->add_option("--lr", learning_rate, "Learning rate")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  GeneratorTraining Training() const {
    GeneratorTraining training;
    training.encoder.dim = dim;
    training.encoder.layers = layers;
    training.encoder.heads = heads;
    training.encoder.max_length = max_length;
    training.batch_size = batch_size;
    training.learning_rate = learning_rate;
    training.seed = static_cast<uint64_t>(seed);
    training.on_epoch = [](const std::string& phase, int64_t epoch, double loss) {
      std::cerr << phase << " epoch " << epoch << " loss " << loss << '\n';
    };
    return training;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence generation and injection for multiple-choice reading"};
  app.require_subcommand(1);

  // synth
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  SynthSpec spec;
  int64_t synth_seed = 1;
  std::string synth_mode = "required";
  std::string synth_out, synth_evidence_out;
  synth->add_option("--n", spec.samples, "Number of samples")->required();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--mode", synth_mode, "Evidence dependency")
      ->check(CLI::IsMember({"required", "none"}))
      ->capture_default_str();
  synth->add_flag("--similar", spec.similar_distractors,
                  "Options differ in a single word");
  synth->add_option("--options", spec.options, "Options per sample")
      ->capture_default_str();
  synth->add_option("--vocab", spec.vocab_size, "Content vocabulary size")
      ->capture_default_str();
  synth->add_option("--id-prefix", spec.id_prefix, "Sample id prefix")
      ->capture_default_str();
  synth->add_option("--out", synth_out, "Dataset output")->required();
  synth->add_option("--evidence-out", synth_evidence_out, "Gold evidence output");

  // ingest-kg
  CLI::App* ingest = app.add_subcommand("ingest-kg", "Normalize triple files");
  std::vector<std::string> ingest_inputs;
  std::string ingest_out, ingest_templates;
  ingest->add_option("--triples", ingest_inputs, "Triple files")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_option("--templates", ingest_templates, "Relation template file")
      ->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Deduplicated triple output")->required();

  // train-textual-gen
  CLI::App* textual = app.add_subcommand(
      "train-textual-gen", "Train the textual evidence generator");
  GeneratorFlags textual_flags;
  textual_flags.Register(textual);
  std::string textual_data, textual_corpus, textual_out;
  int64_t pretrain_epochs = 5, finetune_epochs = 5;
  double lambda = 0.5;
  textual->add_option("--data", textual_data, "Labeled dataset")
      ->required()
      ->check(CLI::ExistingFile);
  textual->add_option("--corpus", textual_corpus, "Pretraining sentences")
      ->check(CLI::ExistingFile);
  textual->add_option("--pretrain-epochs", pretrain_epochs)->capture_default_str();
  textual->add_option("--finetune-epochs", finetune_epochs)->capture_default_str();
  textual->add_option("--lambda", lambda, "Classification loss weight")
      ->capture_default_str();
  textual->add_option("--out", textual_out, "Checkpoint path")->required();

  // train-completion
  CLI::App* completion = app.add_subcommand(
      "train-completion", "Train the triple completion model");
  GeneratorFlags completion_flags;
  completion_flags.Register(completion);
  std::string completion_triples, completion_out;
  int64_t completion_epochs = 20;
  completion->add_option("--triples", completion_triples, "Triple file")
      ->required()
      ->check(CLI::ExistingFile);
  completion->add_option("--epochs", completion_epochs)->capture_default_str();
  completion->add_option("--out", completion_out, "Checkpoint path")->required();

  // gen-evidence
  CLI::App* gen = app.add_subcommand("gen-evidence", "Generate evidence records");
  ConfigFlags gen_config;
  gen_config.Register(gen);
  std::string gen_data, gen_out, gen_textual, gen_completion, gen_triples,
      gen_freq;
  std::vector<std::string> gen_relations = {"AtLocation", "CapableOf",
                                            "HasProperty", "IsA", "UsedFor"};
  int64_t gen_max_tokens = 40;
  gen->add_option("--data", gen_data, "Dataset")->required()->check(CLI::ExistingFile);
  gen->add_option("--textual-model", gen_textual, "Textual generator checkpoint");
  gen->add_option("--completion-model", gen_completion,
                  "Triple completion checkpoint");
  gen->add_option("--completion-relations", gen_relations,
                  "Relations to complete per entity");
  gen->add_option("--triples", gen_triples, "Knowledge triples")
      ->check(CLI::ExistingFile);
  gen->add_option("--freq", gen_freq, "Word frequency table")
      ->check(CLI::ExistingFile);
  gen->add_option("--max-new-tokens", gen_max_tokens)->capture_default_str();
  gen->add_option("--out", gen_out, "Evidence output")->required();

  // train-reader
  CLI::App* train = app.add_subcommand("train-reader", "Train the reader");
  ConfigFlags train_config;
  train_config.Register(train);
  std::string train_data, dev_data, train_evidence, train_out;
  train->add_option("--train", train_data, "Training dataset")
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--dev", dev_data, "Development dataset")
      ->check(CLI::ExistingFile);
  train->add_option("--evidence", train_evidence, "Evidence records")
      ->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Checkpoint path")->required();

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a trained reader");
  std::string eval_data, eval_checkpoint, eval_evidence, eval_report;
  eval->add_option("--data", eval_data, "Dataset")->required()->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", eval_checkpoint, "Reader checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--evidence", eval_evidence, "Evidence records")
      ->check(CLI::ExistingFile);
  eval->add_option("--report", eval_report, "Report output (default stdout)");

  // predict
  CLI::App* predict = app.add_subcommand("predict", "Write predictions");
  std::string predict_data, predict_checkpoint, predict_evidence, predict_out;
  predict->add_option("--data", predict_data, "Dataset")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--checkpoint", predict_checkpoint, "Reader checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  predict->add_option("--evidence", predict_evidence, "Evidence records")
      ->check(CLI::ExistingFile);
  predict->add_option("--out", predict_out, "Prediction output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (synth->parsed()) {
      spec.dependency = synth_mode == "none" ? EvidenceDependency::kNone
                                             : EvidenceDependency::kRequired;
      SynthData data = SynthTask(spec, static_cast<uint64_t>(synth_seed));
      SaveDataset(synth_out, data.samples);
      if (!synth_evidence_out.empty()) {
        SaveEvidence(synth_evidence_out, data.gold_evidence);
      }
      std::cerr << "wrote " << data.samples.size() << " samples\n";
    } else if (ingest->parsed()) {
      KnowledgeStore store = ingest_templates.empty()
                                 ? KnowledgeStore()
                                 : KnowledgeStore(RelationTemplates::Load(
                                       ingest_templates));
      for (const auto& path : ingest_inputs) {
        IngestReport report = store.IngestFile(path);
        for (const auto& line : report.diagnostics) {
          std::cerr << path << ": " << line << '\n';
        }
        std::cerr << path << ": rows " << report.rows << ", accepted "
                  << report.accepted << ", duplicates " << report.duplicates
                  << ", skipped " << report.skipped << '\n';
      }
      store.ExportFile(ingest_out);
    } else if (textual->parsed()) {
      GeneratorTraining training = textual_flags.Training();
      training.pretrain_epochs = pretrain_epochs;
      training.finetune_epochs = finetune_epochs;
      training.lm.lambda = lambda;
      std::vector<Sample> samples = LoadDataset(textual_data);
      std::vector<std::string> corpus;
      if (!textual_corpus.empty()) corpus = ReadLines(textual_corpus);
      LanguageModelBundle bundle =
          TrainTextualGenerator(samples, corpus, training);
      SaveLanguageModel(bundle, textual_out);
    } else if (completion->parsed()) {
      GeneratorTraining training = completion_flags.Training();
      training.pretrain_epochs = completion_epochs;
      KnowledgeStore store;
      store.IngestFile(completion_triples);
      LanguageModelBundle bundle = TrainCompletionModel(store, training);
      SaveLanguageModel(bundle, completion_out);
    } else if (gen->parsed()) {
      const PipelineConfig config = gen_config.Resolve();
      const bool want_textual = config.evidence == EvidenceSources::kTextual ||
                                config.evidence == EvidenceSources::kBoth;
      const bool want_factual = config.evidence == EvidenceSources::kFactual ||
                                config.evidence == EvidenceSources::kBoth;
      if (want_textual && gen_textual.empty()) {
        throw CLI::RequiredError("--textual-model");
      }
      if (want_factual && gen_triples.empty()) {
        throw CLI::RequiredError("--triples");
      }
      std::vector<Sample> samples = LoadDataset(gen_data);

      std::unique_ptr<LanguageModelBundle> textual_model;
      std::unique_ptr<TextualEvidenceGenerator> textual_gen;
      if (want_textual) {
        textual_model = std::make_unique<LanguageModelBundle>(
            LoadLanguageModel(gen_textual));
        LMTrainConfig decoding;
        decoding.max_new_tokens = gen_max_tokens;
        decoding.seed = config.seed;
        textual_gen = std::make_unique<TextualEvidenceGenerator>(
            *textual_model->model, textual_model->vocab, decoding);
      }

      KnowledgeStore store;
      FrequencyTable frequencies;
      std::unique_ptr<LanguageModelBundle> completion_model;
      std::unique_ptr<TripleCompleter> completer;
      std::unique_ptr<FactualEvidenceGenerator> factual_gen;
      if (want_factual) {
        store.IngestFile(gen_triples);
        if (!gen_freq.empty()) {
          frequencies = FrequencyTable::Load(gen_freq);
        } else {
          std::vector<std::vector<std::string>> words;
          for (const Sample& sample : samples) {
            for (auto& text : SampleWords(sample)) words.push_back(std::move(text));
          }
          frequencies = FrequencyTable::FromCorpus(words);
        }
        factual_gen = std::make_unique<FactualEvidenceGenerator>(
            store, frequencies, PosLexicon::Bundled(), config.filter,
            config.max_factual_sentences);
        if (!gen_completion.empty()) {
          completion_model = std::make_unique<LanguageModelBundle>(
              LoadLanguageModel(gen_completion));
          completer = std::make_unique<TripleCompleter>(
              *completion_model->model, completion_model->vocab,
              store.templates());
          factual_gen->EnableCompletion(completer.get(), gen_relations);
        }
      }
      std::vector<EvidenceRecord> records =
          GenerateEvidence(samples, textual_gen.get(), factual_gen.get());
      SaveEvidence(gen_out, records);
      std::cerr << "wrote " << records.size() << " evidence records\n";
    } else if (train->parsed()) {
      const PipelineConfig config = train_config.Resolve();
      std::vector<Sample> samples =
          LoadWithEvidence(train_data, train_evidence, config);
      std::vector<Sample> dev;
      if (!dev_data.empty()) dev = LoadWithEvidence(dev_data, train_evidence, config);
      PipelineConfig sized = config;
      sized.options = OptionCount(samples);
      Reader reader = CreateReader(
          sized, BuildReaderVocabulary(samples, config.vocab_cap));
      TrainOptions options;
      options.checkpoint_path = train_out;
      options.on_epoch = [](int64_t epoch, double loss, double accuracy) {
        std::cerr << "epoch " << epoch << " loss " << loss;
        if (accuracy == accuracy) std::cerr << " dev accuracy " << accuracy;
        std::cerr << '\n';
      };
      TrainResult result = TrainReader(reader, samples, dev, options);
      SaveReader(reader, train_out);
      std::ostringstream curve;
      for (double loss : result.epoch_losses) curve << loss << '\n';
      WriteText(train_out + ".curve", curve.str());
    } else if (eval->parsed()) {
      Reader reader = LoadReader(eval_checkpoint);
      std::vector<Sample> samples =
          LoadWithEvidence(eval_data, eval_evidence, reader.config);
      std::string output;
      if (!AllLabeled(samples)) {
        std::cerr << "dataset has unlabeled samples; writing predictions "
                     "only\n";
        output = FormatPredictions(PredictSamples(reader, samples));
      } else {
        EvalReport report = Evaluate(reader, samples);
        const std::string curve_path = eval_checkpoint + ".curve";
        if (std::filesystem::exists(curve_path)) {
          for (const auto& line : ReadLines(curve_path)) {
            report.loss_curve.push_back(std::stod(line));
          }
        }
        output = report.Serialize();
      }
      if (eval_report.empty()) {
        std::cout << output;
      } else {
        WriteText(eval_report, output);
      }
    } else if (predict->parsed()) {
      Reader reader = LoadReader(predict_checkpoint);
      std::vector<Sample> samples =
          LoadWithEvidence(predict_data, predict_evidence, reader.config);
      const std::string output =
          FormatPredictions(PredictSamples(reader, samples));
      if (predict_out.empty()) {
        std::cout << output;
      } else {
        WriteText(predict_out, output);
      }
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
