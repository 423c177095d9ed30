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

#include "cegi/pipeline/config.h"

#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace cegi {
namespace {

std::string Trim(const std::string& text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

int64_t ToInt(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int64_t out = std::stoll(value, &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "' expects an integer, got '" +
                    value + "'");
}

double ToDouble(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double out = std::stod(value, &used);
    if (used == value.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "' expects a number, got '" +
                    value + "'");
}

bool ToBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config key '" + key + "' expects true or false");
}

std::string FormatDouble(double value) {
  std::ostringstream out;
  out << std::setprecision(17) << value;
  return out.str();
}

}  // namespace

const char* EvidenceSourcesName(EvidenceSources sources) {
  switch (sources) {
    case EvidenceSources::kNone: return "none";
    case EvidenceSources::kTextual: return "textual";
    case EvidenceSources::kFactual: return "factual";
    case EvidenceSources::kBoth: return "both";
  }
  return "none";
}

const char* VoteSharingName(VoteSharing sharing) {
  switch (sharing) {
    case VoteSharing::kPerOutput: return "per-output";
    case VoteSharing::kPerPair: return "per-pair";
    case VoteSharing::kOwnerRelative: return "owner-relative";
  }
  return "per-output";
}

const char* HeadKindName(HeadKind head) {
  return head == HeadKind::kCapsule ? "capsule" : "maxpool";
}

void PipelineConfig::Set(const std::string& key, const std::string& value) {
  if (key == "dim") {
    encoder.dim = ToInt(key, value);
  } else if (key == "layers") {
    encoder.layers = ToInt(key, value);
  } else if (key == "heads") {
    encoder.heads = ToInt(key, value);
  } else if (key == "ffn_dim") {
    encoder.ffn_dim = ToInt(key, value);
  } else if (key == "max_length") {
    encoder.max_length = ToInt(key, value);
  } else if (key == "vocab_cap") {
    vocab_cap = ToInt(key, value);
  } else if (key == "share_injection") {
    share_injection = ToBool(key, value);
  } else if (key == "options") {
    options = ToInt(key, value);
  } else if (key == "head") {
    if (value == "capsule") {
      head = HeadKind::kCapsule;
    } else if (value == "maxpool") {
      head = HeadKind::kMaxPool;
    } else {
      throw ConfigError("head must be capsule or maxpool");
    }
  } else if (key == "routing_iterations") {
    routing.iterations = static_cast<int>(ToInt(key, value));
  } else if (key == "capsule_dim") {
    routing.capsule_dim = ToInt(key, value);
  } else if (key == "routing_scope") {
    if (value == "all") {
      routing.scope = RoutingScope::kAllOptions;
    } else if (value == "per-option") {
      routing.scope = RoutingScope::kPerOption;
    } else {
      throw ConfigError("routing_scope must be all or per-option");
    }
  } else if (key == "vote_sharing") {
    if (value == "per-output") {
      routing.sharing = VoteSharing::kPerOutput;
    } else if (value == "per-pair") {
      routing.sharing = VoteSharing::kPerPair;
    } else if (value == "owner-relative") {
      routing.sharing = VoteSharing::kOwnerRelative;
    } else {
      throw ConfigError(
          "vote_sharing must be per-output, per-pair or owner-relative");
    }
  } else if (key == "max_inputs") {
    max_inputs = ToInt(key, value);
  } else if (key == "vote_init_scale") {
    vote_init_scale = ToDouble(key, value);
  } else if (key == "margin_plus") {
    margin.m_plus = ToDouble(key, value);
  } else if (key == "margin_minus") {
    margin.m_minus = ToDouble(key, value);
  } else if (key == "margin_lambda") {
    margin.lambda = ToDouble(key, value);
  } else if (key == "batch_size") {
    batch_size = ToInt(key, value);
  } else if (key == "learning_rate") {
    learning_rate = ToDouble(key, value);
  } else if (key == "warmup_proportion") {
    warmup_proportion = ToDouble(key, value);
  } else if (key == "clip_norm") {
    clip_norm = ToDouble(key, value);
  } else if (key == "epochs") {
    epochs = ToInt(key, value);
  } else if (key == "patience") {
    patience = ToInt(key, value);
  } else if (key == "evidence") {
    if (value == "none") {
      evidence = EvidenceSources::kNone;
    } else if (value == "textual") {
      evidence = EvidenceSources::kTextual;
    } else if (value == "factual") {
      evidence = EvidenceSources::kFactual;
    } else if (value == "both") {
      evidence = EvidenceSources::kBoth;
    } else {
      throw ConfigError("evidence must be none, textual, factual or both");
    }
  } else if (key == "max_factual_sentences") {
    max_factual_sentences = ToInt(key, value);
  } else if (key == "filter_top_k") {
    filter.top_k = ToInt(key, value);
  } else if (key == "filter_object_slack") {
    filter.object_slack = ToInt(key, value);
  } else if (key == "filter_max_objects") {
    filter.max_objects = ToInt(key, value);
  } else if (key == "filter_mode") {
    if (value == "rank") {
      filter.mode = FrequencyRule::kRank;
    } else if (value == "count") {
      filter.mode = FrequencyRule::kCount;
    } else {
      throw ConfigError("filter_mode must be rank or count");
    }
  } else if (key == "seed") {
    seed = static_cast<uint64_t>(ToInt(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void PipelineConfig::Validate() const {
  EncoderConfig probe = encoder;
  if (probe.vocab_size <= 0) probe.vocab_size = 8;
  try {
    probe.Validate();
    margin.Validate();
    filter.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (routing.iterations < 1) throw ConfigError("routing_iterations must be >= 1");
  if (routing.capsule_dim < 1) throw ConfigError("capsule_dim must be >= 1");
  if (options < 2) throw ConfigError("options must be >= 2");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (learning_rate < 0.0) throw ConfigError("learning_rate must be >= 0");
  if (warmup_proportion < 0.0 || warmup_proportion > 1.0) {
    throw ConfigError("warmup_proportion must lie in [0, 1]");
  }
  if (clip_norm < 0.0) throw ConfigError("clip_norm must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (max_factual_sentences < 0) {
    throw ConfigError("max_factual_sentences must be >= 0");
  }
  if (vocab_cap < 6) throw ConfigError("vocab_cap must be at least 6");
  if (!(vote_init_scale > 0.0)) throw ConfigError("vote_init_scale must be > 0");
  if (routing.sharing == VoteSharing::kPerPair && max_inputs < 1) {
    throw ConfigError("per-pair vote sharing needs max_inputs >= 1");
  }
}

std::string PipelineConfig::Serialize() const {
  std::ostringstream out;
  out << "dim = " << encoder.dim << '\n'
      << "layers = " << encoder.layers << '\n'
      << "heads = " << encoder.heads << '\n'
      << "ffn_dim = " << encoder.ffn_dim << '\n'
      << "max_length = " << encoder.max_length << '\n'
      << "vocab_cap = " << vocab_cap << '\n'
      << "share_injection = " << (share_injection ? "true" : "false") << '\n'
      << "options = " << options << '\n'
      << "head = " << HeadKindName(head) << '\n'
      << "routing_iterations = " << routing.iterations << '\n'
      << "capsule_dim = " << routing.capsule_dim << '\n'
      << "routing_scope = "
      << (routing.scope == RoutingScope::kAllOptions ? "all" : "per-option")
      << '\n'
      << "vote_sharing = " << VoteSharingName(routing.sharing) << '\n'
      << "max_inputs = " << max_inputs << '\n'
      << "vote_init_scale = " << FormatDouble(vote_init_scale) << '\n'
      << "margin_plus = " << FormatDouble(margin.m_plus) << '\n'
      << "margin_minus = " << FormatDouble(margin.m_minus) << '\n'
      << "margin_lambda = " << FormatDouble(margin.lambda) << '\n'
      << "batch_size = " << batch_size << '\n'
      << "learning_rate = " << FormatDouble(learning_rate) << '\n'
      << "warmup_proportion = " << FormatDouble(warmup_proportion) << '\n'
      << "clip_norm = " << FormatDouble(clip_norm) << '\n'
      << "epochs = " << epochs << '\n'
      << "patience = " << patience << '\n'
      << "evidence = " << EvidenceSourcesName(evidence) << '\n'
      << "max_factual_sentences = " << max_factual_sentences << '\n'
      << "filter_top_k = " << filter.top_k << '\n'
      << "filter_object_slack = " << filter.object_slack << '\n'
      << "filter_max_objects = " << filter.max_objects << '\n'
      << "filter_mode = "
      << (filter.mode == FrequencyRule::kRank ? "rank" : "count") << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

std::string Fnv1aHex(const std::string& bytes) {
  uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

std::string PipelineConfig::Fingerprint() const { return Fnv1aHex(Serialize()); }

std::map<std::string, std::string> ParseKeyValues(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    std::string key = Trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_number) +
                        ": empty key");
    }
    values[key] = Trim(line.substr(eq + 1));
  }
  return values;
}

PipelineConfig PipelineConfig::Parse(const std::string& text) {
  PipelineConfig config;
  for (const auto& [key, value] : ParseKeyValues(text)) config.Set(key, value);
  config.Validate();
  return config;
}

PipelineConfig PipelineConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return Parse(text.str());
}

void PipelineConfig::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path);
  out << Serialize();
}

}  // namespace cegi
