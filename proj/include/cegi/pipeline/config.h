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

#ifndef CEGI_PIPELINE_CONFIG_H_
#define CEGI_PIPELINE_CONFIG_H_

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "cegi/capsule/capsule_head.h"
#include "cegi/encoder/transformer.h"
#include "cegi/factual/filter.h"

namespace cegi {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class EvidenceSources { kNone, kTextual, kFactual, kBoth };
enum class HeadKind { kCapsule, kMaxPool };

const char* EvidenceSourcesName(EvidenceSources sources);
const char* HeadKindName(HeadKind head);
const char* VoteSharingName(VoteSharing sharing);

struct PipelineConfig {
  EncoderConfig encoder;  // vocab_size is filled in from the vocabulary
  int64_t vocab_cap = 20000;
  bool share_injection = true;

  int64_t options = 4;  // m
  HeadKind head = HeadKind::kCapsule;
  RoutingConfig routing;
  // L columns covered by per-pair vote maps.
  int64_t max_inputs = 0;
  double vote_init_scale = 0.03;
  MarginLossParams margin;

  int64_t batch_size = 24;
  double learning_rate = 1e-3;
  double warmup_proportion = 0.1;
  double clip_norm = 0.0;
  int64_t epochs = 5;
  int64_t patience = 3;

  EvidenceSources evidence = EvidenceSources::kBoth;
  int64_t max_factual_sentences = 3;
  FilterParams filter;

  uint64_t seed = 1;

  // Throws ConfigError for unknown keys or unparseable values.
  void Set(const std::string& key, const std::string& value);
  void Validate() const;

  // Canonical "key = value" lines, one per setting, in a fixed order.
  std::string Serialize() const;
  // Hex digest of Serialize().
  std::string Fingerprint() const;

  // `key = value` lines with '#' comments.
  static PipelineConfig Parse(const std::string& text);
  static PipelineConfig Load(const std::string& path);
  void Save(const std::string& path) const;
};

// Parses "key = value" lines into a map; later keys win.
std::map<std::string, std::string> ParseKeyValues(const std::string& text);

// 64-bit FNV-1a as 16 hex digits.
std::string Fnv1aHex(const std::string& bytes);

}  // namespace cegi

#endif  // CEGI_PIPELINE_CONFIG_H_
