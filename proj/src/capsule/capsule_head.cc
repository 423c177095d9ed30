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

#include "cegi/capsule/capsule_head.h"

#include <cmath>
#include <stdexcept>

#include "cegi/numerics/ops.h"

namespace cegi {

MultiGrainKernels MultiGrainKernels::Create(int64_t channels,
                                            ParameterSet& params,
                                            const std::string& prefix,
                                            Rng& rng) {
  MultiGrainKernels k;
  k.fine_kernel =
      params.AddXavier(prefix + ".fine_kernel", {channels, 2 * channels}, rng);
  k.fine_bias = params.Add(prefix + ".fine_bias", {channels, 1});
  k.coarse_kernel = params.AddXavier(prefix + ".coarse_kernel",
                                     {channels, 4 * channels}, rng);
  k.coarse_bias = params.Add(prefix + ".coarse_bias", {channels, 1});
  return k;
}

MultiGrainFeatures MultiGrain(const Tensor& final_features,
                              const MultiGrainKernels& kernels) {
  if (final_features.cols() % 4 != 0) {
    throw ShapeError("multi-grain features need a width divisible by 4, got " +
                     ShapeToString(final_features.shape()));
  }
  MultiGrainFeatures out;
  out.fine = MaxPool(WindowedConv(final_features, 2, 2, kernels.fine_kernel,
                                  kernels.fine_bias),
                     2, 2);
  out.coarse = MaxPool(WindowedConv(final_features, 4, 4,
                                    kernels.coarse_kernel, kernels.coarse_bias),
                       1, 1);
  const Tensor halves[] = {out.fine, out.coarse};
  out.combined = ConcatCols(halves);
  return out;
}

std::vector<int64_t> PhraseOwners(const FinalLayout& layout) {
  const int64_t block = layout.BlockWidth();
  if (block <= 0 || layout.Width() % 4 != 0) {
    throw ShapeError("phrase owners need a positive block width and a total "
                     "width divisible by 4");
  }
  const int64_t half = layout.Width() / 4;
  std::vector<int64_t> owners(2 * half);
  for (int64_t c = 0; c < half; ++c) {
    owners[c] = owners[half + c] = (4 * c) / block;
  }
  return owners;
}

RoutingResult RouteVotes(std::span<const Tensor> votes, int iterations,
                         std::span<const int64_t> owners) {
  if (iterations < 1) {
    throw std::invalid_argument("routing needs at least one iteration, got " +
                                std::to_string(iterations));
  }
  if (votes.empty()) throw std::invalid_argument("routing with no outputs");
  const int64_t outputs = static_cast<int64_t>(votes.size());
  const int64_t inputs = votes[0].cols();
  for (const Tensor& v : votes) {
    if (v.shape() != votes[0].shape()) {
      throw ShapeError("vote blocks differ: " + ShapeToString(v.shape()) +
                       " vs " + ShapeToString(votes[0].shape()));
    }
  }
  std::vector<double> scope_mask;
  if (!owners.empty()) {
    if (static_cast<int64_t>(owners.size()) != inputs) {
      throw ShapeError("routing owners cover " +
                       std::to_string(owners.size()) + " of " +
                       std::to_string(inputs) + " inputs");
    }
    scope_mask.assign(inputs * outputs, kMaskedLogit);
    for (int64_t i = 0; i < inputs; ++i) {
      if (owners[i] < 0 || owners[i] >= outputs) {
        throw std::out_of_range("routing owner out of range");
      }
      scope_mask[i * outputs + owners[i]] = 0.0;
    }
  }

  RoutingResult result;
  result.inputs = inputs;
  Tensor logits = Tensor::Zeros({inputs, outputs});
  for (int iter = 0; iter < iterations; ++iter) {
    Tensor gated = scope_mask.empty() ? logits : AddConstant(logits, scope_mask);
    Tensor couplings = Softmax(gated, 1);
    result.couplings.emplace_back(couplings.values().begin(),
                                  couplings.values().end());
    result.capsules.clear();
    for (int64_t j = 0; j < outputs; ++j) {
      Tensor total = MatMul(votes[j], SliceCols(couplings, j, 1));
      result.capsules.push_back(Squash(total));
    }
    if (iter + 1 == iterations) break;
    std::vector<Tensor> agreement;
    agreement.reserve(outputs);
    for (int64_t j = 0; j < outputs; ++j) {
      agreement.push_back(MatMul(Transpose(votes[j]), result.capsules[j]));
    }
    logits = Add(logits, ConcatCols(agreement));
  }
  return result;
}

RoutingResult Route(const Tensor& phrases, std::span<const Tensor> maps,
                    const RoutingConfig& config, int64_t outputs,
                    std::span<const int64_t> owners) {
  const int64_t inputs = phrases.cols();
  const bool needs_owners = config.scope == RoutingScope::kPerOption ||
                            config.sharing == VoteSharing::kOwnerRelative;
  if (needs_owners && static_cast<int64_t>(owners.size()) != inputs) {
    throw ShapeError("routing needs an owner for each of " +
                     std::to_string(inputs) + " inputs, got " +
                     std::to_string(owners.size()));
  }
  const size_t expected_maps =
      config.sharing == VoteSharing::kOwnerRelative ? 2 : outputs;
  if (maps.size() != expected_maps) {
    throw ShapeError("expected " + std::to_string(expected_maps) +
                     " vote maps, got " + std::to_string(maps.size()));
  }
  auto check_rows = [&](const Tensor& map, int64_t rows) {
    if (map.rows() < rows) {
      throw ShapeError("vote map " + ShapeToString(map.shape()) +
                       " has fewer than " + std::to_string(rows) + " rows");
    }
  };
  std::vector<Tensor> votes;
  votes.reserve(outputs);
  if (config.sharing == VoteSharing::kOwnerRelative) {
    check_rows(maps[0], config.capsule_dim);
    check_rows(maps[1], config.capsule_dim);
    const Tensor own = MatMul(maps[0], phrases);
    const Tensor other = MatMul(maps[1], phrases);
    for (int64_t j = 0; j < outputs; ++j) {
      std::vector<double> is_own(config.capsule_dim * inputs, 0.0);
      for (int64_t r = 0; r < config.capsule_dim; ++r) {
        for (int64_t i = 0; i < inputs; ++i) {
          is_own[r * inputs + i] = owners[i] == j ? 1.0 : 0.0;
        }
      }
      std::vector<double> is_other(is_own.size());
      for (size_t k = 0; k < is_own.size(); ++k) is_other[k] = 1.0 - is_own[k];
      const Shape shape{config.capsule_dim, inputs};
      votes.push_back(
          Add(Mul(own, Tensor::FromVector(shape, std::move(is_own))),
              Mul(other, Tensor::FromVector(shape, std::move(is_other)))));
    }
  } else {
    for (const Tensor& map : maps) {
      if (config.sharing == VoteSharing::kPerOutput) {
        if (map.rows() != config.capsule_dim) {
          throw ShapeError("vote map " + ShapeToString(map.shape()) +
                           " does not produce capsules of dim " +
                           std::to_string(config.capsule_dim));
        }
        votes.push_back(MatMul(map, phrases));
        continue;
      }
      check_rows(map, inputs * config.capsule_dim);
      std::vector<Tensor> columns;
      columns.reserve(inputs);
      for (int64_t i = 0; i < inputs; ++i) {
        columns.push_back(
            MatMul(SliceRows(map, i * config.capsule_dim, config.capsule_dim),
                   SliceCols(phrases, i, 1)));
      }
      votes.push_back(ConcatCols(columns));
    }
  }
  std::span<const int64_t> scope;
  if (config.scope == RoutingScope::kPerOption) scope = owners;
  return RouteVotes(votes, config.iterations, scope);
}

void MarginLossParams::Validate() const {
  if (!(0.0 < m_minus && m_minus < m_plus && m_plus < 1.0) || lambda <= 0.0) {
    throw std::invalid_argument(
        "margin loss needs 0 < m- < m+ < 1 and lambda > 0");
  }
}

Tensor MarginLoss(std::span<const Tensor> capsules,
                  std::span<const double> label,
                  const MarginLossParams& params) {
  params.Validate();
  if (label.size() != capsules.size()) {
    throw std::invalid_argument("label has " + std::to_string(label.size()) +
                                " entries for " +
                                std::to_string(capsules.size()) + " capsules");
  }
  int ones = 0;
  for (double y : label) {
    if (y == 1.0) {
      ++ones;
    } else if (y != 0.0) {
      throw std::invalid_argument("label entries must be 0 or 1");
    }
  }
  if (ones != 1) {
    throw std::invalid_argument("label must have exactly one positive entry");
  }
  Tensor total;
  for (size_t j = 0; j < capsules.size(); ++j) {
    Tensor norm = Norm(capsules[j]);
    Tensor term;
    if (label[j] == 1.0) {
      Tensor gap = Relu(AddScalar(Scale(norm, -1.0), params.m_plus));
      term = Mul(gap, gap);
    } else {
      Tensor gap = Relu(AddScalar(norm, -params.m_minus));
      term = Scale(Mul(gap, gap), params.lambda);
    }
    total = total.defined() ? Add(total, term) : term;
  }
  return total;
}

Tensor MarginLoss(std::span<const Tensor> capsules, int64_t label_index,
                  const MarginLossParams& params) {
  if (label_index < 0 || label_index >= static_cast<int64_t>(capsules.size())) {
    throw std::invalid_argument("label index " + std::to_string(label_index) +
                                " outside " + std::to_string(capsules.size()) +
                                " capsules");
  }
  std::vector<double> label(capsules.size(), 0.0);
  label[label_index] = 1.0;
  return MarginLoss(capsules, label, params);
}

std::vector<double> CapsuleNorms(std::span<const Tensor> capsules) {
  std::vector<double> norms;
  norms.reserve(capsules.size());
  for (const Tensor& v : capsules) {
    double sq = 0.0;
    for (double x : v.values()) sq += x * x;
    norms.push_back(std::sqrt(sq));
  }
  return norms;
}

int64_t Predict(std::span<const double> norms) {
  if (norms.empty()) throw std::invalid_argument("predict with no options");
  int64_t best = 0;
  for (size_t j = 1; j < norms.size(); ++j) {
    if (norms[j] > norms[best]) best = static_cast<int64_t>(j);
  }
  return best;
}

CapsuleHead::CapsuleHead(const CapsuleHeadConfig& config, ParameterSet& params,
                         const std::string& prefix, Rng& rng)
    : config_(config) {
  if (config_.routing.iterations < 1) {
    throw std::invalid_argument("routing iterations must be at least 1");
  }
  const VoteSharing sharing = config_.routing.sharing;
  const int64_t rows = sharing == VoteSharing::kPerPair
                           ? config_.max_inputs * config_.routing.capsule_dim
                           : config_.routing.capsule_dim;
  if (rows <= 0) {
    throw std::invalid_argument("per-pair vote maps need max_inputs > 0");
  }
  if (!(config_.vote_init_scale > 0.0)) {
    throw std::invalid_argument("vote init scale must be positive");
  }
  auto add_map = [&](const std::string& name) {
    Tensor map = params.AddXavier(name, {rows, config_.channels}, rng);
    for (double& v : map.mutable_values()) v *= config_.vote_init_scale;
    maps_.push_back(map);
  };
  if (sharing == VoteSharing::kOwnerRelative) {
    add_map(prefix + ".vote_map.own");
    add_map(prefix + ".vote_map.other");
    return;
  }
  for (int64_t j = 0; j < config_.options; ++j) {
    add_map(prefix + ".vote_map." + std::to_string(j));
  }
}

RoutingResult CapsuleHead::Forward(const MultiGrainFeatures& phrases,
                                   const FinalLayout& layout) const {
  if (layout.options != config_.options) {
    throw std::invalid_argument("capsule head built for " +
                                std::to_string(config_.options) +
                                " options, got " +
                                std::to_string(layout.options));
  }
  const std::vector<int64_t> owners = PhraseOwners(layout);
  return Route(phrases.combined, maps_, config_.routing, config_.options,
               owners);
}

MaxPoolHead::MaxPoolHead(int64_t channels, ParameterSet& params,
                         const std::string& prefix, Rng& rng)
    : weight_(params.AddXavier(prefix + ".score_weight", {1, channels}, rng)),
      bias_(params.Add(prefix + ".score_bias", {1, 1})) {}

MaxPoolHead::MaxPoolHead(Tensor weight, Tensor bias)
    : weight_(std::move(weight)), bias_(std::move(bias)) {}

Tensor MaxPoolHead::Forward(const MultiGrainFeatures& phrases,
                            const FinalLayout& layout) const {
  const Tensor scores = AddBias(MatMul(weight_, phrases.combined), bias_);
  const std::vector<int64_t> owners = PhraseOwners(layout);
  std::vector<Tensor> per_option;
  for (int64_t j = 0; j < layout.options; ++j) {
    std::vector<Tensor> runs;
    for (size_t c = 0; c < owners.size();) {
      if (owners[c] != j) {
        ++c;
        continue;
      }
      size_t end = c;
      while (end < owners.size() && owners[end] == j) ++end;
      runs.push_back(SliceCols(scores, static_cast<int64_t>(c),
                               static_cast<int64_t>(end - c)));
      c = end;
    }
    if (runs.empty()) {
      throw ShapeError("option " + std::to_string(j) + " owns no phrases");
    }
    per_option.push_back(MaxAll(ConcatCols(runs)));
  }
  return ConcatRows(per_option);
}

Tensor OptionCrossEntropy(const Tensor& scores, int64_t label_index) {
  const int64_t targets[] = {label_index};
  return CrossEntropyCols(scores, targets);
}

}  // namespace cegi
