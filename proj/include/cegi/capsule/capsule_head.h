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

#ifndef CEGI_CAPSULE_CAPSULE_HEAD_H_
#define CEGI_CAPSULE_CAPSULE_HEAD_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cegi/injection/injection.h"
#include "cegi/numerics/parameters.h"
#include "cegi/numerics/rng.h"
#include "cegi/numerics/tensor.h"

namespace cegi {

// Phrase-level features of F: R_1 = maxpool2(conv2(F)), R_2 = conv4(F),
// L = [R_1, R_2].
struct MultiGrainFeatures {
  Tensor fine;      // R_1: 3d x W/4
  Tensor coarse;    // R_2: 3d x W/4
  Tensor combined;  // L:   3d x W/2
};

struct MultiGrainKernels {
  Tensor fine_kernel;    // 3d x (3d * 2)
  Tensor fine_bias;      // 3d x 1
  Tensor coarse_kernel;  // 3d x (3d * 4)
  Tensor coarse_bias;    // 3d x 1

  static MultiGrainKernels Create(int64_t channels, ParameterSet& params,
                                  const std::string& prefix, Rng& rng);
};

// Requires the width of F to be divisible by 4.
MultiGrainFeatures MultiGrain(const Tensor& final_features,
                              const MultiGrainKernels& kernels);

// Option index owning each column of L. Each L column summarizes a window
// of four F columns; the window's first column decides.
std::vector<int64_t> PhraseOwners(const FinalLayout& layout);

enum class RoutingScope {
  // Every column of L routes to every option capsule.
  kAllOptions,
  // Columns route only to the capsule of the option they came from.
  kPerOption,
};

enum class VoteSharing {
  // One map W_j per output capsule, shared by all input positions.
  kPerOutput,
  // A separate W_ij for every (input position, output capsule) pair.
  kPerPair,
  // Two maps: W_own for inputs from option j's own block, W_other for
  // inputs from other options. Unlike kPerOutput, capsule j can tell its
  // own option's phrases apart, and the head stays equivariant under
  // option reordering.
  kOwnerRelative,
};

struct RoutingConfig {
  int iterations = 3;
  int64_t capsule_dim = 16;
  RoutingScope scope = RoutingScope::kAllOptions;
  VoteSharing sharing = VoteSharing::kOwnerRelative;
};

struct RoutingResult {
  std::vector<Tensor> capsules;  // v_j, capsule_dim x 1 each
  // Coupling coefficients c_ij of every iteration, inputs x outputs,
  // row-major.
  std::vector<std::vector<double>> couplings;
  int64_t inputs = 0;
};

// Dynamic routing by agreement. `votes[j]` holds the prediction vectors
// W_ij L_i for output j as columns (capsule_dim x inputs). With
// `owners` given, input i may only couple to output owners[i].
RoutingResult RouteVotes(std::span<const Tensor> votes, int iterations,
                         std::span<const int64_t> owners = {});

// Computes votes from L with the given maps and routes them to
// `outputs` capsules. For kPerOutput, `maps[j]` is capsule_dim x D; for
// kPerPair, `maps[j]` is (inputs * capsule_dim) x D with row block i holding
// W_ij; for kOwnerRelative, `maps` is {W_own, W_other}, each capsule_dim x D.
// `owners` gives the option of each L column; it is required by kPerOption
// scope and kOwnerRelative sharing and ignored otherwise.
RoutingResult Route(const Tensor& phrases, std::span<const Tensor> maps,
                    const RoutingConfig& config, int64_t outputs,
                    std::span<const int64_t> owners = {});

struct MarginLossParams {
  double m_plus = 0.9;
  double m_minus = 0.1;
  double lambda = 0.5;
  void Validate() const;
};

// sum_j y_j max(0, m+ - |v_j|)^2 + lambda (1 - y_j) max(0, |v_j| - m-)^2.
// `label` must be one-hot over the capsules.
Tensor MarginLoss(std::span<const Tensor> capsules,
                  std::span<const double> label,
                  const MarginLossParams& params = {});
Tensor MarginLoss(std::span<const Tensor> capsules, int64_t label_index,
                  const MarginLossParams& params = {});

std::vector<double> CapsuleNorms(std::span<const Tensor> capsules);
// Index of the largest value; ties go to the lowest index.
int64_t Predict(std::span<const double> norms);

struct CapsuleHeadConfig {
  int64_t channels = 0;  // 3d
  int64_t options = 4;
  RoutingConfig routing;
  // Needed only for VoteSharing::kPerPair.
  int64_t max_inputs = 0;
  // Multiplies the Xavier init of the vote maps. Summing many votes at full
  // scale starts every capsule near unit length, where squash is flat.
  double vote_init_scale = 0.03;
};

class CapsuleHead {
 public:
  CapsuleHead(const CapsuleHeadConfig& config, ParameterSet& params,
              const std::string& prefix, Rng& rng);
  RoutingResult Forward(const MultiGrainFeatures& phrases,
                        const FinalLayout& layout) const;
  const CapsuleHeadConfig& config() const { return config_; }

 private:
  CapsuleHeadConfig config_;
  std::vector<Tensor> maps_;
};

// Ablation head: per-option max over that option's L columns of a learned
// linear score. Returns an m x 1 column of scores.
class MaxPoolHead {
 public:
  MaxPoolHead(int64_t channels, ParameterSet& params,
              const std::string& prefix, Rng& rng);
  MaxPoolHead(Tensor weight, Tensor bias);
  Tensor Forward(const MultiGrainFeatures& phrases,
                 const FinalLayout& layout) const;

 private:
  Tensor weight_;  // 1 x 3d
  Tensor bias_;    // 1 x 1
};

// Softmax cross-entropy of the true option over an m x 1 score column.
Tensor OptionCrossEntropy(const Tensor& scores, int64_t label_index);

}  // namespace cegi

#endif  // CEGI_CAPSULE_CAPSULE_HEAD_H_
