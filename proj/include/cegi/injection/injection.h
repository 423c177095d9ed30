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

#ifndef CEGI_INJECTION_INJECTION_H_
#define CEGI_INJECTION_INJECTION_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/transformer.h"
#include "cegi/numerics/parameters.h"
#include "cegi/numerics/rng.h"
#include "cegi/numerics/tensor.h"

namespace cegi {

// Bilinear form W_g (d x d) scoring target/source column pairs.
struct AttentionParams {
  Tensor bilinear;
};

// Affine fusion of [G - H; G * H]: weight W_m (d x 2d), bias b_m (d x 1).
struct CoMatchParams {
  Tensor weight;
  Tensor bias;
};

struct AttentionResult {
  Tensor scores;  // S: a x b, each row sums to one
  Tensor mixed;   // G: d x a, column j mixes source columns for target j
};

// S = softmax_rows(H_target^T W_g H_source), G = H_source S^T.
// `source_valid`, when non-empty, marks usable source columns. With no
// usable source column (k = 0 evidence, say) G is a d x a zero matrix and S
// is a x 0.
AttentionResult BilinearAttend(const Tensor& target, const Tensor& source,
                               const AttentionParams& params,
                               std::span<const char> source_valid = {});

// M = relu(W_m [G - H; G * H] + b_m 1^T).
Tensor CoMatch(const Tensor& mixed, const Tensor& anchor,
               const CoMatchParams& params);

enum class Part { kParagraph = 0, kQuestion = 1, kOption = 2, kEvidence = 3 };

// The three partners of each anchor, evidence last:
//   P: (Q, O, E)   Q: (P, O, E)   O: (P, Q, E)
Part PartnerOf(Part anchor, int slot);

// Either one shared pair (W_g, W_m/b_m) or one per (anchor, partner) pair.
class InjectionParams {
 public:
  InjectionParams(int64_t dim, bool share_across_pairs, ParameterSet& params,
                  const std::string& prefix, Rng& rng);
  // Wraps explicit tensors; both lists hold 1 (shared) or 9 entries.
  InjectionParams(std::vector<AttentionParams> attention,
                  std::vector<CoMatchParams> comatch);

  const AttentionParams& attention(Part anchor, int slot) const;
  const CoMatchParams& comatch(Part anchor, int slot) const;
  bool shared() const { return attention_.size() == 1; }

 private:
  std::vector<AttentionParams> attention_;
  std::vector<CoMatchParams> comatch_;
};

// G tensors for anchors P, Q, O (outer index) and partner slots (inner).
struct Relations {
  std::array<std::array<Tensor, 3>, 3> mixed;
  const Tensor& at(Part anchor, int slot) const {
    return mixed[static_cast<int>(anchor)][slot];
  }
};

Relations BuildRelations(const EncoderOutput& encoded,
                         const InjectionParams& params);

// C_iP (3d x t), C_iQ (3d x n), C_iO (3d x h) and C_i = [C_iP, C_iQ, C_iO].
struct OptionBlock {
  Tensor paragraph;
  Tensor question;
  Tensor option;
  Tensor combined;
};

OptionBlock BuildOptionBlock(const EncoderOutput& encoded,
                             const InjectionParams& params);

// Column layout of F = [C_1, ..., C_m].
struct FinalLayout {
  int64_t options = 0;
  int64_t paragraph_width = 0;
  int64_t question_width = 0;
  int64_t option_width = 0;
  int64_t BlockWidth() const {
    return paragraph_width + question_width + option_width;
  }
  int64_t Width() const { return options * BlockWidth(); }
  int64_t BlockBegin(int64_t option_index) const {
    return option_index * BlockWidth();
  }
};

struct FinalRepresentation {
  Tensor features;  // 3d x m(t + n + h)
  FinalLayout layout;
};

// Horizontal concatenation in option order; all blocks must share (t, n, h).
FinalRepresentation AssembleFinal(std::span<const OptionBlock> blocks);

}  // namespace cegi

#endif  // CEGI_INJECTION_INJECTION_H_
