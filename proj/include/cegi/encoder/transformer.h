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

#ifndef CEGI_ENCODER_TRANSFORMER_H_
#define CEGI_ENCODER_TRANSFORMER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cegi/encoder/packing.h"
#include "cegi/numerics/parameters.h"
#include "cegi/numerics/rng.h"
#include "cegi/numerics/tensor.h"

namespace cegi {

struct EncoderConfig {
  int64_t dim = 64;
  int64_t layers = 2;
  int64_t heads = 4;
  int64_t max_length = 256;
  int64_t vocab_size = 0;
  // Hidden width of the feed-forward sublayer; 0 means 4 * dim.
  int64_t ffn_dim = 0;
  uint64_t seed = 1;

  int64_t FeedForwardDim() const { return ffn_dim > 0 ? ffn_dim : 4 * dim; }
  // Throws std::invalid_argument on inconsistent settings.
  void Validate() const;
};

// Stack of pre-norm self-attention blocks over token plus position
// embeddings. Activations are d x T: one column per position.
class TransformerEncoder {
 public:
  // Registers parameters under "<prefix>." in `params`.
  TransformerEncoder(const EncoderConfig& config, ParameterSet& params,
                     const std::string& prefix, Rng& rng);

  const EncoderConfig& config() const { return config_; }

  // Last-layer features, d x ids.size(). Keys at [PAD] positions are
  // masked; with `causal`, position i only attends to positions <= i.
  Tensor Forward(std::span<const int64_t> ids, bool causal) const;

  // Token plus position embedding, d x ids.size().
  Tensor Embed(std::span<const int64_t> ids) const;
  Tensor ForwardEmbedded(const Tensor& embedded, std::span<const int64_t> ids,
                         bool causal) const;

 private:
  struct Layer {
    Tensor norm1_gain, norm1_shift;
    Tensor query, query_bias, key, key_bias, value, value_bias;
    Tensor output, output_bias;
    Tensor norm2_gain, norm2_shift;
    Tensor ffn_in, ffn_in_bias, ffn_out, ffn_out_bias;
  };

  Tensor SelfAttention(const Layer& layer, const Tensor& x,
                       std::span<const double> mask) const;

  EncoderConfig config_;
  Tensor token_embedding_;     // d x V
  Tensor position_embedding_;  // d x max_length
  std::vector<Layer> layers_;
  Tensor final_gain_, final_shift_;
};

// Per-segment last-layer features of one packed input.
struct EncoderOutput {
  Tensor features;  // d x T
  Tensor cls;       // d x 1
  Tensor paragraph;  // d x t
  Tensor question;   // d x n
  Tensor option;     // d x h
  Tensor evidence;   // d x k (k may be 0)
  PackedInput layout;
};

EncoderOutput Encode(const PackedInput& packed,
                     const TransformerEncoder& encoder);

// Causally masked features for language modelling, d x ids.size().
Tensor CausalEncode(std::span<const int64_t> ids,
                    const TransformerEncoder& encoder);

}  // namespace cegi

#endif  // CEGI_ENCODER_TRANSFORMER_H_
