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

#include "cegi/encoder/transformer.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cegi/encoder/vocabulary.h"
#include "cegi/numerics/ops.h"

namespace cegi {

void EncoderConfig::Validate() const {
  if (dim <= 0 || layers < 0 || heads <= 0 || max_length <= 0) {
    throw std::invalid_argument("encoder dimensions must be positive");
  }
  if (dim % heads != 0) {
    throw std::invalid_argument("encoder dim " + std::to_string(dim) +
                                " is not divisible by " +
                                std::to_string(heads) + " heads");
  }
  if (vocab_size <= kReservedCount) {
    throw std::invalid_argument("encoder vocabulary size " +
                                std::to_string(vocab_size) +
                                " leaves no room for ordinary tokens");
  }
}

TransformerEncoder::TransformerEncoder(const EncoderConfig& config,
                                       ParameterSet& params,
                                       const std::string& prefix, Rng& rng)
    : config_(config) {
  config_.Validate();
  const int64_t d = config_.dim;
  const int64_t f = config_.FeedForwardDim();
  auto name = [&](const std::string& leaf) { return prefix + "." + leaf; };
  token_embedding_ =
      params.AddXavier(name("token_embedding"), {d, config_.vocab_size}, rng);
  position_embedding_ = params.AddXavier(name("position_embedding"),
                                         {d, config_.max_length}, rng);
  for (int64_t l = 0; l < config_.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer layer;
    layer.norm1_gain = params.AddConstant(name(p + "norm1_gain"), {d, 1}, 1.0);
    layer.norm1_shift = params.Add(name(p + "norm1_shift"), {d, 1});
    layer.query = params.AddXavier(name(p + "query"), {d, d}, rng);
    layer.query_bias = params.Add(name(p + "query_bias"), {d, 1});
    layer.key = params.AddXavier(name(p + "key"), {d, d}, rng);
    layer.key_bias = params.Add(name(p + "key_bias"), {d, 1});
    layer.value = params.AddXavier(name(p + "value"), {d, d}, rng);
    layer.value_bias = params.Add(name(p + "value_bias"), {d, 1});
    layer.output = params.AddXavier(name(p + "output"), {d, d}, rng);
    layer.output_bias = params.Add(name(p + "output_bias"), {d, 1});
    layer.norm2_gain = params.AddConstant(name(p + "norm2_gain"), {d, 1}, 1.0);
    layer.norm2_shift = params.Add(name(p + "norm2_shift"), {d, 1});
    layer.ffn_in = params.AddXavier(name(p + "ffn_in"), {f, d}, rng);
    layer.ffn_in_bias = params.Add(name(p + "ffn_in_bias"), {f, 1});
    layer.ffn_out = params.AddXavier(name(p + "ffn_out"), {d, f}, rng);
    layer.ffn_out_bias = params.Add(name(p + "ffn_out_bias"), {d, 1});
    layers_.push_back(std::move(layer));
  }
  final_gain_ = params.AddConstant(name("final_gain"), {d, 1}, 1.0);
  final_shift_ = params.Add(name("final_shift"), {d, 1});
}

Tensor TransformerEncoder::Embed(std::span<const int64_t> ids) const {
  const int64_t length = static_cast<int64_t>(ids.size());
  if (length > config_.max_length) {
    throw std::out_of_range("sequence of length " + std::to_string(length) +
                            " exceeds encoder max length " +
                            std::to_string(config_.max_length));
  }
  for (int64_t id : ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw std::out_of_range("token id " + std::to_string(id) +
                              " outside vocabulary of size " +
                              std::to_string(config_.vocab_size));
    }
  }
  std::vector<int64_t> positions(length);
  std::iota(positions.begin(), positions.end(), 0);
  return Add(GatherCols(token_embedding_, ids),
             GatherCols(position_embedding_, positions));
}

Tensor TransformerEncoder::SelfAttention(const Layer& layer, const Tensor& x,
                                         std::span<const double> mask) const {
  const int64_t head_dim = config_.dim / config_.heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  Tensor q = AddBias(MatMul(layer.query, x), layer.query_bias);
  Tensor k = AddBias(MatMul(layer.key, x), layer.key_bias);
  Tensor v = AddBias(MatMul(layer.value, x), layer.value_bias);
  std::vector<Tensor> heads;
  heads.reserve(config_.heads);
  for (int64_t h = 0; h < config_.heads; ++h) {
    Tensor qh = SliceRows(q, h * head_dim, head_dim);
    Tensor kh = SliceRows(k, h * head_dim, head_dim);
    Tensor vh = SliceRows(v, h * head_dim, head_dim);
    // Row i holds query position i's scores over key positions.
    Tensor scores = Scale(MatMul(Transpose(qh), kh), scale);
    Tensor weights = Softmax(AddConstant(scores, mask), 1);
    heads.push_back(MatMul(vh, Transpose(weights)));
  }
  return AddBias(MatMul(layer.output, ConcatRows(heads)), layer.output_bias);
}

Tensor TransformerEncoder::ForwardEmbedded(const Tensor& embedded,
                                           std::span<const int64_t> ids,
                                           bool causal) const {
  const int64_t length = static_cast<int64_t>(ids.size());
  if (embedded.cols() != length || embedded.rows() != config_.dim) {
    throw ShapeError("embedded input " + ShapeToString(embedded.shape()) +
                     " does not match " + std::to_string(length) +
                     " ids at dim " + std::to_string(config_.dim));
  }
  std::vector<double> mask(length * length, 0.0);
  for (int64_t i = 0; i < length; ++i) {
    for (int64_t j = 0; j < length; ++j) {
      if (ids[j] == kPadId || (causal && j > i)) {
        mask[i * length + j] = kMaskedLogit;
      }
    }
  }
  Tensor x = embedded;
  for (const Layer& layer : layers_) {
    Tensor attn = SelfAttention(
        layer, LayerNormCols(x, layer.norm1_gain, layer.norm1_shift), mask);
    x = Add(x, attn);
    Tensor hidden = LayerNormCols(x, layer.norm2_gain, layer.norm2_shift);
    hidden = Relu(AddBias(MatMul(layer.ffn_in, hidden), layer.ffn_in_bias));
    x = Add(x, AddBias(MatMul(layer.ffn_out, hidden), layer.ffn_out_bias));
  }
  return LayerNormCols(x, final_gain_, final_shift_);
}

Tensor TransformerEncoder::Forward(std::span<const int64_t> ids,
                                   bool causal) const {
  return ForwardEmbedded(Embed(ids), ids, causal);
}

EncoderOutput Encode(const PackedInput& packed,
                     const TransformerEncoder& encoder) {
  EncoderOutput out;
  out.layout = packed;
  out.features = encoder.Forward(packed.ids, /*causal=*/false);
  out.cls = SliceCols(out.features, 0, 1);
  out.paragraph = SliceCols(out.features, packed.paragraph.begin,
                            packed.paragraph.width);
  out.question =
      SliceCols(out.features, packed.question.begin, packed.question.width);
  out.option =
      SliceCols(out.features, packed.option.begin, packed.option.width);
  out.evidence =
      SliceCols(out.features, packed.evidence.begin, packed.evidence.width);
  return out;
}

Tensor CausalEncode(std::span<const int64_t> ids,
                    const TransformerEncoder& encoder) {
  return encoder.Forward(ids, /*causal=*/true);
}

}  // namespace cegi
