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

// Differentiable primitives. Matrices are rank-2 row-major tensors; a rank-1
// tensor of length n is accepted wherever an n x 1 column is expected.

#ifndef CEGI_NUMERICS_OPS_H_
#define CEGI_NUMERICS_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "cegi/numerics/tensor.h"

namespace cegi {

enum class ElementwiseKind { kAdd, kSubtract, kMultiply };

// Additive mask value; exp() of it underflows to exactly zero.
inline constexpr double kMaskedLogit = -1e9;

Tensor MatMul(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& x);

Tensor Elementwise(const Tensor& a, const Tensor& b, ElementwiseKind kind);
inline Tensor Add(const Tensor& a, const Tensor& b) {
  return Elementwise(a, b, ElementwiseKind::kAdd);
}
inline Tensor Sub(const Tensor& a, const Tensor& b) {
  return Elementwise(a, b, ElementwiseKind::kSubtract);
}
inline Tensor Mul(const Tensor& a, const Tensor& b) {
  return Elementwise(a, b, ElementwiseKind::kMultiply);
}

Tensor Scale(const Tensor& x, double factor);
Tensor AddScalar(const Tensor& x, double offset);
// Adds a constant (non-differentiable) array of the same size, e.g. a mask.
Tensor AddConstant(const Tensor& x, std::span<const double> constant);
// x (r x c) plus bias (r x 1) broadcast across columns.
Tensor AddBias(const Tensor& x, const Tensor& bias);

Tensor Relu(const Tensor& x);
Tensor Softmax(const Tensor& x, int64_t axis);

Tensor Sum(const Tensor& x);
Tensor MaxAll(const Tensor& x);
// Euclidean norm of all values; gradient at the origin is zero.
Tensor Norm(const Tensor& x);
// v = (|s|^2 / (1 + |s|^2)) * s / |s|, with squash(0) = 0.
Tensor Squash(const Tensor& s);

Tensor SliceRows(const Tensor& x, int64_t begin, int64_t count);
Tensor SliceCols(const Tensor& x, int64_t begin, int64_t count);
Tensor ConcatRows(std::span<const Tensor> parts);
Tensor ConcatCols(std::span<const Tensor> parts);

// Columns `ids` of `table` (d x V) as a d x ids.size() matrix.
Tensor GatherCols(const Tensor& table, std::span<const int64_t> ids);

// Per-column layer normalization with gain/shift columns of height rows(x).
Tensor LayerNormCols(const Tensor& x, const Tensor& gain, const Tensor& shift,
                     double epsilon = 1e-5);

// Sum over columns c with targets[c] >= 0 of -log softmax(logits[:, c])[t].
Tensor CrossEntropyCols(const Tensor& logits, std::span<const int64_t> targets);

// Stacks each non-overlapping window of `width` columns into one column:
// out[k * d + r, c] = x[r, c * width + k].
Tensor Unfold(const Tensor& x, int64_t width);

// Learned affine map of concatenated non-overlapping windows. `kernel` is
// d_out x (d * width); `bias` is optional (d_out x 1). Only width == stride
// is supported and the input width must divide evenly.
Tensor WindowedConv(const Tensor& x, int64_t width, int64_t stride,
                    const Tensor& kernel, const Tensor& bias = Tensor());

// Per-row window maximum over non-overlapping windows (width == stride).
Tensor MaxPool(const Tensor& x, int64_t width, int64_t stride);

}  // namespace cegi

#endif  // CEGI_NUMERICS_OPS_H_
