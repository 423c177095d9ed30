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

#ifndef CEGI_NUMERICS_TENSOR_H_
#define CEGI_NUMERICS_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cegi {

using Shape = std::vector<int64_t>;

std::string ShapeToString(const Shape& shape);
int64_t ShapeSize(const Shape& shape);

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace internal {

// One recorded primitive application. Nodes are created in strictly
// increasing id order, so sorting reachable nodes by descending id is a valid
// reverse topological order of the computation.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  uint64_t id = 0;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this node's grad into its parents' grads.
  std::function<void(Node&)> backward;
};

uint64_t NextNodeId();

}  // namespace internal

// Dense row-major array of doubles. Copies share storage; values are treated
// as immutable once produced by an op. Parameters are the only tensors whose
// values are rewritten in place (by the optimizer or checkpoint loader).
class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor FromVector(Shape shape, std::vector<double> values,
                           bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);
  // Column vector of the given values.
  static Tensor Column(std::vector<double> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  int64_t rank() const { return static_cast<int64_t>(shape().size()); }
  int64_t size() const;
  int64_t dim(int64_t axis) const;
  // Matrix views; a rank-1 tensor is treated as a column.
  int64_t rows() const;
  int64_t cols() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double at(int64_t row, int64_t col) const;
  double item() const;

  bool requires_grad() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void ZeroGrad();

  // Copy of the values with no history.
  Tensor Detach() const;
  uint64_t id() const;

  const std::shared_ptr<internal::Node>& node() const { return node_; }
  static Tensor FromNode(std::shared_ptr<internal::Node> node);

 private:
  std::shared_ptr<internal::Node> node_;
};

// Disables graph recording on the current thread while alive. Ops then
// produce plain value tensors, which is what inference wants.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradEnabled();

// Creates the output node of an op. The node records history only when grad
// mode is on and some input requires grad; `backward` is dropped otherwise.
Tensor MakeResult(Shape shape, std::vector<double> values,
                  std::vector<Tensor> inputs, const char* op,
                  std::function<void(internal::Node&)> backward);

// Reverse-mode sweep from a scalar. Leaf grads accumulate across calls;
// intermediate grads are reset before each sweep.
void Backward(const Tensor& loss);

// Ids of the nodes visited by Backward(loss), in visiting order.
std::vector<uint64_t> BackwardOrder(const Tensor& loss);

}  // namespace cegi

#endif  // CEGI_NUMERICS_TENSOR_H_
