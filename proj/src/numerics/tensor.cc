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

#include "cegi/numerics/tensor.h"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

namespace cegi {

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

int64_t ShapeSize(const Shape& shape) {
  int64_t n = 1;
  for (int64_t extent : shape) n *= extent;
  return n;
}

namespace internal {

uint64_t NextNodeId() {
  static std::atomic<uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace internal

namespace {

thread_local bool grad_enabled = true;

void CheckShape(const Shape& shape) {
  for (int64_t extent : shape) {
    if (extent < 0) {
      throw ShapeError("negative extent in shape " + ShapeToString(shape));
    }
  }
}

std::shared_ptr<internal::Node> NewLeaf(Shape shape, std::vector<double> values,
                                        bool requires_grad) {
  CheckShape(shape);
  if (static_cast<int64_t>(values.size()) != ShapeSize(shape)) {
    throw ShapeError("value count " + std::to_string(values.size()) +
                     " does not match shape " + ShapeToString(shape));
  }
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->value.size(), 0.0);
  node->id = internal::NextNodeId();
  return node;
}

}  // namespace

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  CheckShape(shape);
  std::vector<double> values(ShapeSize(shape), value);
  return FromNode(NewLeaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::FromVector(Shape shape, std::vector<double> values,
                          bool requires_grad) {
  return FromNode(
      NewLeaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return FromVector({1}, {value}, requires_grad);
}

Tensor Tensor::Column(std::vector<double> values, bool requires_grad) {
  const int64_t n = static_cast<int64_t>(values.size());
  return FromVector({n, 1}, std::move(values), requires_grad);
}

Tensor Tensor::FromNode(std::shared_ptr<internal::Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

const Shape& Tensor::shape() const { return node_->shape; }

int64_t Tensor::size() const {
  return static_cast<int64_t>(node_->value.size());
}

int64_t Tensor::dim(int64_t axis) const {
  if (axis < 0 || axis >= rank()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     ShapeToString(shape()));
  }
  return shape()[axis];
}

int64_t Tensor::rows() const {
  if (rank() == 0) return 1;
  return shape()[0];
}

int64_t Tensor::cols() const {
  if (rank() < 2) return 1;
  if (rank() > 2) {
    throw ShapeError("matrix view of rank-" + std::to_string(rank()) +
                     " tensor " + ShapeToString(shape()));
  }
  return shape()[1];
}

std::span<const double> Tensor::values() const { return node_->value; }

std::span<double> Tensor::mutable_values() { return node_->value; }

double Tensor::at(int64_t row, int64_t col) const {
  return node_->value[row * cols() + col];
}

double Tensor::item() const {
  if (size() != 1) {
    throw ShapeError("item() on non-scalar tensor " + ShapeToString(shape()));
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_->requires_grad; }

std::span<const double> Tensor::grad() const { return node_->grad; }

std::span<double> Tensor::mutable_grad() { return node_->grad; }

void Tensor::ZeroGrad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::Detach() const {
  return FromNode(NewLeaf(node_->shape, node_->value, false));
}

uint64_t Tensor::id() const { return node_->id; }

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }

NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

bool GradEnabled() { return grad_enabled; }

Tensor MakeResult(Shape shape, std::vector<double> values,
                  std::vector<Tensor> inputs, const char* op,
                  std::function<void(internal::Node&)> backward) {
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->op = op;
  node->id = internal::NextNodeId();
  bool track = false;
  if (grad_enabled) {
    for (const Tensor& input : inputs) {
      if (input.requires_grad()) {
        track = true;
        break;
      }
    }
  }
  if (track) {
    node->requires_grad = true;
    node->grad.assign(node->value.size(), 0.0);
    node->parents.reserve(inputs.size());
    for (const Tensor& input : inputs) node->parents.push_back(input.node());
    node->backward = std::move(backward);
  }
  return Tensor::FromNode(std::move(node));
}

namespace {

std::vector<internal::Node*> CollectTape(const Tensor& loss) {
  std::vector<internal::Node*> tape;
  std::unordered_set<internal::Node*> seen;
  std::vector<internal::Node*> stack{loss.node().get()};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    internal::Node* node = stack.back();
    stack.pop_back();
    tape.push_back(node);
    for (const auto& parent : node->parents) {
      if (parent->requires_grad && seen.insert(parent.get()).second) {
        stack.push_back(parent.get());
      }
    }
  }
  std::sort(tape.begin(), tape.end(),
            [](const internal::Node* a, const internal::Node* b) {
              return a->id > b->id;
            });
  return tape;
}

}  // namespace

void Backward(const Tensor& loss) {
  if (!loss.defined()) throw std::invalid_argument("backward on empty tensor");
  if (loss.size() != 1) {
    throw ShapeError("backward requires a scalar loss, got " +
                     ShapeToString(loss.shape()));
  }
  if (!loss.requires_grad()) return;
  std::vector<internal::Node*> tape = CollectTape(loss);
  for (internal::Node* node : tape) {
    if (node->backward) std::fill(node->grad.begin(), node->grad.end(), 0.0);
  }
  loss.node()->grad[0] += 1.0;
  for (internal::Node* node : tape) {
    if (node->backward) node->backward(*node);
  }
}

std::vector<uint64_t> BackwardOrder(const Tensor& loss) {
  std::vector<uint64_t> ids;
  if (!loss.defined() || !loss.requires_grad()) return ids;
  for (internal::Node* node : CollectTape(loss)) ids.push_back(node->id);
  return ids;
}

}  // namespace cegi
