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

#include "cegi/numerics/parameters.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cegi {

Tensor ParameterSet::Add(const std::string& name, Shape shape) {
  if (index_.count(name)) {
    throw std::invalid_argument("duplicate parameter name: " + name);
  }
  index_[name] = entries_.size();
  entries_.push_back({name, Tensor::Zeros(std::move(shape), true)});
  return entries_.back().tensor;
}

Tensor ParameterSet::AddXavier(const std::string& name, Shape shape,
                               Rng& rng) {
  const double fan_out = static_cast<double>(shape.empty() ? 1 : shape[0]);
  const double fan_in =
      static_cast<double>(shape.size() < 2 ? 1 : shape[1]);
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  Tensor t = Add(name, std::move(shape));
  for (double& v : t.mutable_values()) v = rng.Uniform(-bound, bound);
  return t;
}

Tensor ParameterSet::AddConstant(const std::string& name, Shape shape,
                                 double value) {
  Tensor t = Add(name, std::move(shape));
  std::fill(t.mutable_values().begin(), t.mutable_values().end(), value);
  return t;
}

bool ParameterSet::Contains(const std::string& name) const {
  return index_.count(name) > 0;
}

const Tensor& ParameterSet::Get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter " + name);
  return entries_[it->second].tensor;
}

Tensor& ParameterSet::Get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter " + name);
  return entries_[it->second].tensor;
}

int64_t ParameterSet::ScalarCount() const {
  int64_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

void ParameterSet::ZeroGrad() {
  for (auto& e : entries_) e.tensor.ZeroGrad();
}

void ParameterSet::CopyValuesFrom(const std::vector<NamedTensor>& source) {
  if (source.size() != entries_.size()) {
    throw std::invalid_argument(
        "parameter count mismatch: have " + std::to_string(entries_.size()) +
        ", got " + std::to_string(source.size()));
  }
  for (const auto& item : source) {
    auto it = index_.find(item.name);
    if (it == index_.end()) {
      throw std::invalid_argument("unexpected parameter " + item.name);
    }
    Tensor& dst = entries_[it->second].tensor;
    if (dst.shape() != item.tensor.shape()) {
      throw ShapeError("parameter " + item.name + " has shape " +
                       ShapeToString(dst.shape()) + ", source has " +
                       ShapeToString(item.tensor.shape()));
    }
    std::copy(item.tensor.values().begin(), item.tensor.values().end(),
              dst.mutable_values().begin());
  }
}

}  // namespace cegi
