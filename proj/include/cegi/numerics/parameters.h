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

#ifndef CEGI_NUMERICS_PARAMETERS_H_
#define CEGI_NUMERICS_PARAMETERS_H_

#include <map>
#include <string>
#include <vector>

#include "cegi/numerics/rng.h"
#include "cegi/numerics/tensor.h"

namespace cegi {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

// Ordered collection of trainable tensors. Registration order is the
// checkpoint order and the optimizer's update order.
class ParameterSet {
 public:
  // Registers a zero-initialized parameter; names must be unique. The
  // returned handle shares storage with the registered tensor.
  Tensor Add(const std::string& name, Shape shape);
  // Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)) over a matrix shape.
  Tensor AddXavier(const std::string& name, Shape shape, Rng& rng);
  Tensor AddConstant(const std::string& name, Shape shape, double value);

  bool Contains(const std::string& name) const;
  const Tensor& Get(const std::string& name) const;
  Tensor& Get(const std::string& name);

  std::vector<NamedTensor>& entries() { return entries_; }
  const std::vector<NamedTensor>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  int64_t ScalarCount() const;

  void ZeroGrad();
  // Overwrites values from another set with identical names and shapes.
  void CopyValuesFrom(const std::vector<NamedTensor>& source);

 private:
  std::vector<NamedTensor> entries_;
  std::map<std::string, size_t> index_;
};

}  // namespace cegi

#endif  // CEGI_NUMERICS_PARAMETERS_H_
