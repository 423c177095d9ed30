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

#ifndef CEGI_NUMERICS_OPTIMIZER_H_
#define CEGI_NUMERICS_OPTIMIZER_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cegi/numerics/parameters.h"

namespace cegi {

enum class OptimizerMethod { kSgd, kAdam };

struct OptimizerConfig {
  OptimizerMethod method = OptimizerMethod::kAdam;
  double learning_rate = 1e-3;
  // Fraction of total_steps over which the rate ramps linearly up from 0.
  double warmup_proportion = 0.0;
  int64_t total_steps = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Gradients are rescaled so their global norm is at most this; 0 disables.
  double clip_norm = 0.0;
};

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Optimizer {
 public:
  Optimizer(ParameterSet& params, OptimizerConfig config);

  // Applies one update from the accumulated grads. Throws
  // NonFiniteGradientError, leaving every parameter untouched, if any grad
  // is NaN or infinite.
  void Step();
  int64_t steps_taken() const { return step_; }
  double CurrentLearningRate() const;

 private:
  ParameterSet& params_;
  OptimizerConfig config_;
  int64_t step_ = 0;
  std::vector<std::vector<double>> first_moment_;
  std::vector<std::vector<double>> second_moment_;
};

}  // namespace cegi

#endif  // CEGI_NUMERICS_OPTIMIZER_H_
