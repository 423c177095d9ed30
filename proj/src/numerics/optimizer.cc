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

#include "cegi/numerics/optimizer.h"

#include <cmath>
#include <sstream>

namespace cegi {

Optimizer::Optimizer(ParameterSet& params, OptimizerConfig config)
    : params_(params), config_(config) {
  if (config_.warmup_proportion < 0.0 || config_.warmup_proportion > 1.0) {
    throw std::invalid_argument("warmup proportion must lie in [0, 1]");
  }
  for (const auto& entry : params_.entries()) {
    first_moment_.emplace_back(entry.tensor.size(), 0.0);
    second_moment_.emplace_back(entry.tensor.size(), 0.0);
  }
}

double Optimizer::CurrentLearningRate() const {
  const double warmup = std::ceil(config_.warmup_proportion *
                                  static_cast<double>(config_.total_steps));
  const double step = static_cast<double>(step_ + 1);
  if (warmup > 0.0 && step <= warmup) {
    return config_.learning_rate * step / warmup;
  }
  return config_.learning_rate;
}

void Optimizer::Step() {
  double sq_norm = 0.0;
  for (const auto& entry : params_.entries()) {
    const auto grad = entry.tensor.grad();
    for (size_t i = 0; i < grad.size(); ++i) {
      if (!std::isfinite(grad[i])) {
        std::ostringstream msg;
        msg << "non-finite gradient " << grad[i] << " in parameter "
            << entry.name << " at flat index " << i << " (step " << step_ + 1
            << ")";
        throw NonFiniteGradientError(msg.str());
      }
      sq_norm += grad[i] * grad[i];
    }
  }
  double grad_scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = std::sqrt(sq_norm);
    if (norm > config_.clip_norm) grad_scale = config_.clip_norm / norm;
  }
  const double lr = CurrentLearningRate();
  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  auto& entries = params_.entries();
  for (size_t p = 0; p < entries.size(); ++p) {
    Tensor& tensor = entries[p].tensor;
    auto values = tensor.mutable_values();
    const auto grad = tensor.grad();
    if (config_.method == OptimizerMethod::kSgd) {
      for (size_t i = 0; i < values.size(); ++i) {
        values[i] -= lr * grad_scale * grad[i];
      }
      continue;
    }
    auto& m = first_moment_[p];
    auto& v = second_moment_[p];
    for (size_t i = 0; i < values.size(); ++i) {
      const double g = grad_scale * grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace cegi
