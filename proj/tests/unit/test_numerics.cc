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

#include <cmath>
#include <filesystem>
#include <vector>

#include "cegi/numerics/checkpoint.h"
#include "cegi/numerics/ops.h"
#include "cegi/numerics/optimizer.h"
#include "cegi/numerics/parameters.h"
#include "doctest.h"
#include "grad_suites.h"

namespace cegi {
namespace {

using testing::RandomTensor;

std::vector<double> Values(const Tensor t) {
  return {t.values().begin(), t.values().end()};
}

double NormOf(const Tensor t) {
  double sq = 0.0;
  for (double v : t.values()) sq += v * v;
  return std::sqrt(sq);
}

TEST_CASE("matmul hand cases and shape errors") {
  Tensor identity = Tensor::FromVector({2, 2}, {1, 0, 0, 1});
  Tensor m = Tensor::FromVector({2, 2}, {1, 2, 3, 4});
  CHECK(Values(MatMul(identity, m)) == Values(m));
  Tensor column = Tensor::FromVector({2, 1}, {0, 1});
  CHECK(Values(MatMul(m, column)) == std::vector<double>{2, 4});
  Tensor a = Tensor::Zeros({2, 3});
  CHECK_THROWS_AS(MatMul(a, a), ShapeError);
}

TEST_CASE("softmax hand cases") {
  Tensor zeros = Tensor::Zeros({2, 1});
  CHECK(Values(Softmax(zeros, 0)) == std::vector<double>{0.5, 0.5});
  Tensor same = Tensor::Full({3, 1}, 7.25);
  for (double v : Values(Softmax(same, 0))) CHECK(v == doctest::Approx(1.0 / 3));
  Tensor logs = Tensor::Column({std::log(1.0), std::log(2.0), std::log(3.0)});
  const auto p = Values(Softmax(logs, 0));
  CHECK(p[0] == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(2.0 / 6).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(3.0 / 6).epsilon(1e-12));
}

TEST_CASE("softmax slices sum to one and ignore shifts along the axis") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t rows = 1 + static_cast<int64_t>(rng.Uniform() * 6);
    const int64_t cols = 1 + static_cast<int64_t>(rng.Uniform() * 6);
    const int64_t axis = trial % 2;
    Tensor x = RandomTensor({rows, cols}, rng, 20.0, false);
    Tensor y = Softmax(x, axis);
    const int64_t slices = axis == 0 ? cols : rows;
    const int64_t length = axis == 0 ? rows : cols;
    for (int64_t s = 0; s < slices; ++s) {
      double total = 0.0;
      for (int64_t i = 0; i < length; ++i) {
        total += axis == 0 ? y.at(i, s) : y.at(s, i);
      }
      CHECK(std::abs(total - 1.0) <= 1e-9);
    }
    // Add a per-slice constant.
    std::vector<double> shift(rows * cols);
    for (int64_t r = 0; r < rows; ++r) {
      for (int64_t c = 0; c < cols; ++c) {
        shift[r * cols + c] = axis == 0 ? 3.0 * c - 5.0 : 2.0 * r + 1.5;
      }
    }
    Tensor shifted = Softmax(AddConstant(x, shift), axis);
    for (int64_t i = 0; i < y.size(); ++i) {
      CHECK(std::abs(shifted.values()[i] - y.values()[i]) <= 1e-12);
    }
  }
}

TEST_CASE("elementwise and relu hand cases") {
  Tensor a = Tensor::FromVector({1, 2}, {1, 2});
  Tensor b = Tensor::FromVector({1, 2}, {3, 4});
  CHECK(Values(Sub(a, a)) == std::vector<double>{0, 0});
  CHECK(Values(Mul(a, Tensor::Full({1, 2}, 1.0))) == Values(a));
  CHECK(Values(Mul(a, b)) == std::vector<double>{3, 8});
  CHECK(Values(Relu(Tensor::FromVector({1, 3}, {-1, 0, 2}))) ==
        std::vector<double>{0, 0, 2});
  CHECK(Values(Relu(Tensor::FromVector({1, 2}, {-1, -4}))) ==
        std::vector<double>{0, 0});
  Tensor x = Tensor::Scalar(3.0, true);
  Backward(Relu(x));
  CHECK(x.grad()[0] == 1.0);
}

TEST_CASE("windowed conv hand cases") {
  Tensor x = Tensor::FromVector({1, 4}, {1, 3, 5, 9});
  Tensor average = Tensor::FromVector({1, 2}, {0.5, 0.5});
  CHECK(Values(WindowedConv(x, 2, 2, average)) == std::vector<double>{2, 7});
  // With two rows the window column is [x0; x1 at col 0; x0; x1 at col 1].
  Tensor two = Tensor::FromVector({2, 4}, {1, 2, 3, 4, 5, 6, 7, 8});
  Tensor selector = Tensor::FromVector({2, 4}, {1, 0, 0, 0, 0, 1, 0, 0});
  CHECK(Values(WindowedConv(two, 2, 2, selector)) ==
        std::vector<double>{1, 3, 5, 7});
  Tensor six = Tensor::Zeros({1, 6});
  CHECK_THROWS(WindowedConv(six, 4, 4, Tensor::Zeros({1, 4})));
}

TEST_CASE("max pool hand cases") {
  Tensor x = Tensor::FromVector({1, 4}, {3, 1, 2, 5});
  CHECK(Values(MaxPool(x, 1, 1)) == Values(x));
  CHECK(Values(MaxPool(x, 2, 2)) == std::vector<double>{3, 5});
  CHECK(Values(MaxPool(Tensor::Full({2, 4}, 1.5), 2, 2)) ==
        std::vector<double>{1.5, 1.5, 1.5, 1.5});
}

TEST_CASE("squash hand cases") {
  CHECK(Values(Squash(Tensor::Zeros({3, 1}))) == std::vector<double>{0, 0, 0});
  Tensor unit = Tensor::Column({0.6, 0.8});
  const auto half = Values(Squash(unit));
  CHECK(half[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(half[1] == doctest::Approx(0.4).epsilon(1e-15));
  const auto v = Values(Squash(Tensor::Column({3, 4})));
  CHECK(v[0] == doctest::Approx(25.0 / 26 * 0.6).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(25.0 / 26 * 0.8).epsilon(1e-14));
}

TEST_CASE("squash is norm-monotone with norms below one") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const int64_t dim = 1 + static_cast<int64_t>(rng.Uniform() * 8);
    Tensor a = RandomTensor({dim, 1}, rng, rng.Uniform(0.01, 30.0), false);
    Tensor b = RandomTensor({dim, 1}, rng, rng.Uniform(0.01, 30.0), false);
    const double na = NormOf(a), nb = NormOf(b);
    const double sa = NormOf(Squash(a)), sb = NormOf(Squash(b));
    CHECK(sa < 1.0);
    CHECK(sb < 1.0);
    if (na < nb) CHECK(sa <= sb);
    if (nb < na) CHECK(sb <= sa);
  }
}

TEST_CASE("backward hand cases") {
  Rng rng(1);
  Tensor a = RandomTensor({2, 3}, rng);
  Backward(Sum(a));
  for (double g : a.grad()) CHECK(g == 1.0);
  Tensor x = Tensor::Scalar(3.0, true);
  Backward(Mul(x, x));
  CHECK(x.grad()[0] == 6.0);
}

TEST_CASE("every primitive matches finite differences") {
  for (uint64_t seed : {1, 2, 3}) {
    for (const auto& check : testing::PrimitiveGradChecks(seed)) {
      INFO(check.name << " " << check.result.worst);
      CHECK(check.result.max_relative_error <= 1e-4);
      CHECK(check.result.checked > 0);
    }
  }
}

TEST_CASE("sgd and adam updates") {
  ParameterSet params;
  Tensor w = params.AddConstant("w", {1, 1}, 1.0);
  OptimizerConfig sgd;
  sgd.method = OptimizerMethod::kSgd;
  sgd.learning_rate = 0.1;
  Optimizer sgd_step(params, sgd);
  w.mutable_grad()[0] = 2.0;
  sgd_step.Step();
  CHECK(w.values()[0] == doctest::Approx(0.8).epsilon(1e-15));

  for (OptimizerMethod method : {OptimizerMethod::kSgd, OptimizerMethod::kAdam}) {
    ParameterSet frozen;
    Tensor z = frozen.AddConstant("z", {2, 1}, 0.7);
    OptimizerConfig config;
    config.method = method;
    Optimizer optimizer(frozen, config);
    frozen.ZeroGrad();
    optimizer.Step();
    CHECK(Values(z) == std::vector<double>{0.7, 0.7});
  }

  // Step one: m = 0.1 g, v = 0.001 g^2, bias-corrected to g and g^2.
  ParameterSet adam_params;
  Tensor p = adam_params.AddConstant("p", {1, 1}, 0.5);
  OptimizerConfig adam;
  adam.learning_rate = 0.01;
  Optimizer adam_step(adam_params, adam);
  const double g = -0.3;
  p.mutable_grad()[0] = g;
  adam_step.Step();
  const double m_hat = (0.1 * g) / (1.0 - 0.9);
  const double v_hat = (0.001 * g * g) / (1.0 - 0.999);
  CHECK(p.values()[0] ==
        doctest::Approx(0.5 - 0.01 * m_hat / (std::sqrt(v_hat) + 1e-8))
            .epsilon(1e-14));
}

TEST_CASE("warmup ramps the learning rate linearly") {
  ParameterSet params;
  params.AddConstant("w", {1, 1}, 0.0);
  OptimizerConfig config;
  config.learning_rate = 1.0;
  config.warmup_proportion = 0.1;
  config.total_steps = 40;
  Optimizer optimizer(params, config);
  CHECK(optimizer.CurrentLearningRate() == doctest::Approx(0.25));
  for (int i = 0; i < 4; ++i) optimizer.Step();
  CHECK(optimizer.CurrentLearningRate() == 1.0);
}

std::vector<double> TrainTinyRegression(uint64_t seed) {
  Rng rng(seed);
  ParameterSet params;
  Tensor w = params.AddXavier("w", {3, 4}, rng);
  Tensor b = params.Add("b", {3, 1});
  Tensor x = RandomTensor({4, 6}, rng, 1.0, false);
  Tensor target = RandomTensor({3, 6}, rng, 1.0, false);
  Optimizer optimizer(params, OptimizerConfig{});
  for (int step = 0; step < 25; ++step) {
    Tensor diff = Sub(AddBias(MatMul(w, x), b), target);
    params.ZeroGrad();
    Backward(Sum(Mul(diff, diff)));
    optimizer.Step();
  }
  std::vector<double> out = Values(w);
  out.insert(out.end(), b.values().begin(), b.values().end());
  return out;
}

TEST_CASE("identical seeds give bit-identical parameters") {
  for (uint64_t seed : {1, 9, 42}) {
    CHECK(TrainTinyRegression(seed) == TrainTinyRegression(seed));
  }
  CHECK(TrainTinyRegression(1) != TrainTinyRegression(2));
}

TEST_CASE("checkpoints round-trip exactly") {
  Rng rng(8);
  ParameterSet params;
  params.AddXavier("layer.w", {3, 5}, rng);
  params.AddConstant("layer.b", {3, 1}, -0.125);
  const std::string path =
      (std::filesystem::temp_directory_path() / "cegi_numerics.ckpt").string();
  SaveCheckpoint(params, path);
  ParameterSet loaded;
  loaded.Add("layer.w", {3, 5});
  loaded.Add("layer.b", {3, 1});
  LoadCheckpointInto(loaded, path);
  for (size_t i = 0; i < params.size(); ++i) {
    CHECK(Values(params.entries()[i].tensor) == Values(loaded.entries()[i].tensor));
  }
  ParameterSet wrong;
  wrong.Add("layer.w", {5, 3});
  wrong.Add("layer.b", {3, 1});
  CHECK_THROWS(LoadCheckpointInto(wrong, path));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace cegi
