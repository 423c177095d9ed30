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

#include <algorithm>
#include <cmath>
#include <vector>

#include "cegi/capsule/capsule_head.h"
#include "cegi/numerics/ops.h"
#include "cegi/pipeline/config.h"
#include "doctest.h"
#include "gradcheck.h"
#include "oracles.h"

namespace cegi {
namespace {

using testing::RandomTensor;

std::vector<double> Values(const Tensor& t) {
  return {t.values().begin(), t.values().end()};
}

Tensor CapsuleWithNorm(double norm) {
  return Tensor::Column({0.0, norm, 0.0});
}

MultiGrainKernels AveragingKernels(int64_t channels) {
  // Each output channel averages its own channel over the window.
  auto averaging = [&](int64_t width) {
    std::vector<double> values(channels * channels * width, 0.0);
    for (int64_t r = 0; r < channels; ++r) {
      for (int64_t k = 0; k < width; ++k) {
        values[r * channels * width + k * channels + r] = 1.0 / width;
      }
    }
    return Tensor::FromVector({channels, channels * width}, values);
  };
  return {averaging(2), Tensor::Zeros({channels, 1}), averaging(4),
          Tensor::Zeros({channels, 1})};
}

FinalLayout Layout(int64_t m, int64_t t, int64_t n, int64_t h) {
  FinalLayout layout;
  layout.options = m;
  layout.paragraph_width = t;
  layout.question_width = n;
  layout.option_width = h;
  return layout;
}

TEST_CASE("multi-grain widths") {
  Rng rng(1);
  ParameterSet params;
  MultiGrainKernels kernels = MultiGrainKernels::Create(6, params, "mg", rng);
  MultiGrainFeatures f = MultiGrain(RandomTensor({6, 8}, rng, 1.0, false), kernels);
  CHECK(f.fine.cols() == 2);
  CHECK(f.coarse.cols() == 2);
  CHECK(f.combined.cols() == 4);
  for (int64_t width : {4, 12, 24, 48}) {
    CHECK(MultiGrain(RandomTensor({6, width}, rng, 1.0, false), kernels)
              .combined.cols() == width / 2);
  }
  CHECK_THROWS_AS(MultiGrain(RandomTensor({6, 6}, rng, 1.0, false), kernels),
                  ShapeError);
  MultiGrainFeatures constant =
      MultiGrain(Tensor::Full({6, 8}, 0.625), AveragingKernels(6));
  for (double v : constant.combined.values()) CHECK(v == doctest::Approx(0.625));
}

TEST_CASE("single-output routing squashes the vote sum") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor votes = RandomTensor({4, 7}, rng, 2.0, false);
    const std::vector<double> expected = testing::SquashOfColumnSum(votes);
    for (int r : {1, 2, 3}) {
      const Tensor single[] = {votes};
      RoutingResult result = RouteVotes(single, r);
      CHECK(Values(result.capsules[0]) == expected);
      for (const auto& c : result.couplings) {
        for (double v : c) CHECK(v == 1.0);
      }
    }
  }
}

TEST_CASE("one iteration uses uniform couplings") {
  Rng rng(3);
  std::vector<Tensor> votes = {RandomTensor({3, 5}, rng, 1.0, false),
                               RandomTensor({3, 5}, rng, 1.0, false),
                               RandomTensor({3, 5}, rng, 1.0, false)};
  RoutingResult result = RouteVotes(votes, 1);
  REQUIRE(result.couplings.size() == 1);
  for (double c : result.couplings[0]) CHECK(c == doctest::Approx(1.0 / 3));
  for (int64_t j = 0; j < 3; ++j) {
    std::vector<double> s(3, 0.0);
    for (int64_t r = 0; r < 3; ++r) {
      for (int64_t i = 0; i < 5; ++i) s[r] += votes[j].at(r, i) / 3.0;
    }
    const auto expected = Values(Squash(Tensor::Column(s)));
    const auto got = Values(result.capsules[j]);
    for (int64_t r = 0; r < 3; ++r) {
      CHECK(got[r] == doctest::Approx(expected[r]).epsilon(1e-12));
    }
  }
}

TEST_CASE("agreement amplifies coupling to the agreed output") {
  // Both inputs vote (1, 1) for output 0; for output 1 they disagree.
  std::vector<Tensor> votes = {
      Tensor::FromVector({2, 2}, {1, 1, 1, 1}),
      Tensor::FromVector({2, 2}, {1, -1, -1, 1}),
  };
  const double first = RouteVotes(votes, 1).couplings[0][0];
  RoutingResult three = RouteVotes(votes, 3);
  CHECK(first == doctest::Approx(0.5));
  for (int64_t i = 0; i < 2; ++i) CHECK(three.couplings[2][i * 2 + 0] > first);
}

TEST_CASE("routing invariants over random inputs") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t outputs = 1 + static_cast<int64_t>(rng.Uniform() * 4);
    const int64_t inputs = 1 + static_cast<int64_t>(rng.Uniform() * 8);
    const int iterations = 1 + static_cast<int>(rng.Uniform() * 4);
    std::vector<Tensor> votes;
    for (int64_t j = 0; j < outputs; ++j) {
      votes.push_back(RandomTensor({3, inputs}, rng, 4.0, false));
    }
    RoutingResult a = RouteVotes(votes, iterations);
    RoutingResult b = RouteVotes(votes, iterations);
    CHECK(a.couplings.size() == static_cast<size_t>(iterations));
    for (const auto& c : a.couplings) {
      for (int64_t i = 0; i < inputs; ++i) {
        double total = 0.0;
        for (int64_t j = 0; j < outputs; ++j) total += c[i * outputs + j];
        CHECK(std::abs(total - 1.0) <= 1e-9);
      }
    }
    for (double norm : CapsuleNorms(a.capsules)) {
      CHECK(norm >= 0.0);
      CHECK(norm < 1.0);
    }
    for (int64_t j = 0; j < outputs; ++j) {
      CHECK(Values(a.capsules[j]) == Values(b.capsules[j]));
    }
  }
}

TEST_CASE("per-option scope routes each column to its owner only") {
  Rng rng(5);
  std::vector<Tensor> votes = {RandomTensor({2, 4}, rng, 1.0, false),
                               RandomTensor({2, 4}, rng, 1.0, false)};
  const std::vector<int64_t> owners = {0, 0, 1, 1};
  RoutingResult result = RouteVotes(votes, 3, owners);
  for (const auto& c : result.couplings) {
    for (int64_t i = 0; i < 4; ++i) {
      CHECK(c[i * 2 + owners[i]] == doctest::Approx(1.0));
      CHECK(c[i * 2 + 1 - owners[i]] == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("margin loss hand cases") {
  const MarginLossParams params;
  std::vector<Tensor> confident = {CapsuleWithNorm(0.95), CapsuleWithNorm(0.05),
                                   CapsuleWithNorm(0.05), CapsuleWithNorm(0.05)};
  CHECK(MarginLoss(confident, 0, params).item() == 0.0);
  std::vector<Tensor> uncertain = {CapsuleWithNorm(0.4), CapsuleWithNorm(0.3),
                                   CapsuleWithNorm(0.3), CapsuleWithNorm(0.3)};
  CHECK(std::abs(MarginLoss(uncertain, 0, params).item() - 0.31) <= 1e-12);
  for (int64_t m : {2, 3, 4, 6}) {
    std::vector<Tensor> equal(m, CapsuleWithNorm(0.5));
    const double expected = 0.16 + (m - 1) * 0.5 * 0.16;
    CHECK(MarginLoss(equal, 1, params).item() == doctest::Approx(expected).epsilon(1e-12));
  }
  const std::vector<double> label = {0, 1, 0, 0};
  CHECK(MarginLoss(uncertain, label, params).item() ==
        doctest::Approx(0.36 + 0.5 * (0.09 + 0.04 + 0.04)).epsilon(1e-12));
  const std::vector<double> bad = {0, 1, 1, 0};
  CHECK_THROWS(MarginLoss(uncertain, bad, params));
  const std::vector<double> short_label = {1, 0};
  CHECK_THROWS(MarginLoss(uncertain, short_label, params));
}

TEST_CASE("margin loss is zero exactly when both margins hold") {
  Rng rng(6);
  const MarginLossParams params;
  for (int trial = 0; trial < 500; ++trial) {
    const int64_t m = 2 + static_cast<int64_t>(rng.Uniform() * 4);
    const int64_t label = static_cast<int64_t>(rng.Uniform() * m);
    std::vector<double> norms(m);
    std::vector<Tensor> capsules;
    for (int64_t j = 0; j < m; ++j) {
      // Mix norms near and away from the thresholds.
      norms[j] = rng.Uniform() < 0.5 ? rng.Uniform(0.0, 0.2) : rng.Uniform(0.8, 0.99);
      capsules.push_back(CapsuleWithNorm(norms[j]));
    }
    bool satisfied = norms[label] >= params.m_plus;
    for (int64_t j = 0; j < m; ++j) {
      if (j != label) satisfied = satisfied && norms[j] <= params.m_minus;
    }
    const double loss = MarginLoss(capsules, label, params).item();
    CHECK(loss >= 0.0);
    CHECK((loss == 0.0) == satisfied);
  }
}

TEST_CASE("prediction picks the largest norm") {
  CHECK(Predict(std::vector<double>{0.2, 0.8, 0.3, 0.1}) == 1);
  CHECK(Predict(std::vector<double>{0.4}) == 0);
  CHECK(Predict(std::vector<double>{0.5, 0.5}) == 0);
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int64_t m = 1 + static_cast<int64_t>(rng.Uniform() * 6);
    std::vector<double> norms(m);
    for (double& n : norms) n = rng.Uniform(0.0, 0.999);
    const int64_t base = Predict(norms);
    std::vector<double> cubed, logged, affine;
    for (double n : norms) {
      cubed.push_back(n * n * n);
      logged.push_back(std::log(n + 1e-3));
      affine.push_back(3.0 * n + 7.0);
    }
    CHECK(Predict(cubed) == base);
    CHECK(Predict(logged) == base);
    CHECK(Predict(affine) == base);
  }
}

TEST_CASE("max-pool head against a brute-force maximum") {
  Rng rng(8);
  Tensor weight = RandomTensor({1, 6}, rng, 1.0, false);
  Tensor bias = Tensor::FromVector({1, 1}, {0.25});
  MaxPoolHead head(weight, bias);
  const FinalLayout layout = Layout(2, 2, 2, 4);  // block 8, F width 16
  MultiGrainFeatures phrases;
  phrases.combined = RandomTensor({6, 8}, rng, 1.0, false);
  const std::vector<int64_t> owners = PhraseOwners(layout);
  CHECK(owners == std::vector<int64_t>{0, 0, 1, 1, 0, 0, 1, 1});
  const auto scores = Values(head.Forward(phrases, layout));
  for (int64_t j = 0; j < 2; ++j) {
    double best = -1e300;
    for (int64_t c = 0; c < 8; ++c) {
      if (owners[c] != j) continue;
      double s = 0.25;
      for (int64_t r = 0; r < 6; ++r) s += weight.at(0, r) * phrases.combined.at(r, c);
      best = std::max(best, s);
    }
    CHECK(scores[j] == doctest::Approx(best).epsilon(1e-14));
  }
  phrases.combined = Tensor::Full({6, 8}, 0.3);
  const auto uniform = Values(head.Forward(phrases, layout));
  CHECK(uniform[0] == uniform[1]);
  // Raising one option's columns along the weight direction makes it win.
  std::vector<double> values(48, 0.0);
  for (int64_t r = 0; r < 6; ++r) {
    for (int64_t c = 0; c < 8; ++c) {
      values[r * 8 + c] = owners[c] == 1 ? weight.at(0, r) : 0.0;
    }
  }
  phrases.combined = Tensor::FromVector({6, 8}, values);
  CHECK(Predict(Values(head.Forward(phrases, layout))) == 1);
}

TEST_CASE("capsule head parameters follow the sharing mode") {
  Rng rng(9);
  CapsuleHeadConfig config;
  config.channels = 6;
  config.options = 3;
  config.routing.capsule_dim = 4;
  for (VoteSharing sharing :
       {VoteSharing::kOwnerRelative, VoteSharing::kPerOutput, VoteSharing::kPerPair}) {
    config.routing.sharing = sharing;
    config.max_inputs = sharing == VoteSharing::kPerPair ? 12 : 0;
    ParameterSet params;
    CapsuleHead head(config, params, "cap", rng);
    if (sharing == VoteSharing::kOwnerRelative) {
      CHECK(params.Contains("cap.vote_map.own"));
      CHECK(params.Contains("cap.vote_map.other"));
      CHECK(params.size() == 2);
    } else {
      CHECK(params.size() == 3);
    }
    MultiGrainFeatures phrases;
    phrases.combined = RandomTensor({6, 12}, rng, 1.0, false);
    RoutingResult result = head.Forward(phrases, Layout(3, 4, 2, 2));
    CHECK(result.capsules.size() == 3);
    CHECK(result.capsules[0].shape() == Shape{4, 1});
  }
}

TEST_CASE("vote init scale multiplies the vote maps") {
  CapsuleHeadConfig config;
  config.channels = 6;
  config.options = 2;
  config.routing.capsule_dim = 4;
  config.vote_init_scale = 1.0;
  Rng rng_a(21);
  ParameterSet full;
  CapsuleHead full_head(config, full, "cap", rng_a);
  config.vote_init_scale = 0.25;
  Rng rng_b(21);
  ParameterSet scaled;
  CapsuleHead scaled_head(config, scaled, "cap", rng_b);
  for (size_t i = 0; i < full.size(); ++i) {
    const auto a = full.entries()[i].tensor.values();
    const auto b = scaled.entries()[i].tensor.values();
    for (size_t k = 0; k < a.size(); ++k) CHECK(b[k] == 0.25 * a[k]);
  }
  config.vote_init_scale = 0.0;
  ParameterSet rejected;
  CHECK_THROWS(CapsuleHead(config, rejected, "cap", rng_b));
}

// Swaps the phrase columns of options 0 and 1 in a layout with blocks of
// width 8 (two L columns per option in each half).
Tensor SwapFirstTwoOptions(const Tensor& combined) {
  const int64_t half = combined.cols() / 2;
  std::vector<Tensor> pieces;
  for (int64_t h = 0; h < 2; ++h) {
    pieces.push_back(SliceCols(combined, h * half + 2, 2));
    pieces.push_back(SliceCols(combined, h * half + 0, 2));
    pieces.push_back(SliceCols(combined, h * half + 4, half - 4));
  }
  return ConcatCols(pieces);
}

TEST_CASE("owner-relative capsules follow option reordering") {
  Rng rng(10);
  CapsuleHeadConfig config;
  config.channels = 5;
  config.options = 3;
  config.routing.capsule_dim = 4;
  ParameterSet params;
  CapsuleHead head(config, params, "cap", rng);
  const FinalLayout layout = Layout(3, 4, 2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    MultiGrainFeatures phrases;
    phrases.combined = RandomTensor({5, 12}, rng, 1.0, false);
    MultiGrainFeatures swapped;
    swapped.combined = SwapFirstTwoOptions(phrases.combined);
    const auto a = CapsuleNorms(head.Forward(phrases, layout).capsules);
    const auto b = CapsuleNorms(head.Forward(swapped, layout).capsules);
    CHECK(b[0] == doctest::Approx(a[1]).epsilon(1e-12));
    CHECK(b[1] == doctest::Approx(a[0]).epsilon(1e-12));
    CHECK(b[2] == doctest::Approx(a[2]).epsilon(1e-12));
  }
}

TEST_CASE("per-output sharing cannot see option order") {
  // With one map per output shared across all positions, each capsule sees
  // an unordered set of columns, so reordering options changes nothing.
  Rng rng(11);
  CapsuleHeadConfig config;
  config.channels = 5;
  config.options = 3;
  config.routing.capsule_dim = 4;
  config.routing.sharing = VoteSharing::kPerOutput;
  ParameterSet params;
  CapsuleHead head(config, params, "cap", rng);
  const FinalLayout layout = Layout(3, 4, 2, 2);
  MultiGrainFeatures phrases;
  phrases.combined = RandomTensor({5, 12}, rng, 1.0, false);
  MultiGrainFeatures swapped;
  swapped.combined = SwapFirstTwoOptions(phrases.combined);
  const auto a = CapsuleNorms(head.Forward(phrases, layout).capsules);
  const auto b = CapsuleNorms(head.Forward(swapped, layout).capsules);
  for (size_t j = 0; j < a.size(); ++j) {
    CHECK(b[j] == doctest::Approx(a[j]).epsilon(1e-12));
  }
}

TEST_CASE("head gradients match finite differences") {
  Rng rng(12);
  CapsuleHeadConfig config;
  config.channels = 4;
  config.options = 2;
  config.routing.capsule_dim = 3;
  const FinalLayout layout = Layout(2, 2, 2, 4);
  for (VoteSharing sharing :
       {VoteSharing::kOwnerRelative, VoteSharing::kPerOutput, VoteSharing::kPerPair}) {
    config.routing.sharing = sharing;
    config.max_inputs = 8;
    ParameterSet params;
    CapsuleHead head(config, params, "cap", rng);
    MultiGrainFeatures phrases;
    phrases.combined = RandomTensor({4, 8}, rng, 1.0, true);
    std::vector<Tensor> inputs = {phrases.combined};
    for (const auto& entry : params.entries()) inputs.push_back(entry.tensor);
    auto result = testing::CheckGradients(
        [&] { return MarginLoss(head.Forward(phrases, layout).capsules, 1); }, inputs);
    INFO(VoteSharingName(sharing) << " " << result.worst);
    CHECK(result.max_relative_error <= 1e-4);
  }
}

}  // namespace
}  // namespace cegi
