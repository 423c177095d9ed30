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
#include <vector>

#include "cegi/encoder/packing.h"
#include "cegi/injection/injection.h"
#include "cegi/numerics/ops.h"
#include "doctest.h"
#include "gradcheck.h"

namespace cegi {
namespace {

using testing::RandomTensor;

std::vector<double> Values(const Tensor& t) {
  return {t.values().begin(), t.values().end()};
}

Tensor Identity(int64_t d) {
  std::vector<double> values(d * d, 0.0);
  for (int64_t i = 0; i < d; ++i) values[i * d + i] = 1.0;
  return Tensor::FromVector({d, d}, values);
}

TEST_CASE("single source column is copied to every target") {
  Rng rng(1);
  Tensor target = RandomTensor({3, 4}, rng, 1.0, false);
  Tensor source = RandomTensor({3, 1}, rng, 1.0, false);
  AttentionResult r = BilinearAttend(target, source, {RandomTensor({3, 3}, rng)});
  CHECK(Values(r.scores) == std::vector<double>(4, 1.0));
  for (int64_t c = 0; c < 4; ++c) {
    for (int64_t row = 0; row < 3; ++row) {
      CHECK(r.mixed.at(row, c) == doctest::Approx(source.at(row, 0)).epsilon(1e-15));
    }
  }
}

TEST_CASE("zero bilinear form averages the source") {
  Rng rng(2);
  Tensor target = RandomTensor({3, 2}, rng, 1.0, false);
  Tensor source = RandomTensor({3, 5}, rng, 1.0, false);
  AttentionResult r = BilinearAttend(target, source, {Tensor::Zeros({3, 3})});
  for (double s : r.scores.values()) CHECK(s == doctest::Approx(0.2).epsilon(1e-15));
  for (int64_t row = 0; row < 3; ++row) {
    double mean = 0.0;
    for (int64_t c = 0; c < 5; ++c) mean += source.at(row, c) / 5.0;
    for (int64_t c = 0; c < 2; ++c) {
      CHECK(r.mixed.at(row, c) == doctest::Approx(mean).epsilon(1e-13));
    }
  }
}

TEST_CASE("bilinear attention hand case") {
  // H_target = H_source = I, W_g = I: scores softmax of rows of I.
  Tensor h = Identity(2);
  AttentionResult r = BilinearAttend(h, h, {Identity(2)});
  const double big = std::exp(1.0) / (std::exp(1.0) + 1.0);
  const double small = 1.0 / (std::exp(1.0) + 1.0);
  const auto s = Values(r.scores);
  CHECK(s[0] == doctest::Approx(big).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(small).epsilon(1e-15));
  CHECK(s[2] == doctest::Approx(small).epsilon(1e-15));
  CHECK(s[3] == doctest::Approx(big).epsilon(1e-15));
  // G = H_source S^T.
  const auto g = Values(r.mixed);
  CHECK(g[0] == doctest::Approx(big));
  CHECK(g[1] == doctest::Approx(small));
}

TEST_CASE("masked or empty sources give a zero mix") {
  Rng rng(3);
  Tensor target = RandomTensor({3, 2}, rng, 1.0, false);
  Tensor empty = Tensor::Zeros({3, 0});
  AttentionResult r = BilinearAttend(target, empty, {Identity(3)});
  CHECK(r.mixed.shape() == Shape{3, 2});
  CHECK(Values(r.mixed) == std::vector<double>(6, 0.0));
  Tensor source = RandomTensor({3, 2}, rng, 1.0, false);
  const std::vector<char> none = {0, 0};
  CHECK(Values(BilinearAttend(target, source, {Identity(3)}, none).mixed) ==
        std::vector<double>(6, 0.0));
  const std::vector<char> first = {1, 0};
  AttentionResult partial = BilinearAttend(target, source, {Identity(3)}, first);
  for (int64_t c = 0; c < 2; ++c) {
    CHECK(partial.mixed.at(1, c) == doctest::Approx(source.at(1, 0)));
  }
}

TEST_CASE("attention rows are distributions and mixes are convex") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const int64_t d = 1 + static_cast<int64_t>(rng.Uniform() * 5);
    const int64_t a = 1 + static_cast<int64_t>(rng.Uniform() * 6);
    const int64_t b = 1 + static_cast<int64_t>(rng.Uniform() * 6);
    Tensor target = RandomTensor({d, a}, rng, 3.0, false);
    Tensor source = RandomTensor({d, b}, rng, 3.0, false);
    AttentionResult r =
        BilinearAttend(target, source, {RandomTensor({d, d}, rng, 2.0, false)});
    for (int64_t i = 0; i < a; ++i) {
      double total = 0.0;
      for (int64_t j = 0; j < b; ++j) {
        CHECK(r.scores.at(i, j) >= 0.0);
        total += r.scores.at(i, j);
      }
      CHECK(std::abs(total - 1.0) <= 1e-6);
      // Convex combination: each row of G lies within the source's range,
      // and G equals the score-weighted sum exactly.
      for (int64_t row = 0; row < d; ++row) {
        double lo = source.at(row, 0), hi = lo, mix = 0.0;
        for (int64_t j = 0; j < b; ++j) {
          lo = std::min(lo, source.at(row, j));
          hi = std::max(hi, source.at(row, j));
          mix += r.scores.at(i, j) * source.at(row, j);
        }
        CHECK(r.mixed.at(row, i) >= lo - 1e-12);
        CHECK(r.mixed.at(row, i) <= hi + 1e-12);
        CHECK(r.mixed.at(row, i) == doctest::Approx(mix).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("co-matching hand cases and non-negativity") {
  Rng rng(5);
  Tensor h = RandomTensor({2, 3}, rng, 1.0, false);
  // With W_m selecting the difference half only, G = H gives relu(0) + b.
  Tensor difference_only = Tensor::FromVector({2, 4}, {1, 0, 0, 0, 0, 1, 0, 0});
  Tensor m = CoMatch(h, h, {difference_only, Tensor::Zeros({2, 1})});
  CHECK(Values(m) == std::vector<double>(6, 0.0));
  Tensor constant =
      CoMatch(RandomTensor({2, 3}, rng, 1.0, false), h,
              {Tensor::Zeros({2, 4}), Tensor::Column({0.75, 0.75})});
  CHECK(Values(constant) == std::vector<double>(6, 0.75));
  // Hand case: G = [[1,2],[3,4]], H = [[1,1],[1,1]], W_m = [I I], b = -1.
  Tensor g = Tensor::FromVector({2, 2}, {1, 2, 3, 4});
  Tensor ones = Tensor::Full({2, 2}, 1.0);
  Tensor w = Tensor::FromVector({2, 4}, {1, 0, 1, 0, 0, 1, 0, 1});
  // [G - H; G * H] = [[0,1],[2,3],[1,2],[3,4]]; W rows sum pairs.
  Tensor hand = CoMatch(g, ones, {w, Tensor::Column({-1.0, -1.0})});
  CHECK(Values(hand) == std::vector<double>{0, 2, 4, 6});
  for (int trial = 0; trial < 100; ++trial) {
    Tensor out = CoMatch(RandomTensor({3, 4}, rng, 2.0, false),
                         RandomTensor({3, 4}, rng, 2.0, false),
                         {RandomTensor({3, 6}, rng, 2.0, false),
                          RandomTensor({3, 1}, rng, 2.0, false)});
    for (double v : out.values()) CHECK(v >= 0.0);
  }
}

EncoderOutput FakeEncoded(Rng& rng, int64_t d, int64_t t, int64_t n, int64_t h,
                          int64_t k) {
  EncoderOutput out;
  out.paragraph = RandomTensor({d, t}, rng, 1.0, false);
  out.question = RandomTensor({d, n}, rng, 1.0, false);
  out.option = RandomTensor({d, h}, rng, 1.0, false);
  out.evidence = RandomTensor({d, k}, rng, 1.0, false);
  out.layout.paragraph = {1, t};
  out.layout.question = {t + 2, n};
  out.layout.option = {t + n + 3, h};
  out.layout.evidence = {t + n + h + 4, k};
  out.layout.ids.assign(t + n + h + k + 4, 5);
  return out;
}

TEST_CASE("relations and option blocks have anchor widths") {
  Rng rng(6);
  ParameterSet params;
  InjectionParams shared(4, true, params, "inj", rng);
  ParameterSet pair_params;
  InjectionParams per_pair(4, false, pair_params, "inj", rng);
  CHECK(shared.shared());
  CHECK_FALSE(per_pair.shared());
  for (int64_t k : {0, 3}) {
    EncoderOutput encoded = FakeEncoded(rng, 4, 5, 2, 3, k);
    for (const InjectionParams* p : {&shared, &per_pair}) {
      Relations relations = BuildRelations(encoded, *p);
      const int64_t widths[] = {5, 2, 3};
      for (int anchor = 0; anchor < 3; ++anchor) {
        for (int slot = 0; slot < 3; ++slot) {
          CHECK(relations.mixed[anchor][slot].shape() == Shape{4, widths[anchor]});
        }
      }
      if (k == 0) {
        for (int anchor = 0; anchor < 3; ++anchor) {
          CHECK(Values(relations.mixed[anchor][2]) ==
                std::vector<double>(4 * widths[anchor], 0.0));
        }
      }
      OptionBlock block = BuildOptionBlock(encoded, *p);
      CHECK(block.paragraph.shape() == Shape{12, 5});
      CHECK(block.question.shape() == Shape{12, 2});
      CHECK(block.option.shape() == Shape{12, 3});
      CHECK(block.combined.shape() == Shape{12, 10});
    }
  }
}

TEST_CASE("shared attention is symmetric when paragraph equals question") {
  Rng rng(7);
  ParameterSet params;
  InjectionParams shared(3, true, params, "inj", rng);
  EncoderOutput encoded = FakeEncoded(rng, 3, 4, 4, 2, 2);
  encoded.question = encoded.paragraph;
  Relations relations = BuildRelations(encoded, shared);
  // G_P^Q (anchor P, slot 0) and G_Q^P (anchor Q, slot 0).
  CHECK(Values(relations.at(Part::kParagraph, 0)) ==
        Values(relations.at(Part::kQuestion, 0)));
}

TEST_CASE("final assembly widths and option permutation") {
  Rng rng(8);
  ParameterSet params;
  InjectionParams injection(2, true, params, "inj", rng);
  std::vector<OptionBlock> blocks;
  for (int option = 0; option < 3; ++option) {
    blocks.push_back(BuildOptionBlock(FakeEncoded(rng, 2, 2, 2, 2, 1), injection));
  }
  std::vector<OptionBlock> two(blocks.begin(), blocks.begin() + 2);
  FinalRepresentation f = AssembleFinal(two);
  CHECK(f.features.cols() == 12);
  CHECK(f.layout.Width() == 12);
  std::vector<OptionBlock> one(blocks.begin(), blocks.begin() + 1);
  CHECK(Values(AssembleFinal(one).features) == Values(blocks[0].combined));
  FinalRepresentation all = AssembleFinal(blocks);
  std::vector<OptionBlock> swapped = {blocks[1], blocks[0], blocks[2]};
  FinalRepresentation permuted = AssembleFinal(swapped);
  const int64_t w = all.layout.BlockWidth();
  CHECK(Values(SliceCols(permuted.features, 0, w)) ==
        Values(SliceCols(all.features, w, w)));
  CHECK(Values(SliceCols(permuted.features, w, w)) ==
        Values(SliceCols(all.features, 0, w)));
  CHECK(Values(SliceCols(permuted.features, 2 * w, w)) ==
        Values(SliceCols(all.features, 2 * w, w)));
}

TEST_CASE("option block gradients match finite differences") {
  Rng rng(9);
  ParameterSet params;
  InjectionParams injection(3, false, params, "inj", rng);
  EncoderOutput encoded = FakeEncoded(rng, 3, 2, 2, 2, 2);
  std::vector<Tensor> inputs;
  for (Tensor* t : {&encoded.paragraph, &encoded.question, &encoded.option,
                    &encoded.evidence}) {
    *t = Tensor::FromVector(t->shape(), {t->values().begin(), t->values().end()},
                            true);
    inputs.push_back(*t);
  }
  for (const auto& entry : params.entries()) inputs.push_back(entry.tensor);
  Tensor w = RandomTensor({9, 6}, rng, 1.0, false);
  auto result = testing::CheckGradients(
      [&] { return testing::Project(BuildOptionBlock(encoded, injection).combined, w); },
      inputs);
  INFO(result.worst);
  CHECK(result.max_relative_error <= 1e-4);
}

}  // namespace
}  // namespace cegi
