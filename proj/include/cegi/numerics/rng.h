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

#ifndef CEGI_NUMERICS_RNG_H_
#define CEGI_NUMERICS_RNG_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace cegi {

// Seeded generator. The engine is fully specified by the standard; the
// conversions below are ours so that draws are identical on every standard
// library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n).
  int64_t UniformInt(int64_t n);
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (int64_t i = static_cast<int64_t>(items.size()) - 1; i > 0; --i) {
      std::swap(items[i], items[UniformInt(i + 1)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cegi

#endif  // CEGI_NUMERICS_RNG_H_
