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

#include "cegi/factual/novelty.h"

#include <stdexcept>

namespace cegi {

NoveltyMetrics ComputeNovelty(std::span<const Triple> generated,
                              const KnowledgeStore& training) {
  if (generated.empty()) {
    throw std::invalid_argument("novelty metrics need generated triples");
  }
  int64_t new_triples = 0;
  int64_t new_objects = 0;
  for (const Triple& triple : generated) {
    if (!training.Contains(triple)) ++new_triples;
    if (!training.ContainsObject(triple.object)) ++new_objects;
  }
  const double n = static_cast<double>(generated.size());
  return {new_triples / n, new_objects / n};
}

}  // namespace cegi
