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

#ifndef CEGI_FACTUAL_NOVELTY_H_
#define CEGI_FACTUAL_NOVELTY_H_

#include <span>

#include "cegi/factual/knowledge_store.h"

namespace cegi {

struct NoveltyMetrics {
  double novel_triples = 0.0;  // N/T sro
  double novel_objects = 0.0;  // N/T o
};

// Fractions of the generated triples that are absent from `training`, and
// of their objects that never occur as a training object. Both are taken
// over the generated list as given (repeats count). Throws when empty.
NoveltyMetrics ComputeNovelty(std::span<const Triple> generated,
                              const KnowledgeStore& training);

}  // namespace cegi

#endif  // CEGI_FACTUAL_NOVELTY_H_
