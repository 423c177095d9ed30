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

#ifndef CEGI_NUMERICS_CHECKPOINT_H_
#define CEGI_NUMERICS_CHECKPOINT_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "cegi/numerics/parameters.h"

namespace cegi {

// Flat binary container:
//   "CEGI1"
//   repeated { u32 name_length, name bytes, u32 rank, u64 extents[rank],
//              f64 values[prod(extents)] }
// All integers and floats are little-endian. The record stream runs to the
// end of the file; a partial record is a length error.
inline constexpr char kCheckpointMagic[] = "CEGI1";

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string EncodeCheckpoint(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes);

void SaveCheckpoint(const ParameterSet& params, const std::string& path);
std::vector<NamedTensor> LoadCheckpoint(const std::string& path);
// Loads into an already-constructed set; names and shapes must agree.
void LoadCheckpointInto(ParameterSet& params, const std::string& path);

}  // namespace cegi

#endif  // CEGI_NUMERICS_CHECKPOINT_H_
