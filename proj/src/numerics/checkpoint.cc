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

#include "cegi/numerics/checkpoint.h"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cegi {
namespace {

constexpr size_t kMagicLength = sizeof(kCheckpointMagic) - 1;

template <typename T>
void PutLittleEndian(std::string& out, T value) {
  uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof(T));
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  bool AtEnd() const { return pos_ == bytes_.size(); }

  template <typename T>
  T Get(const char* what) {
    Need(sizeof(T), what);
    uint64_t bits = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
              << (8 * i);
    }
    pos_ += sizeof(T);
    T value;
    std::memcpy(&value, &bits, sizeof(T));
    return value;
  }

  std::string GetBytes(size_t n, const char* what) {
    Need(n, what);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

 private:
  void Need(size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      std::ostringstream msg;
      msg << "checkpoint truncated reading " << what << " at byte " << pos_
          << ": need " << n << ", have " << bytes_.size() - pos_;
      throw CheckpointError(msg.str());
    }
  }

  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string EncodeCheckpoint(const std::vector<NamedTensor>& tensors) {
  std::string out(kCheckpointMagic, kMagicLength);
  for (const auto& item : tensors) {
    PutLittleEndian<uint32_t>(out, static_cast<uint32_t>(item.name.size()));
    out += item.name;
    const Shape& shape = item.tensor.shape();
    PutLittleEndian<uint32_t>(out, static_cast<uint32_t>(shape.size()));
    for (int64_t extent : shape) {
      PutLittleEndian<uint64_t>(out, static_cast<uint64_t>(extent));
    }
    for (double v : item.tensor.values()) PutLittleEndian<double>(out, v);
  }
  return out;
}

std::vector<NamedTensor> DecodeCheckpoint(const std::string& bytes) {
  if (bytes.size() < kMagicLength ||
      bytes.compare(0, kMagicLength, kCheckpointMagic) != 0) {
    throw CheckpointError("not a checkpoint: missing CEGI1 magic");
  }
  Reader reader(bytes);
  reader.GetBytes(kMagicLength, "magic");
  std::vector<NamedTensor> out;
  while (!reader.AtEnd()) {
    const uint32_t name_length = reader.Get<uint32_t>("name length");
    std::string name = reader.GetBytes(name_length, "name");
    const uint32_t rank = reader.Get<uint32_t>("rank");
    Shape shape;
    uint64_t count = 1;
    for (uint32_t i = 0; i < rank; ++i) {
      const uint64_t extent = reader.Get<uint64_t>("extent");
      if (extent > (uint64_t{1} << 40)) {
        throw CheckpointError("implausible extent in parameter " + name);
      }
      shape.push_back(static_cast<int64_t>(extent));
      count *= extent;
    }
    if (count > bytes.size() / sizeof(double)) {
      throw CheckpointError("checkpoint truncated: parameter " + name +
                            " declares more values than the file holds");
    }
    std::vector<double> values(count);
    for (auto& v : values) v = reader.Get<double>("values");
    out.push_back({std::move(name),
                   Tensor::FromVector(std::move(shape), std::move(values))});
  }
  return out;
}

void SaveCheckpoint(const ParameterSet& params, const std::string& path) {
  const std::string bytes = EncodeCheckpoint(params.entries());
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw CheckpointError("cannot open " + path + " for writing");
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw CheckpointError("write failed for " + path);
}

std::vector<NamedTensor> LoadCheckpoint(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw CheckpointError("cannot open checkpoint " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return DecodeCheckpoint(buffer.str());
}

void LoadCheckpointInto(ParameterSet& params, const std::string& path) {
  params.CopyValuesFrom(LoadCheckpoint(path));
}

}  // namespace cegi
