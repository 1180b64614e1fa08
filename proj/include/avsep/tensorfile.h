// Copyright 2026 The avsep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSEP_TENSORFILE_H_
#define AVSEP_TENSORFILE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "avsep/tensor.h"

namespace avsep {

// Named-tensor container, format "AVT1". Little-endian throughout:
//   magic "AVT1" | u32 count | count * entry
//   entry: u32 name_len | name bytes | u32 rank | rank * u32 dims |
//          u32 dtype (0 = float32, 1 = int16) | payload
// Float entries round-trip bitwise; int16 entries are raw quantized payloads
// (the quantization scale is the writer's contract, see wav.h / corpus.cc).
struct TensorEntry {
  enum Dtype { kF32 = 0, kI16 = 1 };
  Dtype dtype = kF32;
  std::vector<int64_t> shape;
  std::vector<float> f32;
  std::vector<int16_t> i16;

  int64_t numel() const { return Tensor::numel_of(shape); }
};

class TensorContainer {
 public:
  void put(const std::string& name, const Tensor& t);
  void put_i16(const std::string& name, std::vector<int64_t> shape,
               std::vector<int16_t> data);

  bool has(const std::string& name) const { return entries_.count(name) > 0; }
  const TensorEntry& entry(const std::string& name) const;
  Tensor tensor(const std::string& name) const;  // f32 entries only
  std::vector<std::string> names() const;        // insertion order

  // Byte-level form, used directly by checkpoint files that prepend their
  // own header. write/read wrap these.
  std::string serialize() const;
  static TensorContainer parse(const unsigned char* p, size_t size,
                               const std::string& what);

  void write(const std::string& path) const;
  static TensorContainer read(const std::string& path);

 private:
  std::vector<std::string> order_;
  std::map<std::string, TensorEntry> entries_;
};

}  // namespace avsep

#endif  // AVSEP_TENSORFILE_H_
