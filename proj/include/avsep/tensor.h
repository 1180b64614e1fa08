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

#ifndef AVSEP_TENSOR_H_
#define AVSEP_TENSOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "avsep/errors.h"

namespace avsep {

// Dense row-major float32 tensor. This is deliberately a thin buffer-with-
// shape; all math lives in kernels.h and layers.h.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> v;

  Tensor() = default;
  explicit Tensor(std::vector<int64_t> s) : shape(std::move(s)) {
    v.assign(static_cast<size_t>(numel_of(shape)), 0.0f);
  }

  static int64_t numel_of(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) {
      if (d < 0) throw ShapeError("negative tensor dimension");
      n *= d;
    }
    return n;
  }

  static Tensor zeros(std::vector<int64_t> s) { return Tensor(std::move(s)); }

  int64_t numel() const { return static_cast<int64_t>(v.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  int64_t dim(int i) const { return shape.at(static_cast<size_t>(i)); }

  float* data() { return v.data(); }
  const float* data() const { return v.data(); }

  void fill(float x) { std::fill(v.begin(), v.end(), x); }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  std::string shape_str() const {
    std::string s = "[";
    for (size_t i = 0; i < shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(shape[i]);
    }
    return s + "]";
  }
};

inline void check_shape(const Tensor& t, const std::vector<int64_t>& want,
                        const char* what) {
  if (t.shape != want) {
    Tensor w;
    w.shape = want;
    throw ShapeError(std::string(what) + ": got " + t.shape_str() +
                     ", want " + w.shape_str());
  }
}

}  // namespace avsep

#endif  // AVSEP_TENSOR_H_
