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

#include "avsep/kernels.h"

#include <algorithm>
#include <cmath>

namespace avsep::kernels {

namespace {
// Column tile sized to keep the streamed b-panel resident in L2.
constexpr int64_t kTile = 512;
}  // namespace

void mm_nn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  const int64_t ntiles = (n + kTile - 1) / kTile;
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t tb = 0; tb < ntiles; ++tb) {
    for (int64_t i = 0; i < m; ++i) {
      const int64_t n0 = tb * kTile;
      const int64_t n1 = std::min(n0 + kTile, n);
      float* cr = c + i * n;
      if (!accumulate) {
        for (int64_t j = n0; j < n1; ++j) cr[j] = 0.0f;
      }
      const float* ar = a + i * k;
      for (int64_t p = 0; p < k; ++p) {
        const float w = ar[p];
        const float* br = b + p * n;
        for (int64_t j = n0; j < n1; ++j) cr[j] += w * br[j];
      }
    }
  }
}

void mm_tn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  const int64_t ntiles = (n + kTile - 1) / kTile;
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t tb = 0; tb < ntiles; ++tb) {
    for (int64_t i = 0; i < m; ++i) {
      const int64_t n0 = tb * kTile;
      const int64_t n1 = std::min(n0 + kTile, n);
      float* cr = c + i * n;
      if (!accumulate) {
        for (int64_t j = n0; j < n1; ++j) cr[j] = 0.0f;
      }
      for (int64_t p = 0; p < k; ++p) {
        const float w = a[p * m + i];
        const float* br = b + p * n;
        for (int64_t j = n0; j < n1; ++j) cr[j] += w * br[j];
      }
    }
  }
}

void mm_nt(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  // The dot product is split over 16 fixed lanes so the compiler can
  // vectorize it; the summation order is defined by the code alone, so the
  // result does not depend on the thread count.
#pragma omp parallel for collapse(2) schedule(static)
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      const float* ar = a + i * k;
      const float* br = b + j * k;
      float lanes[16] = {0};
      int64_t p = 0;
      for (; p + 16 <= k; p += 16) {
        for (int l = 0; l < 16; ++l) lanes[l] += ar[p + l] * br[p + l];
      }
      float acc = 0.0f;
      for (; p < k; ++p) acc += ar[p] * br[p];
      for (int l = 0; l < 16; ++l) acc += lanes[l];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void dwconv1d(const float* x, const float* w, const float* bias, float* y,
              int64_t c, int64_t t, int k, int dilation) {
  const int center = k / 2;
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* xr = x + ch * t;
    float* yr = y + ch * t;
    const float b0 = bias ? bias[ch] : 0.0f;
    for (int64_t i = 0; i < t; ++i) yr[i] = b0;
    for (int kk = 0; kk < k; ++kk) {
      const float wv = w[ch * k + kk];
      const int64_t off = static_cast<int64_t>(kk - center) * dilation;
      const int64_t lo = std::max<int64_t>(0, -off);
      const int64_t hi = std::min<int64_t>(t, t - off);
      for (int64_t i = lo; i < hi; ++i) yr[i] += wv * xr[i + off];
    }
  }
}

void dwconv1d_grad_input(const float* gy, const float* w, float* gx, int64_t c,
                         int64_t t, int k, int dilation) {
  const int center = k / 2;
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* gr = gy + ch * t;
    float* xr = gx + ch * t;
    for (int64_t i = 0; i < t; ++i) xr[i] = 0.0f;
    for (int kk = 0; kk < k; ++kk) {
      const float wv = w[ch * k + kk];
      const int64_t off = static_cast<int64_t>(kk - center) * dilation;
      const int64_t lo = std::max<int64_t>(0, -off);
      const int64_t hi = std::min<int64_t>(t, t - off);
      // y[i] consumed x[i + off], so gx[i + off] += w * gy[i].
      for (int64_t i = lo; i < hi; ++i) xr[i + off] += wv * gr[i];
    }
  }
}

void dwconv1d_grad_weight(const float* gy, const float* x, float* gw,
                          float* gb, int64_t c, int64_t t, int k,
                          int dilation) {
  const int center = k / 2;
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* gr = gy + ch * t;
    const float* xr = x + ch * t;
    for (int kk = 0; kk < k; ++kk) {
      const int64_t off = static_cast<int64_t>(kk - center) * dilation;
      const int64_t lo = std::max<int64_t>(0, -off);
      const int64_t hi = std::min<int64_t>(t, t - off);
      float acc = 0.0f;
      for (int64_t i = lo; i < hi; ++i) acc += gr[i] * xr[i + off];
      gw[ch * k + kk] += acc;
    }
    if (gb) {
      float acc = 0.0f;
      for (int64_t i = 0; i < t; ++i) acc += gr[i];
      gb[ch] += acc;
    }
  }
}

void relu(const float* x, float* y, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_grad(const float* gy, const float* x, float* gx, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : 0.0f;
}

void sigmoid(const float* x, float* y, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void sigmoid_grad(const float* gy, const float* y, float* gx, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) gx[i] = gy[i] * y[i] * (1.0f - y[i]);
}

void hadamard(const float* a, const float* b, float* y, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void axpy(float alpha, const float* x, float* y, int64_t n) {
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void add_bias_rows(float* y, const float* bias, int64_t c, int64_t t) {
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    float* yr = y + ch * t;
    const float b0 = bias[ch];
    for (int64_t i = 0; i < t; ++i) yr[i] += b0;
  }
}

void row_sums(const float* g, float* gb, int64_t c, int64_t t) {
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* gr = g + ch * t;
    float acc = 0.0f;
    for (int64_t i = 0; i < t; ++i) acc += gr[i];
    gb[ch] += acc;
  }
}

namespace ref {

void mm_nn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void mm_tn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t p = 0; p < k; ++p) acc += a[p * m + i] * b[p * n + j];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void mm_nt(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate) {
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (int64_t p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
      c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
    }
  }
}

void dwconv1d(const float* x, const float* w, const float* bias, float* y,
              int64_t c, int64_t t, int k, int dilation) {
  const int center = k / 2;
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t i = 0; i < t; ++i) {
      float acc = bias ? bias[ch] : 0.0f;
      for (int kk = 0; kk < k; ++kk) {
        const int64_t src = i + static_cast<int64_t>(kk - center) * dilation;
        if (src >= 0 && src < t) acc += w[ch * k + kk] * x[ch * t + src];
      }
      y[ch * t + i] = acc;
    }
  }
}

void dwconv1d_grad_input(const float* gy, const float* w, float* gx, int64_t c,
                         int64_t t, int k, int dilation) {
  const int center = k / 2;
  for (int64_t i = 0; i < c * t; ++i) gx[i] = 0.0f;
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t i = 0; i < t; ++i) {
      for (int kk = 0; kk < k; ++kk) {
        const int64_t src = i + static_cast<int64_t>(kk - center) * dilation;
        if (src >= 0 && src < t) {
          gx[ch * t + src] += w[ch * k + kk] * gy[ch * t + i];
        }
      }
    }
  }
}

void dwconv1d_grad_weight(const float* gy, const float* x, float* gw,
                          float* gb, int64_t c, int64_t t, int k,
                          int dilation) {
  const int center = k / 2;
  for (int64_t ch = 0; ch < c; ++ch) {
    for (int64_t i = 0; i < t; ++i) {
      for (int kk = 0; kk < k; ++kk) {
        const int64_t src = i + static_cast<int64_t>(kk - center) * dilation;
        if (src >= 0 && src < t) {
          gw[ch * k + kk] += gy[ch * t + i] * x[ch * t + src];
        }
      }
      if (gb) gb[ch] += gy[ch * t + i];
    }
  }
}

}  // namespace ref

}  // namespace avsep::kernels
