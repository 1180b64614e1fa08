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

#ifndef AVSEP_KERNELS_H_
#define AVSEP_KERNELS_H_

#include <cstdint>

// Hot inner loops. The default implementations are tiled and OpenMP-parallel;
// every kernel writes each output element from exactly one thread with a
// fixed serial reduction order, so results are bit-identical for any thread
// count. kernels::ref holds plain serial loops used as the test oracle and as
// the benchmark baseline (tools/kernel_bench.cc).
namespace avsep::kernels {

// c[m*n] = a[m*k] . b[k*n], optionally accumulating into c.
void mm_nn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);

// c[m*n] = a^T . b with a stored [k*m].
void mm_tn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);

// c[m*n] = a . b^T with a [m*k], b [n*k].
void mm_nt(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);

// Depthwise 1-D convolution over [c][t], odd kernel, zero 'same' padding.
// bias may be null.
void dwconv1d(const float* x, const float* w, const float* bias, float* y,
              int64_t c, int64_t t, int k, int dilation);
void dwconv1d_grad_input(const float* gy, const float* w, float* gx, int64_t c,
                         int64_t t, int k, int dilation);
// Accumulates into gw / gb (gb may be null).
void dwconv1d_grad_weight(const float* gy, const float* x, float* gw,
                          float* gb, int64_t c, int64_t t, int k, int dilation);

// y[i] = max(x[i], 0); grad masks by sign of the cached input.
void relu(const float* x, float* y, int64_t n);
void relu_grad(const float* gy, const float* x, float* gx, int64_t n);

void sigmoid(const float* x, float* y, int64_t n);
// gx from cached output y: gy * y * (1 - y).
void sigmoid_grad(const float* gy, const float* y, float* gx, int64_t n);

void hadamard(const float* a, const float* b, float* y, int64_t n);
// y += alpha * x
void axpy(float alpha, const float* x, float* y, int64_t n);
// Adds bias[c] to each row of y[c][t].
void add_bias_rows(float* y, const float* bias, int64_t c, int64_t t);
// Accumulates per-row sums of g[c][t] into gb[c].
void row_sums(const float* g, float* gb, int64_t c, int64_t t);

namespace ref {
void mm_nn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);
void mm_tn(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);
void mm_nt(const float* a, const float* b, float* c, int64_t m, int64_t k,
           int64_t n, bool accumulate = false);
void dwconv1d(const float* x, const float* w, const float* bias, float* y,
              int64_t c, int64_t t, int k, int dilation);
void dwconv1d_grad_input(const float* gy, const float* w, float* gx, int64_t c,
                         int64_t t, int k, int dilation);
void dwconv1d_grad_weight(const float* gy, const float* x, float* gw,
                          float* gb, int64_t c, int64_t t, int k, int dilation);
}  // namespace ref

}  // namespace avsep::kernels

#endif  // AVSEP_KERNELS_H_
