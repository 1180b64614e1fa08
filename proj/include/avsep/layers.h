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

#ifndef AVSEP_LAYERS_H_
#define AVSEP_LAYERS_H_

#include <string>
#include <vector>

#include "avsep/rng.h"
#include "avsep/tensor.h"

// Explicit forward/backward modules. Each layer caches what its backward
// needs during forward; backward accumulates into Param::grad and returns the
// input gradient. There is no autograd tape: the model classes in model.h
// wire the calls in reverse order by hand.
namespace avsep {

struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  void init(std::string n, std::vector<int64_t> shape) {
    name = std::move(n);
    value = Tensor(shape);
    grad = Tensor(std::move(shape));
  }
  void zero_grad() { grad.fill(0.0f); }
};

void uniform_init(Tensor& t, double limit, Rng& rng);
// He-style uniform bound sqrt(6 / fan_in).
double he_limit(int64_t fan_in);

// 1x1 convolution over [cin, t] -> [cout, t].
struct PointwiseConv {
  Param w, b;  // w [cout, cin], b [cout]
  Tensor x_;

  void init(const std::string& name, int64_t cin, int64_t cout, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy, bool need_gx = true);
  void collect(std::vector<Param*>& out);
};

// Depthwise 1-D convolution, odd kernel, zero 'same' padding, [c, t] -> [c, t].
struct DepthwiseConv1d {
  Param w, b;  // w [c, k], b [c]
  int kernel = 3, dilation = 1;
  Tensor x_;

  void init(const std::string& name, int64_t c, int k, int dil, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy, bool need_gx = true);
  void collect(std::vector<Param*>& out);
};

// Per-channel normalization over the time axis with learned scale and shift.
struct ChanTimeNorm {
  Param gamma, beta;  // [c]
  Tensor xhat_;
  std::vector<float> inv_std_;
  static constexpr float kEps = 1e-5f;

  void init(const std::string& name, int64_t c);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& out);
};

struct Relu {
  Tensor x_;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

struct Sigmoid {
  Tensor y_;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

// Strided 1-D convolution from a mono waveform to [filters, frames], bias
// free. frames = floor((n - kernel) / stride) + 1. Input gradients are never
// needed (the waveform is data), so backward only accumulates weight grads.
struct ConvEncoder {
  Param w;  // [filters, kernel]
  int kernel = 0, stride = 0;
  Tensor cols_;

  void init(const std::string& name, int64_t filters, int k, int s, Rng& rng);
  Tensor forward(const std::vector<float>& x);
  void backward(const Tensor& gy);
  void collect(std::vector<Param*>& out);
  int64_t frames_for(int64_t n) const;
};

// Transposed 1-D convolution from [c, frames] back to a waveform of length
// out_len (overlap-add, then trim or zero-pad the tail).
struct ConvDecoder {
  Param w;  // [c, kernel]
  int kernel = 0, stride = 0;
  Tensor m_;
  int64_t out_len_ = 0;

  void init(const std::string& name, int64_t c, int k, int s, Rng& rng);
  std::vector<float> forward(const Tensor& m, int64_t out_len);
  Tensor backward(const std::vector<float>& g_est);
  void collect(std::vector<Param*>& out);
};

// 3-D convolution stem over single-channel video [t, h, w]:
// temporal 'same' zero padding, spatial valid with stride. Output
// [cout, t, oh, ow]. Input gradients are never needed.
struct Conv3dStem {
  Param w, b;  // w [cout, kt*kh*kw]
  int kt = 5, kh = 7, kw = 7, sh = 4, sw = 4;
  Tensor cols_;
  int64_t t_ = 0, oh_ = 0, ow_ = 0;

  void init(const std::string& name, int64_t cout, int kt_, int ksp, int ssp,
            Rng& rng);
  Tensor forward(const Tensor& video);
  void backward(const Tensor& gy);
  void collect(std::vector<Param*>& out);
};

// Per-frame 2-D convolution, kernel 3, stride 2, padding 1:
// [cin, t, h, w] -> [cout, t, oh, ow] with oh = floor((h-1)/2)+1.
struct Conv2dBlock {
  Param w, b;  // w [cout, cin*9]
  int64_t cin_ = 0;
  Tensor cols_;
  int64_t t_ = 0, h_ = 0, w_in_ = 0, oh_ = 0, ow_ = 0;

  void init(const std::string& name, int64_t cin, int64_t cout, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy, bool need_gx = true);
  void collect(std::vector<Param*>& out);
};

// [c, t, h, w] -> [c, t] spatial mean.
struct GlobalAvgPool2d {
  int64_t h_ = 0, w_ = 0;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

// Linear interpolation along time by an integer ratio: [c, l] -> [c, l*r].
struct LinearUpsample {
  int ratio = 1;
  int64_t in_len_ = 0;
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
};

// Fits [c, t_in] to [c, t_out] by trimming or repeating the last column.
struct TimeFit {
  int64_t in_len_ = 0, out_len_ = 0;
  Tensor forward(const Tensor& x, int64_t out_len);
  Tensor backward(const Tensor& gy);
};

// Residual unit of the separator: x + pw2(norm2(relu2(dw(norm1(relu1(pw1(x))))))).
struct TcnBlock {
  PointwiseConv pw1, pw2;
  Relu relu1, relu2;
  ChanTimeNorm norm1, norm2;
  DepthwiseConv1d dw;

  void init(const std::string& name, int64_t bottleneck, int64_t hidden, int k,
            int dilation, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& out);
};

// Residual temporal unit of the visual branches:
// x + pw(dw(norm(relu(x)))), depthwise-separable with dilation.
struct TemporalResBlock {
  Relu relu;
  ChanTimeNorm norm;
  DepthwiseConv1d dw;
  PointwiseConv pw;

  void init(const std::string& name, int64_t c, int k, int dilation, Rng& rng);
  Tensor forward(const Tensor& x);
  Tensor backward(const Tensor& gy);
  void collect(std::vector<Param*>& out);
};

}  // namespace avsep

#endif  // AVSEP_LAYERS_H_
