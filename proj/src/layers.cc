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

#include "avsep/layers.h"

#include <cmath>

#include "avsep/errors.h"
#include "avsep/kernels.h"

namespace avsep {

void uniform_init(Tensor& t, double limit, Rng& rng) {
  for (float& x : t.v) x = static_cast<float>(rng.uniform(-limit, limit));
}

double he_limit(int64_t fan_in) { return std::sqrt(6.0 / static_cast<double>(fan_in)); }

// ---------------------------------------------------------------- Pointwise

void PointwiseConv::init(const std::string& name, int64_t cin, int64_t cout,
                         Rng& rng) {
  w.init(name + ".w", {cout, cin});
  b.init(name + ".b", {cout});
  uniform_init(w.value, he_limit(cin), rng);
}

Tensor PointwiseConv::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(0) != w.value.dim(1)) {
    throw ShapeError("PointwiseConv " + w.name + ": bad input " + x.shape_str());
  }
  x_ = x;
  const int64_t cout = w.value.dim(0), cin = w.value.dim(1), t = x.dim(1);
  Tensor y({cout, t});
  kernels::mm_nn(w.value.data(), x.data(), y.data(), cout, cin, t);
  kernels::add_bias_rows(y.data(), b.value.data(), cout, t);
  return y;
}

Tensor PointwiseConv::backward(const Tensor& gy, bool need_gx) {
  const int64_t cout = w.value.dim(0), cin = w.value.dim(1), t = x_.dim(1);
  kernels::mm_nt(gy.data(), x_.data(), w.grad.data(), cout, t, cin, true);
  kernels::row_sums(gy.data(), b.grad.data(), cout, t);
  Tensor gx;
  if (need_gx) {
    gx = Tensor({cin, t});
    kernels::mm_tn(w.value.data(), gy.data(), gx.data(), cin, cout, t);
  }
  return gx;
}

void PointwiseConv::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

// ---------------------------------------------------------------- Depthwise

void DepthwiseConv1d::init(const std::string& name, int64_t c, int k, int dil,
                           Rng& rng) {
  if (k % 2 == 0) throw ConfigError("DepthwiseConv1d: kernel must be odd");
  kernel = k;
  dilation = dil;
  w.init(name + ".w", {c, k});
  b.init(name + ".b", {c});
  uniform_init(w.value, he_limit(k), rng);
}

Tensor DepthwiseConv1d::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(0) != w.value.dim(0)) {
    throw ShapeError("DepthwiseConv1d " + w.name + ": bad input " + x.shape_str());
  }
  x_ = x;
  Tensor y({x.dim(0), x.dim(1)});
  kernels::dwconv1d(x.data(), w.value.data(), b.value.data(), y.data(),
                    x.dim(0), x.dim(1), kernel, dilation);
  return y;
}

Tensor DepthwiseConv1d::backward(const Tensor& gy, bool need_gx) {
  const int64_t c = x_.dim(0), t = x_.dim(1);
  kernels::dwconv1d_grad_weight(gy.data(), x_.data(), w.grad.data(),
                                b.grad.data(), c, t, kernel, dilation);
  Tensor gx;
  if (need_gx) {
    gx = Tensor({c, t});
    kernels::dwconv1d_grad_input(gy.data(), w.value.data(), gx.data(), c, t,
                                 kernel, dilation);
  }
  return gx;
}

void DepthwiseConv1d::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

// --------------------------------------------------------------------- Norm

void ChanTimeNorm::init(const std::string& name, int64_t c) {
  gamma.init(name + ".gamma", {c});
  beta.init(name + ".beta", {c});
  gamma.value.fill(1.0f);
}

Tensor ChanTimeNorm::forward(const Tensor& x) {
  if (x.rank() != 2 || x.dim(0) != gamma.value.dim(0)) {
    throw ShapeError("ChanTimeNorm " + gamma.name + ": bad input " + x.shape_str());
  }
  const int64_t c = x.dim(0), t = x.dim(1);
  xhat_ = Tensor({c, t});
  inv_std_.assign(static_cast<size_t>(c), 0.0f);
  Tensor y({c, t});
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* xr = x.data() + ch * t;
    float mu = 0.0f;
    for (int64_t i = 0; i < t; ++i) mu += xr[i];
    mu /= static_cast<float>(t);
    float var = 0.0f;
    for (int64_t i = 0; i < t; ++i) {
      const float d = xr[i] - mu;
      var += d * d;
    }
    var /= static_cast<float>(t);
    const float is = 1.0f / std::sqrt(var + kEps);
    inv_std_[static_cast<size_t>(ch)] = is;
    float* xh = xhat_.data() + ch * t;
    float* yr = y.data() + ch * t;
    const float g = gamma.value.v[static_cast<size_t>(ch)];
    const float be = beta.value.v[static_cast<size_t>(ch)];
    for (int64_t i = 0; i < t; ++i) {
      xh[i] = (xr[i] - mu) * is;
      yr[i] = g * xh[i] + be;
    }
  }
  return y;
}

Tensor ChanTimeNorm::backward(const Tensor& gy) {
  const int64_t c = xhat_.dim(0), t = xhat_.dim(1);
  Tensor gx({c, t});
#pragma omp parallel for schedule(static)
  for (int64_t ch = 0; ch < c; ++ch) {
    const float* gr = gy.data() + ch * t;
    const float* xh = xhat_.data() + ch * t;
    const float g = gamma.value.v[static_cast<size_t>(ch)];
    float sum_g = 0.0f, sum_gx = 0.0f;
    for (int64_t i = 0; i < t; ++i) {
      sum_g += gr[i];
      sum_gx += gr[i] * xh[i];
    }
    gamma.grad.v[static_cast<size_t>(ch)] += sum_gx;
    beta.grad.v[static_cast<size_t>(ch)] += sum_g;
    const float is = inv_std_[static_cast<size_t>(ch)];
    const float tf = static_cast<float>(t);
    float* gxr = gx.data() + ch * t;
    for (int64_t i = 0; i < t; ++i) {
      gxr[i] = g * is / tf * (tf * gr[i] - sum_g - xh[i] * sum_gx);
    }
  }
  return gx;
}

void ChanTimeNorm::collect(std::vector<Param*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

// --------------------------------------------------------------- Activations

Tensor Relu::forward(const Tensor& x) {
  x_ = x;
  Tensor y;
  y.shape = x.shape;
  y.v.resize(x.v.size());
  kernels::relu(x.data(), y.data(), x.numel());
  return y;
}

Tensor Relu::backward(const Tensor& gy) {
  Tensor gx;
  gx.shape = x_.shape;
  gx.v.resize(x_.v.size());
  kernels::relu_grad(gy.data(), x_.data(), gx.data(), x_.numel());
  return gx;
}

Tensor Sigmoid::forward(const Tensor& x) {
  Tensor y;
  y.shape = x.shape;
  y.v.resize(x.v.size());
  kernels::sigmoid(x.data(), y.data(), x.numel());
  y_ = y;
  return y;
}

Tensor Sigmoid::backward(const Tensor& gy) {
  Tensor gx;
  gx.shape = y_.shape;
  gx.v.resize(y_.v.size());
  kernels::sigmoid_grad(gy.data(), y_.data(), gx.data(), y_.numel());
  return gx;
}

// ------------------------------------------------------------------ Encoder

void ConvEncoder::init(const std::string& name, int64_t filters, int k, int s,
                       Rng& rng) {
  kernel = k;
  stride = s;
  w.init(name + ".w", {filters, k});
  uniform_init(w.value, he_limit(k), rng);
}

int64_t ConvEncoder::frames_for(int64_t n) const {
  if (n < kernel) {
    throw InputTooShort("encoder: input of " + std::to_string(n) +
                        " samples is shorter than one kernel (" +
                        std::to_string(kernel) + ")");
  }
  return (n - kernel) / stride + 1;
}

Tensor ConvEncoder::forward(const std::vector<float>& x) {
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t frames = frames_for(n);
  cols_ = Tensor({kernel, frames});
#pragma omp parallel for schedule(static)
  for (int64_t kk = 0; kk < kernel; ++kk) {
    float* row = cols_.data() + kk * frames;
    for (int64_t t = 0; t < frames; ++t) row[t] = x[t * stride + kk];
  }
  const int64_t f = w.value.dim(0);
  Tensor y({f, frames});
  kernels::mm_nn(w.value.data(), cols_.data(), y.data(), f, kernel, frames);
  return y;
}

void ConvEncoder::backward(const Tensor& gy) {
  const int64_t f = w.value.dim(0), frames = cols_.dim(1);
  kernels::mm_nt(gy.data(), cols_.data(), w.grad.data(), f, frames, kernel,
                 true);
}

void ConvEncoder::collect(std::vector<Param*>& out) { out.push_back(&w); }

// ------------------------------------------------------------------ Decoder

void ConvDecoder::init(const std::string& name, int64_t c, int k, int s,
                       Rng& rng) {
  kernel = k;
  stride = s;
  w.init(name + ".w", {c, k});
  uniform_init(w.value, he_limit(k), rng);
}

std::vector<float> ConvDecoder::forward(const Tensor& m, int64_t out_len) {
  if (m.rank() != 2 || m.dim(0) != w.value.dim(0)) {
    throw ShapeError("ConvDecoder " + w.name + ": bad input " + m.shape_str());
  }
  m_ = m;
  out_len_ = out_len;
  const int64_t c = m.dim(0), frames = m.dim(1);
  Tensor p({kernel, frames});
  kernels::mm_tn(w.value.data(), m.data(), p.data(), kernel, c, frames);
  const int64_t full = (frames - 1) * stride + kernel;
  std::vector<float> est(static_cast<size_t>(out_len), 0.0f);
  // Overlap-add; serial scatter keeps the summation order fixed.
  for (int64_t t = 0; t < frames; ++t) {
    const int64_t base = t * stride;
    for (int64_t kk = 0; kk < kernel; ++kk) {
      const int64_t j = base + kk;
      if (j < out_len) est[static_cast<size_t>(j)] += p.v[static_cast<size_t>(kk * frames + t)];
    }
  }
  (void)full;
  return est;
}

Tensor ConvDecoder::backward(const std::vector<float>& g_est) {
  const int64_t c = m_.dim(0), frames = m_.dim(1);
  const int64_t n = static_cast<int64_t>(g_est.size());
  Tensor gp({kernel, frames});
#pragma omp parallel for schedule(static)
  for (int64_t kk = 0; kk < kernel; ++kk) {
    float* row = gp.data() + kk * frames;
    for (int64_t t = 0; t < frames; ++t) {
      const int64_t j = t * stride + kk;
      row[t] = j < n ? g_est[static_cast<size_t>(j)] : 0.0f;
    }
  }
  kernels::mm_nt(m_.data(), gp.data(), w.grad.data(), c, frames, kernel, true);
  Tensor gm({c, frames});
  kernels::mm_nn(w.value.data(), gp.data(), gm.data(), c, kernel, frames);
  return gm;
}

void ConvDecoder::collect(std::vector<Param*>& out) { out.push_back(&w); }

// --------------------------------------------------------------- Conv3dStem

void Conv3dStem::init(const std::string& name, int64_t cout, int kt_, int ksp,
                      int ssp, Rng& rng) {
  kt = kt_;
  kh = kw = ksp;
  sh = sw = ssp;
  w.init(name + ".w", {cout, static_cast<int64_t>(kt) * kh * kw});
  b.init(name + ".b", {cout});
  uniform_init(w.value, he_limit(static_cast<int64_t>(kt) * kh * kw), rng);
}

Tensor Conv3dStem::forward(const Tensor& video) {
  if (video.rank() != 3) throw ShapeError("Conv3dStem: video must be [t, h, w]");
  const int64_t t = video.dim(0), h = video.dim(1), wd = video.dim(2);
  if (h < kh || wd < kw) throw ShapeError("Conv3dStem: frame smaller than kernel");
  t_ = t;
  oh_ = (h - kh) / sh + 1;
  ow_ = (wd - kw) / sw + 1;
  const int64_t kvol = static_cast<int64_t>(kt) * kh * kw;
  const int64_t cols_n = t * oh_ * ow_;
  cols_ = Tensor({kvol, cols_n});
  const int tpad = kt / 2;
#pragma omp parallel for schedule(static)
  for (int64_t ti = 0; ti < t; ++ti) {
    for (int64_t oy = 0; oy < oh_; ++oy) {
      for (int64_t ox = 0; ox < ow_; ++ox) {
        const int64_t col = (ti * oh_ + oy) * ow_ + ox;
        int64_t r = 0;
        for (int dt = 0; dt < kt; ++dt) {
          const int64_t src_t = ti + dt - tpad;
          for (int dy = 0; dy < kh; ++dy) {
            const int64_t src_y = oy * sh + dy;
            for (int dx = 0; dx < kw; ++dx, ++r) {
              const int64_t src_x = ox * sw + dx;
              float v = 0.0f;
              if (src_t >= 0 && src_t < t) {
                v = video.v[static_cast<size_t>((src_t * h + src_y) * wd + src_x)];
              }
              cols_.v[static_cast<size_t>(r * cols_n + col)] = v;
            }
          }
        }
      }
    }
  }
  const int64_t cout = w.value.dim(0);
  Tensor y({cout, t, oh_, ow_});
  kernels::mm_nn(w.value.data(), cols_.data(), y.data(), cout, kvol, cols_n);
  kernels::add_bias_rows(y.data(), b.value.data(), cout, cols_n);
  return y;
}

void Conv3dStem::backward(const Tensor& gy) {
  const int64_t cout = w.value.dim(0);
  const int64_t kvol = static_cast<int64_t>(kt) * kh * kw;
  const int64_t cols_n = cols_.dim(1);
  kernels::mm_nt(gy.data(), cols_.data(), w.grad.data(), cout, cols_n, kvol,
                 true);
  kernels::row_sums(gy.data(), b.grad.data(), cout, cols_n);
}

void Conv3dStem::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

// -------------------------------------------------------------- Conv2dBlock

void Conv2dBlock::init(const std::string& name, int64_t cin, int64_t cout,
                       Rng& rng) {
  cin_ = cin;
  w.init(name + ".w", {cout, cin * 9});
  b.init(name + ".b", {cout});
  uniform_init(w.value, he_limit(cin * 9), rng);
}

Tensor Conv2dBlock::forward(const Tensor& x) {
  if (x.rank() != 4 || x.dim(0) != cin_) {
    throw ShapeError("Conv2dBlock " + w.name + ": bad input " + x.shape_str());
  }
  t_ = x.dim(1);
  h_ = x.dim(2);
  w_in_ = x.dim(3);
  oh_ = (h_ - 1) / 2 + 1;
  ow_ = (w_in_ - 1) / 2 + 1;
  const int64_t cols_n = t_ * oh_ * ow_;
  cols_ = Tensor({cin_ * 9, cols_n});
#pragma omp parallel for schedule(static)
  for (int64_t ti = 0; ti < t_; ++ti) {
    for (int64_t ci = 0; ci < cin_; ++ci) {
      const float* img = x.data() + (ci * t_ + ti) * h_ * w_in_;
      for (int dy = 0; dy < 3; ++dy) {
        for (int dx = 0; dx < 3; ++dx) {
          float* row = cols_.data() + (ci * 9 + dy * 3 + dx) * cols_n + ti * oh_ * ow_;
          for (int64_t oy = 0; oy < oh_; ++oy) {
            const int64_t sy = oy * 2 + dy - 1;
            for (int64_t ox = 0; ox < ow_; ++ox) {
              const int64_t sx = ox * 2 + dx - 1;
              float v = 0.0f;
              if (sy >= 0 && sy < h_ && sx >= 0 && sx < w_in_) {
                v = img[sy * w_in_ + sx];
              }
              row[oy * ow_ + ox] = v;
            }
          }
        }
      }
    }
  }
  const int64_t cout = w.value.dim(0);
  Tensor y({cout, t_, oh_, ow_});
  kernels::mm_nn(w.value.data(), cols_.data(), y.data(), cout, cin_ * 9, cols_n);
  kernels::add_bias_rows(y.data(), b.value.data(), cout, cols_n);
  return y;
}

Tensor Conv2dBlock::backward(const Tensor& gy, bool need_gx) {
  const int64_t cout = w.value.dim(0);
  const int64_t cols_n = t_ * oh_ * ow_;
  kernels::mm_nt(gy.data(), cols_.data(), w.grad.data(), cout, cols_n, cin_ * 9,
                 true);
  kernels::row_sums(gy.data(), b.grad.data(), cout, cols_n);
  Tensor gx;
  if (!need_gx) return gx;
  Tensor gcols({cin_ * 9, cols_n});
  kernels::mm_tn(w.value.data(), gy.data(), gcols.data(), cin_ * 9, cout,
                 cols_n);
  gx = Tensor({cin_, t_, h_, w_in_});
  // col2im scatter; frames are independent, so parallelizing over them keeps
  // each output element single-writer.
#pragma omp parallel for schedule(static)
  for (int64_t ti = 0; ti < t_; ++ti) {
    for (int64_t ci = 0; ci < cin_; ++ci) {
      float* img = gx.data() + (ci * t_ + ti) * h_ * w_in_;
      for (int dy = 0; dy < 3; ++dy) {
        for (int dx = 0; dx < 3; ++dx) {
          const float* row =
              gcols.data() + (ci * 9 + dy * 3 + dx) * cols_n + ti * oh_ * ow_;
          for (int64_t oy = 0; oy < oh_; ++oy) {
            const int64_t sy = oy * 2 + dy - 1;
            if (sy < 0 || sy >= h_) continue;
            for (int64_t ox = 0; ox < ow_; ++ox) {
              const int64_t sx = ox * 2 + dx - 1;
              if (sx < 0 || sx >= w_in_) continue;
              img[sy * w_in_ + sx] += row[oy * ow_ + ox];
            }
          }
        }
      }
    }
  }
  return gx;
}

void Conv2dBlock::collect(std::vector<Param*>& out) {
  out.push_back(&w);
  out.push_back(&b);
}

// -------------------------------------------------------------------- Pool

Tensor GlobalAvgPool2d::forward(const Tensor& x) {
  if (x.rank() != 4) throw ShapeError("GlobalAvgPool2d: input must be [c,t,h,w]");
  const int64_t c = x.dim(0), t = x.dim(1);
  h_ = x.dim(2);
  w_ = x.dim(3);
  const int64_t hw = h_ * w_;
  Tensor y({c, t});
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    for (int64_t ti = 0; ti < t; ++ti) {
      const float* img = x.data() + (ci * t + ti) * hw;
      float acc = 0.0f;
      for (int64_t i = 0; i < hw; ++i) acc += img[i];
      y.v[static_cast<size_t>(ci * t + ti)] = acc / static_cast<float>(hw);
    }
  }
  return y;
}

Tensor GlobalAvgPool2d::backward(const Tensor& gy) {
  const int64_t c = gy.dim(0), t = gy.dim(1);
  const int64_t hw = h_ * w_;
  Tensor gx({c, t, h_, w_});
  const float inv = 1.0f / static_cast<float>(hw);
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    for (int64_t ti = 0; ti < t; ++ti) {
      const float g = gy.v[static_cast<size_t>(ci * t + ti)] * inv;
      float* img = gx.data() + (ci * t + ti) * hw;
      for (int64_t i = 0; i < hw; ++i) img[i] = g;
    }
  }
  return gx;
}

// ----------------------------------------------------------------- Upsample

Tensor LinearUpsample::forward(const Tensor& x) {
  if (x.rank() != 2) throw ShapeError("LinearUpsample: input must be [c, l]");
  const int64_t c = x.dim(0), l = x.dim(1);
  in_len_ = l;
  const int64_t out = l * ratio;
  Tensor y({c, out});
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    const float* xr = x.data() + ci * l;
    float* yr = y.data() + ci * out;
    for (int64_t j = 0; j < out; ++j) {
      // Sample centers: output j sits at (j + 0.5)/ratio - 0.5 in input space.
      const double u = (static_cast<double>(j) + 0.5) / ratio - 0.5;
      int64_t u0 = static_cast<int64_t>(std::floor(u));
      double frac = u - static_cast<double>(u0);
      if (u0 < 0) {
        u0 = 0;
        frac = 0.0;
      }
      if (u0 >= l - 1) {
        u0 = l - 1;
        frac = 0.0;
      }
      const float a = xr[u0];
      const float b2 = u0 + 1 < l ? xr[u0 + 1] : xr[u0];
      yr[j] = static_cast<float>((1.0 - frac) * a + frac * b2);
    }
  }
  return y;
}

Tensor LinearUpsample::backward(const Tensor& gy) {
  const int64_t c = gy.dim(0), out = gy.dim(1);
  const int64_t l = in_len_;
  Tensor gx({c, l});
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    const float* gr = gy.data() + ci * out;
    float* xr = gx.data() + ci * l;
    for (int64_t j = 0; j < out; ++j) {
      const double u = (static_cast<double>(j) + 0.5) / ratio - 0.5;
      int64_t u0 = static_cast<int64_t>(std::floor(u));
      double frac = u - static_cast<double>(u0);
      if (u0 < 0) {
        u0 = 0;
        frac = 0.0;
      }
      if (u0 >= l - 1) {
        u0 = l - 1;
        frac = 0.0;
      }
      xr[u0] += static_cast<float>((1.0 - frac) * gr[j]);
      if (u0 + 1 < l) xr[u0 + 1] += static_cast<float>(frac * gr[j]);
    }
  }
  return gx;
}

// ------------------------------------------------------------------ TimeFit

Tensor TimeFit::forward(const Tensor& x, int64_t out_len) {
  if (x.rank() != 2) throw ShapeError("TimeFit: input must be [c, t]");
  const int64_t c = x.dim(0), t = x.dim(1);
  if (t == 0) throw ShapeError("TimeFit: empty input");
  in_len_ = t;
  out_len_ = out_len;
  Tensor y({c, out_len});
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    const float* xr = x.data() + ci * t;
    float* yr = y.data() + ci * out_len;
    for (int64_t j = 0; j < out_len; ++j) yr[j] = xr[j < t ? j : t - 1];
  }
  return y;
}

Tensor TimeFit::backward(const Tensor& gy) {
  const int64_t c = gy.dim(0);
  Tensor gx({c, in_len_});
#pragma omp parallel for schedule(static)
  for (int64_t ci = 0; ci < c; ++ci) {
    const float* gr = gy.data() + ci * out_len_;
    float* xr = gx.data() + ci * in_len_;
    for (int64_t j = 0; j < out_len_; ++j) {
      xr[j < in_len_ ? j : in_len_ - 1] += gr[j];
    }
  }
  return gx;
}

// ----------------------------------------------------------------- TcnBlock

void TcnBlock::init(const std::string& name, int64_t bottleneck, int64_t hidden,
                    int k, int dilation, Rng& rng) {
  pw1.init(name + ".pw1", bottleneck, hidden, rng);
  norm1.init(name + ".norm1", hidden);
  dw.init(name + ".dw", hidden, k, dilation, rng);
  norm2.init(name + ".norm2", hidden);
  pw2.init(name + ".pw2", hidden, bottleneck, rng);
}

Tensor TcnBlock::forward(const Tensor& x) {
  Tensor h = pw1.forward(x);
  h = relu1.forward(h);
  h = norm1.forward(h);
  h = dw.forward(h);
  h = relu2.forward(h);
  h = norm2.forward(h);
  h = pw2.forward(h);
  kernels::axpy(1.0f, x.data(), h.data(), h.numel());
  return h;
}

Tensor TcnBlock::backward(const Tensor& gy) {
  Tensor g = pw2.backward(gy);
  g = norm2.backward(g);
  g = relu2.backward(g);
  g = dw.backward(g);
  g = norm1.backward(g);
  g = relu1.backward(g);
  g = pw1.backward(g);
  kernels::axpy(1.0f, gy.data(), g.data(), g.numel());
  return g;
}

void TcnBlock::collect(std::vector<Param*>& out) {
  pw1.collect(out);
  norm1.collect(out);
  dw.collect(out);
  norm2.collect(out);
  pw2.collect(out);
}

// --------------------------------------------------------- TemporalResBlock

void TemporalResBlock::init(const std::string& name, int64_t c, int k,
                            int dilation, Rng& rng) {
  norm.init(name + ".norm", c);
  dw.init(name + ".dw", c, k, dilation, rng);
  pw.init(name + ".pw", c, c, rng);
}

Tensor TemporalResBlock::forward(const Tensor& x) {
  Tensor h = relu.forward(x);
  h = norm.forward(h);
  h = dw.forward(h);
  h = pw.forward(h);
  kernels::axpy(1.0f, x.data(), h.data(), h.numel());
  return h;
}

Tensor TemporalResBlock::backward(const Tensor& gy) {
  Tensor g = pw.backward(gy);
  g = dw.backward(g);
  g = norm.backward(g);
  g = relu.backward(g);
  kernels::axpy(1.0f, gy.data(), g.data(), g.numel());
  return g;
}

void TemporalResBlock::collect(std::vector<Param*>& out) {
  norm.collect(out);
  dw.collect(out);
  pw.collect(out);
}

}  // namespace avsep
