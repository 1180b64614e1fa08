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

#include "avsep/losses.h"

#include <cmath>

#include "avsep/errors.h"

namespace avsep {

namespace {

struct Projection {
  std::vector<double> s0, e0;   // mean-subtracted reference / estimate
  std::vector<double> st, en;   // scaled target and residual
  double alpha = 0.0;
  double ss = 0.0;              // <s0, s0>
  double ee = 0.0;              // <e0, e0>
  double eps_eff = 0.0;         // eps scaled by estimate energy
  double a = 0.0, b = 0.0;      // ||st||^2 + eps_eff, ||en||^2 + eps_eff
};

Projection project(std::span<const float> reference,
                   std::span<const float> estimate, const SiSnrOptions& opts) {
  if (reference.empty()) throw InputTooShort("si_snr: empty input");
  if (reference.size() != estimate.size()) {
    throw ShapeError("si_snr: length mismatch (" +
                     std::to_string(reference.size()) + " vs " +
                     std::to_string(estimate.size()) + ")");
  }
  const size_t n = reference.size();
  Projection p;
  p.s0.resize(n);
  p.e0.resize(n);
  double ms = 0.0, me = 0.0;
  if (opts.mean_subtract) {
    for (size_t i = 0; i < n; ++i) {
      ms += reference[i];
      me += estimate[i];
    }
    ms /= static_cast<double>(n);
    me /= static_cast<double>(n);
  }
  for (size_t i = 0; i < n; ++i) {
    p.s0[i] = static_cast<double>(reference[i]) - ms;
    p.e0[i] = static_cast<double>(estimate[i]) - me;
  }
  double dot = 0.0;
  for (size_t i = 0; i < n; ++i) {
    p.ss += p.s0[i] * p.s0[i];
    p.ee += p.e0[i] * p.e0[i];
    dot += p.e0[i] * p.s0[i];
  }
  if (p.ss == 0.0) {
    throw ZeroEnergyError("si_snr: reference has zero energy");
  }
  p.alpha = dot / p.ss;
  p.st.resize(n);
  p.en.resize(n);
  double a = 0.0, b = 0.0;
  for (size_t i = 0; i < n; ++i) {
    p.st[i] = p.alpha * p.s0[i];
    p.en[i] = p.e0[i] - p.st[i];
    a += p.st[i] * p.st[i];
    b += p.en[i] * p.en[i];
  }
  // eps is taken relative to the estimate energy. This keeps the metric
  // exactly scale invariant (both terms scale with the estimate) and bounds
  // it to +/- ~80 dB for any energy; a zero estimate falls back to the
  // absolute floor.
  p.eps_eff = p.ee > 0.0 ? opts.eps * p.ee : opts.eps;
  p.a = a + p.eps_eff;
  p.b = b + p.eps_eff;
  return p;
}

}  // namespace

double si_snr(std::span<const float> reference, std::span<const float> estimate,
              const SiSnrOptions& opts, SiSnrBreakdown* breakdown) {
  Projection p = project(reference, estimate, opts);
  const double value = 10.0 * std::log10(p.a / p.b);
  if (breakdown) {
    breakdown->s_target = std::move(p.st);
    breakdown->e_noise = std::move(p.en);
    breakdown->value_db = value;
  }
  return value;
}

std::vector<double> si_snr_loss_grad(std::span<const float> reference,
                                     std::span<const float> estimate,
                                     const SiSnrOptions& opts) {
  Projection p = project(reference, estimate, opts);
  const size_t n = p.s0.size();
  const double c = 10.0 / std::log(10.0);
  // L = -10 log10(A/B); dA/de0 = 2 alpha s0 + 2 eps e0 (the eps floor tracks
  // the estimate energy), dB/de0 = 2 en + 2 eps e0 (en is orthogonal to s0,
  // so the projection term vanishes).
  const double k = p.ee > 0.0 ? opts.eps : 0.0;
  std::vector<double> g(n);
  for (size_t i = 0; i < n; ++i) {
    const double da = 2.0 * p.alpha * p.s0[i] + 2.0 * k * p.e0[i];
    const double db = 2.0 * p.en[i] + 2.0 * k * p.e0[i];
    g[i] = -c * (da / p.a - db / p.b);
  }
  if (opts.mean_subtract) {
    double gm = 0.0;
    for (double x : g) gm += x;
    gm /= static_cast<double>(n);
    for (double& x : g) x -= gm;
  }
  return g;
}

double ce_loss(const Tensor& logits, int label) {
  if (logits.rank() != 2) throw ShapeError("ce_loss: logits must be [frames, classes]");
  const int64_t frames = logits.dim(0), classes = logits.dim(1);
  if (frames == 0) throw InputTooShort("ce_loss: no frames");
  if (label < 0 || label >= classes) {
    throw LabelError("ce_loss: label " + std::to_string(label) +
                     " outside [0, " + std::to_string(classes) + ")");
  }
  double total = 0.0;
  for (int64_t f = 0; f < frames; ++f) {
    const float* row = logits.data() + f * classes;
    double mx = row[0];
    for (int64_t c = 1; c < classes; ++c) mx = std::max<double>(mx, row[c]);
    double lse = 0.0;
    for (int64_t c = 0; c < classes; ++c) lse += std::exp(row[c] - mx);
    total += (mx + std::log(lse)) - row[label];
  }
  return total / static_cast<double>(frames);
}

Tensor ce_loss_grad(const Tensor& logits, int label) {
  if (logits.rank() != 2) throw ShapeError("ce_loss_grad: logits must be [frames, classes]");
  const int64_t frames = logits.dim(0), classes = logits.dim(1);
  if (frames == 0) throw InputTooShort("ce_loss_grad: no frames");
  if (label < 0 || label >= classes) {
    throw LabelError("ce_loss_grad: label out of range");
  }
  Tensor g({frames, classes});
  const double inv = 1.0 / static_cast<double>(frames);
  for (int64_t f = 0; f < frames; ++f) {
    const float* row = logits.data() + f * classes;
    float* gr = g.data() + f * classes;
    double mx = row[0];
    for (int64_t c = 1; c < classes; ++c) mx = std::max<double>(mx, row[c]);
    double lse = 0.0;
    for (int64_t c = 0; c < classes; ++c) lse += std::exp(row[c] - mx);
    for (int64_t c = 0; c < classes; ++c) {
      const double p = std::exp(row[c] - mx) / lse;
      gr[c] = static_cast<float>((p - (c == label ? 1.0 : 0.0)) * inv);
    }
  }
  return g;
}

}  // namespace avsep
