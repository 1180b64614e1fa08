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

#ifndef AVSEP_LOSSES_H_
#define AVSEP_LOSSES_H_

#include <span>
#include <vector>

#include "avsep/tensor.h"

namespace avsep {

struct SiSnrOptions {
  double eps = 1e-8;
  // Subtract the per-signal mean before projecting. On by default; the metric
  // is then invariant to constant offsets in either signal.
  bool mean_subtract = true;
};

struct SiSnrBreakdown {
  std::vector<double> s_target;
  std::vector<double> e_noise;
  double value_db = 0.0;
};

// Scale-invariant SNR in dB of `estimate` against `reference`. Computed in
// double precision. eps enters numerator and denominator scaled by the
// estimate energy, which bounds the value to roughly +/- 80 dB (perfect or
// orthogonal estimates) while keeping exact scale invariance. Raises
// InputTooShort on empty input, ShapeError on length mismatch,
// ZeroEnergyError when the reference has no energy after mean subtraction.
double si_snr(std::span<const float> reference, std::span<const float> estimate,
              const SiSnrOptions& opts = {}, SiSnrBreakdown* breakdown = nullptr);

// Gradient of the training loss L = -si_snr(reference, estimate) with respect
// to the estimate, including the mean-subtraction projection.
std::vector<double> si_snr_loss_grad(std::span<const float> reference,
                                     std::span<const float> estimate,
                                     const SiSnrOptions& opts = {});

// Frame-averaged cross entropy of logits [frames, classes] against a single
// utterance-level label. Raises LabelError for an out-of-range label and
// InputTooShort when there are no frames.
double ce_loss(const Tensor& logits, int label);

// d(ce_loss)/d(logits), shape [frames, classes].
Tensor ce_loss_grad(const Tensor& logits, int label);

}  // namespace avsep

#endif  // AVSEP_LOSSES_H_
