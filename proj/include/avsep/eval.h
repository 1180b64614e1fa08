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

#ifndef AVSEP_EVAL_H_
#define AVSEP_EVAL_H_

#include <optional>
#include <string>
#include <vector>

#include "avsep/jsonio.h"
#include "avsep/mixsim.h"
#include "avsep/model.h"

namespace avsep {

// SI-SNR improvement of the estimate over the unprocessed mixture, both
// measured against the target reference.
double si_snri(const Waveform& mixture, const Waveform& est,
               const Waveform& target);

struct StratumStats {
  int count = 0;
  double si_snr_mean = 0.0;
  double si_snr_median = 0.0;
  double si_snri_mean = 0.0;
  double si_snri_median = 0.0;
};

// One table cell: a model evaluated on one dataset descriptor, stratified by
// the pitch-group pairing.
struct EvalCell {
  std::string model;         // variant, or "mixture" for the pseudo-model row
  std::string visual_field;  // "face" | "mouth" | "-" for the mixture row
  std::string dataset;       // dsav | dssv | ssav
  std::string split;
  StratumStats all, diff, same;
  std::optional<double> pesq_mean;
  int pesq_count = 0;
  int pesq_failures = 0;
};

struct EvalReport {
  std::vector<EvalCell> cells;
  std::string config_digest;

  js to_json() const;
  void write(const std::string& path) const;
  static EvalReport from_json(const js& j);
  static EvalReport read(const std::string& path);
  // Aligned-column text table, one row per cell.
  std::string render_table() const;
};

struct EvalOptions {
  std::string pesq_cmd;  // empty disables the external adapter
};

// Runs the external PESQ evaluator `cmd ref.wav est.wav` and parses the last
// numeric token of its stdout. Throws PesqUnavailable on any failure.
double pesq_adapter(const std::string& cmd, const Waveform& reference,
                    const Waveform& estimate);

// Loads the checkpoint and scores every pair of the dataset exactly once.
EvalCell evaluate(const std::string& ckpt_path, const Dataset& dataset,
                  const CorpusReader& reader, const EvalOptions& opts = {});

// Scores the unprocessed mixture as the estimate; SI-SNRi is identically 0.
EvalCell evaluate_mixture_row(const Dataset& dataset,
                              const CorpusReader& reader,
                              const EvalOptions& opts = {});

}  // namespace avsep

#endif  // AVSEP_EVAL_H_
