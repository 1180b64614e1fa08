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

#ifndef AVSEP_CONFIG_H_
#define AVSEP_CONFIG_H_

#include <string>

#include "avsep/corpus.h"
#include "avsep/jsonio.h"
#include "avsep/model.h"
#include "avsep/schedule.h"

namespace avsep {

// One JSON file drives a full reproduction run. Sections map onto the
// pipeline stages; unknown keys are rejected everywhere. The SIR range is a
// fixed property of the simulator, not a config knob.
struct RunConfig {
  CorpusConfig corpus;

  struct Simulate {
    int pairs_train = 96;
    int pairs_dev = 16;
    int pairs_test = 64;
    uint64_t seed = 99;
  } simulate;

  ModelConfig model;
  TrainSchedule train;

  struct Eval {
    std::string pesq_cmd;  // empty disables the external PESQ adapter
  } eval;

  // Cross-section consistency (sample rate, fps, resolution must agree
  // between the corpus and the model) plus per-section validation.
  void validate() const;

  js to_json() const;
  static RunConfig from_json(const js& j);
  static RunConfig from_file(const std::string& path);

  // Digest of the canonical JSON form; stamped into reports and dumps.
  std::string digest() const;
};

js corpus_config_to_json(const CorpusConfig& c);
CorpusConfig corpus_config_from_json(const js& j);
js schedule_to_json(const TrainSchedule& s);
TrainSchedule schedule_from_json(const js& j);

}  // namespace avsep

#endif  // AVSEP_CONFIG_H_
