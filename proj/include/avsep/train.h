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

#ifndef AVSEP_TRAIN_H_
#define AVSEP_TRAIN_H_

#include <string>
#include <vector>

#include "avsep/jsonio.h"
#include "avsep/mixsim.h"
#include "avsep/model.h"
#include "avsep/schedule.h"

namespace avsep {

// Adam over the trainable parameter set. Parameters that lose their
// trainable flag after construction are skipped at step time.
class Adam {
 public:
  Adam(std::vector<Param*> params, double lr);

  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  void step();

 private:
  std::vector<Param*> params_;
  std::vector<Tensor> m_, v_;
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  int64_t t_ = 0;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double lr = 0.0;           // rate in effect during the epoch
  double epoch_time_s = 0.0;
  double dev_accuracy = -1.0;  // spk step 1 held-out frame accuracy, else -1
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  std::string stop_reason;  // "plateau" | "max_epochs"
  std::string checkpoint_path;
  double best_dev = 0.0;
  int best_epoch = -1;  // 1-based
  // Batch-level dataset assertions (dssv: no aligned visuals; ssav: no
  // cross-speaker mixtures). Violations throw, so a finished run always
  // reports zero; the counters prove the checks ran.
  int64_t decoupling_checks = 0;
  int64_t decoupling_violations = 0;

  js to_json() const;
  // JSON-lines: one record per epoch, then a summary record.
  void write(const std::string& path) const;
};

struct TrainIo {
  const CorpusReader* reader = nullptr;
  std::string out_ckpt;   // best-dev checkpoint; empty skips persisting
  std::string log_path;   // optional JSONL log
  bool verbose = false;   // one stderr progress line per epoch
};

// Mouth-field models consume cropped streams; face-field models consume the
// rendered frames as stored. Corpus videos are stored as face fields.
VideoStream prepare_visual(const ModelConfig& cfg, VideoStream video);

TrainLog train_baseline(SeparationModel& model, const Dataset& train_set,
                        const Dataset& dev_set, const TrainSchedule& sched,
                        const TrainIo& io);

// Step 1 of the decoupled identity strategy: cross-entropy speaker
// classification on single-speaker visual streams from the train split. Each
// speaker's last fifth of utterances is held out for the plateau signal and
// the reported frame accuracy.
TrainLog train_spk_step1(SeparationModel& model, const TrainSchedule& sched,
                         const TrainIo& io);

// Step 2: freezes the pretrained identity extractor and trains extraction
// with SI-SNR on shuffled-visual (dssv) data, reshuffled every epoch.
TrainLog train_spk_step2(SeparationModel& model, const Dataset& train_set,
                         const Dataset& dev_set, const TrainSchedule& sched,
                         const TrainIo& io);

TrainLog train_sync(SeparationModel& model, const Dataset& train_set,
                    const Dataset& dev_set, const TrainSchedule& sched,
                    const TrainIo& io);

TrainLog train_davse(SeparationModel& model, const Dataset& train_set,
                     const Dataset& dev_set, const TrainSchedule& sched,
                     const std::string& spk_ckpt, const std::string& sync_ckpt,
                     const TrainIo& io);

}  // namespace avsep

#endif  // AVSEP_TRAIN_H_
