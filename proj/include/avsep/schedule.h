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

#ifndef AVSEP_SCHEDULE_H_
#define AVSEP_SCHEDULE_H_

#include <cstdint>
#include <string>

namespace avsep {

struct TrainSchedule {
  double initial_lr = 1e-3;
  int halve_after = 3;  // consecutive non-improving dev epochs before lr /= 2
  int stop_after = 6;   // consecutive non-improving dev epochs before stopping
  int max_epochs = 100;
  int batch_size = 4;
  uint64_t seed = 17;

  void validate() const;
};

// Dev-loss plateau tracker. An epoch improves only when its dev loss is
// strictly below the best seen so far; the stagnation streak resets on
// improvement. The learning rate is halved each time the streak reaches a
// multiple of halve_after, and training stops when the streak reaches
// stop_after or the epoch budget runs out.
class PlateauTracker {
 public:
  explicit PlateauTracker(const TrainSchedule& s);

  struct Decision {
    double lr;           // learning rate for the next epoch
    bool stop;
    bool improved;
    std::string reason;  // "plateau" | "max_epochs" | "" while running
  };

  // Call once per completed epoch with its dev loss.
  Decision observe(double dev_loss);

  double best() const { return best_; }
  int best_epoch() const { return best_epoch_; }
  int epochs_seen() const { return epoch_; }
  int streak() const { return streak_; }
  double lr() const { return lr_; }

 private:
  TrainSchedule sched_;
  double lr_;
  double best_;
  int best_epoch_ = -1;
  int streak_ = 0;
  int epoch_ = 0;
};

}  // namespace avsep

#endif  // AVSEP_SCHEDULE_H_
