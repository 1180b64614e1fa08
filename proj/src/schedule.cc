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

#include "avsep/schedule.h"

#include <limits>

#include "avsep/errors.h"

namespace avsep {

void TrainSchedule::validate() const {
  if (initial_lr <= 0) throw ConfigError("schedule: initial_lr must be positive");
  if (halve_after <= 0) throw ConfigError("schedule: halve_after must be positive");
  if (stop_after < halve_after) {
    throw ConfigError("schedule: stop_after must be >= halve_after");
  }
  if (max_epochs <= 0) throw ConfigError("schedule: max_epochs must be positive");
  if (batch_size <= 0) throw ConfigError("schedule: batch_size must be positive");
}

PlateauTracker::PlateauTracker(const TrainSchedule& s)
    : sched_(s), lr_(s.initial_lr),
      best_(std::numeric_limits<double>::infinity()) {
  sched_.validate();
}

PlateauTracker::Decision PlateauTracker::observe(double dev_loss) {
  ++epoch_;
  Decision d{lr_, false, false, ""};
  if (dev_loss < best_) {
    best_ = dev_loss;
    best_epoch_ = epoch_;
    streak_ = 0;
    d.improved = true;
  } else {
    ++streak_;
  }
  if (streak_ >= sched_.stop_after) {
    d.stop = true;
    d.reason = "plateau";
  } else if (streak_ > 0 && streak_ % sched_.halve_after == 0) {
    lr_ /= 2.0;
  }
  if (!d.stop && epoch_ >= sched_.max_epochs) {
    d.stop = true;
    d.reason = "max_epochs";
  }
  d.lr = lr_;
  return d;
}

}  // namespace avsep
