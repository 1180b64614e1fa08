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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "avsep/errors.h"
#include "avsep/schedule.h"

using namespace avsep;

namespace {

TrainSchedule sched(double lr = 1e-3, int halve = 3, int stop = 6,
                    int max_epochs = 100) {
  TrainSchedule s;
  s.initial_lr = lr;
  s.halve_after = halve;
  s.stop_after = stop;
  s.max_epochs = max_epochs;
  return s;
}

}  // namespace

TEST_CASE("schedule validation rejects bad fields") {
  CHECK_NOTHROW(sched().validate());
  CHECK_THROWS_AS(sched(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(sched(1e-3, 0).validate(), ConfigError);
  CHECK_THROWS_AS(sched(1e-3, 4, 3).validate(), ConfigError);
  CHECK_THROWS_AS(sched(1e-3, 3, 6, 0).validate(), ConfigError);
  TrainSchedule s = sched();
  s.batch_size = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("flat dev loss halves at the streak multiple and stops at the cap") {
  PlateauTracker t(sched(1e-3, 3, 6));
  auto d = t.observe(1.0);  // first epoch always improves on +inf
  CHECK(d.improved);
  CHECK(d.lr == 1e-3);
  for (int i = 0; i < 2; ++i) {
    d = t.observe(1.0);
    CHECK_FALSE(d.improved);
    CHECK(d.lr == 1e-3);
    CHECK_FALSE(d.stop);
  }
  d = t.observe(1.0);  // streak 3: halve
  CHECK(d.lr == 0.5e-3);
  CHECK_FALSE(d.stop);
  d = t.observe(1.0);  // streak 4
  d = t.observe(1.0);  // streak 5
  CHECK(d.lr == 0.5e-3);
  CHECK_FALSE(d.stop);
  d = t.observe(1.0);  // streak 6: stop, no second halve
  CHECK(d.stop);
  CHECK(d.reason == "plateau");
  CHECK(d.lr == 0.5e-3);
  CHECK(t.best() == 1.0);
  CHECK(t.best_epoch() == 1);
  CHECK(t.epochs_seen() == 7);
}

TEST_CASE("equal dev loss is not an improvement") {
  PlateauTracker t(sched());
  CHECK(t.observe(2.0).improved);
  CHECK_FALSE(t.observe(2.0).improved);
  CHECK(t.streak() == 1);
  CHECK(t.observe(1.9999).improved);
  CHECK(t.streak() == 0);
}

TEST_CASE("improvement resets the streak before it reaches the thresholds") {
  PlateauTracker t(sched(1e-3, 3, 6));
  t.observe(1.0);
  t.observe(1.5);
  t.observe(1.5);  // streak 2
  auto d = t.observe(0.5);
  CHECK(d.improved);
  CHECK(t.streak() == 0);
  CHECK(d.lr == 1e-3);  // never reached a halving point
  CHECK(t.best() == 0.5);
  CHECK(t.best_epoch() == 4);
}

TEST_CASE("repeated stagnation halves at every streak multiple") {
  PlateauTracker t(sched(8e-4, 2, 100));
  t.observe(1.0);
  t.observe(1.0);            // streak 1
  CHECK(t.observe(1.0).lr == 4e-4);  // streak 2
  t.observe(1.0);            // streak 3
  CHECK(t.observe(1.0).lr == 2e-4);  // streak 4
}

TEST_CASE("epoch budget stops training even while improving") {
  PlateauTracker t(sched(1e-3, 3, 6, 4));
  double loss = 10.0;
  PlateauTracker::Decision d{};
  for (int i = 0; i < 4; ++i) d = t.observe(loss -= 1.0);
  CHECK(d.stop);
  CHECK(d.reason == "max_epochs");
  CHECK(d.improved);
  CHECK(t.best_epoch() == 4);
}

TEST_CASE("plateau reason wins when both limits trip on the same epoch") {
  PlateauTracker t(sched(1e-3, 2, 2, 3));
  t.observe(1.0);  // best
  t.observe(1.0);  // streak 1
  auto d = t.observe(1.0);  // streak 2 = stop_after, epoch 3 = max_epochs
  CHECK(d.stop);
  CHECK(d.reason == "plateau");
}
