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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "avsep/errors.h"
#include "avsep/eval.h"
#include "avsep/losses.h"
#include "testutil.h"

using namespace avsep;
namespace tu = avsep::testutil;

namespace {

Waveform wave_of(std::vector<float> samples) {
  Waveform w;
  w.sample_rate = 8000;
  w.samples = std::move(samples);
  return w;
}

std::string fake_pesq_script(const tu::TempDir& tmp, const std::string& name,
                             const std::string& body) {
  const std::string path = tmp.file(name);
  tu::spit(path, "#!/bin/sh\n" + body + "\n");
  std::filesystem::permissions(path,
                               std::filesystem::perms::owner_all |
                                   std::filesystem::perms::group_read |
                                   std::filesystem::perms::others_read);
  return path;
}

}  // namespace

TEST_CASE("si_snri is exactly zero for the unprocessed mixture") {
  Rng rng(51);
  const Waveform target = wave_of(tu::random_signal(2000, rng));
  Waveform mixture = target;
  const std::vector<float> noise = tu::random_signal(2000, rng, 0.2);
  for (size_t i = 0; i < 2000; ++i) mixture.samples[i] += noise[i];

  CHECK(si_snri(mixture, mixture, target) == 0.0);
  // A perfect estimate improves by snr_top - snr(mixture) > 0.
  CHECK(si_snri(mixture, target, target) > 0.0);

  Waveform shorter = wave_of(std::vector<float>(100, 0.1f));
  CHECK_THROWS_AS(si_snri(shorter, mixture, target), ShapeError);
}

TEST_CASE("mixture pseudo-model row scores zero improvement") {
  const auto& tc = tu::TinyCorpus::get();
  CorpusReader reader(tc.manifest);
  const Dataset d = build_dataset(tc.manifest, DatasetVariant::dsav, "test", 61, 8);

  const EvalCell cell = evaluate_mixture_row(d, reader);
  CHECK(cell.model == "mixture");
  CHECK(cell.visual_field == "-");
  CHECK(cell.dataset == "dsav");
  CHECK(cell.split == "test");
  CHECK(cell.all.count == 8);
  CHECK(cell.diff.count + cell.same.count == cell.all.count);
  CHECK(cell.all.si_snri_mean == 0.0);
  CHECK(cell.all.si_snri_median == 0.0);
  CHECK(cell.diff.si_snri_mean == 0.0);
  CHECK(cell.same.si_snri_mean == 0.0);
  // The raw mixture sits well below the target ceiling.
  CHECK(cell.all.si_snr_mean < 15.0);
  CHECK(std::isfinite(cell.all.si_snr_mean));
  CHECK_FALSE(cell.pesq_mean.has_value());
}

TEST_CASE("evaluate scores a checkpoint over a dataset") {
  const auto& tc = tu::TinyCorpus::get();
  CorpusReader reader(tc.manifest);
  tu::TempDir tmp("eval");
  const Dataset d = build_dataset(tc.manifest, DatasetVariant::dsav, "test", 62, 5);

  SeparationModel m = SeparationModel::create(tu::tiny_model(Variant::baseline));
  m.save(tmp.file("b.ckpt"));
  const EvalCell cell = evaluate(tmp.file("b.ckpt"), d, reader);
  CHECK(cell.model == "baseline");
  CHECK(cell.visual_field == "face");
  CHECK(cell.all.count == 5);
  CHECK(cell.diff.count + cell.same.count == 5);
  CHECK(std::isfinite(cell.all.si_snr_mean));
  CHECK(std::isfinite(cell.all.si_snri_mean));

  // Determinism: identical call, identical numbers.
  const EvalCell again = evaluate(tmp.file("b.ckpt"), d, reader);
  CHECK(again.all.si_snr_mean == cell.all.si_snr_mean);
  CHECK(again.all.si_snri_median == cell.all.si_snri_median);

  ModelConfig bad = tu::tiny_model(Variant::baseline);
  bad.resolution = 16;
  SeparationModel mm = SeparationModel::create(bad);
  mm.save(tmp.file("bad.ckpt"));
  CHECK_THROWS_AS(evaluate(tmp.file("bad.ckpt"), d, reader), ConfigError);
}

TEST_CASE("mouth-field checkpoints crop the visual stream during eval") {
  const auto& tc = tu::TinyCorpus::get();
  CorpusReader reader(tc.manifest);
  tu::TempDir tmp("evalmouth");
  const Dataset d = build_dataset(tc.manifest, DatasetVariant::dsav, "test", 63, 3);

  ModelConfig cfg = tu::tiny_model(Variant::baseline);
  cfg.visual_field = VisualField::mouth;
  SeparationModel m = SeparationModel::create(cfg);
  m.save(tmp.file("mouth.ckpt"));
  const EvalCell cell = evaluate(tmp.file("mouth.ckpt"), d, reader);
  CHECK(cell.visual_field == "mouth");
  CHECK(cell.all.count == 3);
}

TEST_CASE("eval report round trips and renders") {
  tu::TempDir tmp("report");
  EvalReport r;
  r.config_digest = "0123abcd";
  EvalCell a;
  a.model = "mixture";
  a.visual_field = "-";
  a.dataset = "dsav";
  a.split = "test";
  a.all = {4, 1.25, 1.5, 0.0, 0.0};
  a.diff = {2, 1.0, 1.0, 0.0, 0.0};
  a.same = {2, 1.5, 1.5, 0.0, 0.0};
  EvalCell b = a;
  b.model = "davse";
  b.visual_field = "face";
  b.all = {4, 9.75, 10.0, 8.5, 8.75};
  b.pesq_mean = 3.25;
  b.pesq_count = 4;
  r.cells = {a, b};

  r.write(tmp.file("r.json"));
  const EvalReport r2 = EvalReport::read(tmp.file("r.json"));
  CHECK(r2.config_digest == "0123abcd");
  REQUIRE(r2.cells.size() == 2);
  CHECK(r2.cells[0].model == "mixture");
  CHECK(r2.cells[1].all.si_snri_mean == 8.5);
  CHECK(r2.cells[1].pesq_mean.has_value());
  CHECK(*r2.cells[1].pesq_mean == 3.25);
  CHECK(r2.cells[1].pesq_count == 4);
  r2.write(tmp.file("r2.json"));
  CHECK(tu::slurp(tmp.file("r.json")) == tu::slurp(tmp.file("r2.json")));

  const std::string table = r.render_table();
  CHECK(table.find("model") != std::string::npos);
  CHECK(table.find("si_snri") != std::string::npos);
  CHECK(table.find("mixture") != std::string::npos);
  CHECK(table.find("davse") != std::string::npos);
  CHECK(table.find("pesq") != std::string::npos);
  CHECK(table.find("3.25") != std::string::npos);
  // Header, separator, one line per cell.
  CHECK(std::count(table.begin(), table.end(), '\n') == 4);
}

TEST_CASE("pesq adapter parses the last numeric token") {
  tu::TempDir tmp("pesq");
  Rng rng(52);
  const Waveform ref = wave_of(tu::random_signal(800, rng));
  const Waveform est = wave_of(tu::random_signal(800, rng));

  const std::string ok = fake_pesq_script(tmp, "ok.sh", "echo PESQ score 3.25");
  CHECK(pesq_adapter(ok, ref, est) == 3.25);

  const std::string multi =
      fake_pesq_script(tmp, "multi.sh", "echo v2.1\necho MOS-LQO 2.875");
  CHECK(pesq_adapter(multi, ref, est) == 2.875);

  const std::string fail = fake_pesq_script(tmp, "fail.sh", "exit 3");
  CHECK_THROWS_AS(pesq_adapter(fail, ref, est), PesqUnavailable);

  const std::string text = fake_pesq_script(tmp, "text.sh", "echo no score here");
  CHECK_THROWS_AS(pesq_adapter(text, ref, est), PesqUnavailable);

  CHECK_THROWS_AS(pesq_adapter("/nonexistent/pesq-bin", ref, est),
                  PesqUnavailable);
}

TEST_CASE("pesq results and failures flow into the cell") {
  const auto& tc = tu::TinyCorpus::get();
  CorpusReader reader(tc.manifest);
  tu::TempDir tmp("pesqcell");
  const Dataset d = build_dataset(tc.manifest, DatasetVariant::dsav, "test", 64, 3);

  EvalOptions opts;
  opts.pesq_cmd = fake_pesq_script(tmp, "ok.sh", "echo 3.5");
  const EvalCell good = evaluate_mixture_row(d, reader, opts);
  REQUIRE(good.pesq_mean.has_value());
  CHECK(*good.pesq_mean == 3.5);
  CHECK(good.pesq_count == 3);
  CHECK(good.pesq_failures == 0);

  opts.pesq_cmd = fake_pesq_script(tmp, "fail.sh", "exit 1");
  const EvalCell bad = evaluate_mixture_row(d, reader, opts);
  CHECK_FALSE(bad.pesq_mean.has_value());
  CHECK(bad.pesq_count == 0);
  CHECK(bad.pesq_failures == 3);
}
