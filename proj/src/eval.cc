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

#include "avsep/eval.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <sstream>

#include "avsep/errors.h"
#include "avsep/losses.h"
#include "avsep/train.h"
#include "avsep/wav.h"

namespace avsep {

namespace {

double median_of(std::vector<double> v) {
  const size_t n = v.size();
  std::sort(v.begin(), v.end());
  if (n == 0) return 0.0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

StratumStats stats_of(const std::vector<double>& snr,
                      const std::vector<double>& snri) {
  StratumStats s;
  s.count = static_cast<int>(snr.size());
  s.si_snr_mean = mean_of(snr);
  s.si_snr_median = median_of(snr);
  s.si_snri_mean = mean_of(snri);
  s.si_snri_median = median_of(snri);
  return s;
}

js stats_json(const StratumStats& s) {
  js j;
  j["count"] = s.count;
  j["si_snr_mean"] = s.si_snr_mean;
  j["si_snr_median"] = s.si_snr_median;
  j["si_snri_mean"] = s.si_snri_mean;
  j["si_snri_median"] = s.si_snri_median;
  return j;
}

StratumStats stats_from_json(const js& j) {
  StratumStats s;
  s.count = j.value("count", 0);
  s.si_snr_mean = j.value("si_snr_mean", 0.0);
  s.si_snr_median = j.value("si_snr_median", 0.0);
  s.si_snri_mean = j.value("si_snri_mean", 0.0);
  s.si_snri_median = j.value("si_snri_median", 0.0);
  return s;
}

// Scores each dataset pair with `estimate_fn`; strata follow the recorded
// pitch-group pairing.
EvalCell score_dataset(
    const Dataset& dataset, const CorpusReader& reader,
    const EvalOptions& opts,
    const std::function<Waveform(const MixtureExample&)>& estimate_fn) {
  EvalCell cell;
  cell.dataset = to_string(dataset.variant);
  cell.split = dataset.split;
  std::vector<double> snr_all, snri_all, snr_d, snri_d, snr_s, snri_s;
  std::vector<double> pesq_scores;
  for (const PairDescriptor& pd : dataset.pairs) {
    const MixtureExample ex = render_pair(pd, reader);
    const Waveform est = estimate_fn(ex);
    const double snr = si_snr(ex.target.samples, est.samples);
    const double snri = si_snri(ex.mixture, est, ex.target);
    snr_all.push_back(snr);
    snri_all.push_back(snri);
    if (ex.group_pair == GroupPair::diff) {
      snr_d.push_back(snr);
      snri_d.push_back(snri);
    } else {
      snr_s.push_back(snr);
      snri_s.push_back(snri);
    }
    if (!opts.pesq_cmd.empty()) {
      try {
        pesq_scores.push_back(pesq_adapter(opts.pesq_cmd, ex.target, est));
      } catch (const PesqUnavailable&) {
        ++cell.pesq_failures;
      }
    }
  }
  cell.all = stats_of(snr_all, snri_all);
  cell.diff = stats_of(snr_d, snri_d);
  cell.same = stats_of(snr_s, snri_s);
  if (!pesq_scores.empty()) {
    cell.pesq_mean = mean_of(pesq_scores);
    cell.pesq_count = static_cast<int>(pesq_scores.size());
  }
  return cell;
}

}  // namespace

double si_snri(const Waveform& mixture, const Waveform& est,
               const Waveform& target) {
  if (mixture.samples.size() != target.samples.size()) {
    throw ShapeError("si_snri: mixture and target lengths differ");
  }
  return si_snr(target.samples, est.samples) -
         si_snr(target.samples, mixture.samples);
}

double pesq_adapter(const std::string& cmd, const Waveform& reference,
                    const Waveform& estimate) {
  namespace fs = std::filesystem;
  static int counter = 0;
  const std::string stem =
      (fs::temp_directory_path() /
       ("avsep_pesq_" + std::to_string(++counter) + "_"))
          .string();
  const std::string ref_path = stem + "ref.wav";
  const std::string est_path = stem + "est.wav";
  write_wav(ref_path, reference);
  write_wav(est_path, estimate);
  const std::string full = cmd + " " + ref_path + " " + est_path;
  FILE* pipe = popen(full.c_str(), "r");
  if (pipe == nullptr) {
    fs::remove(ref_path);
    fs::remove(est_path);
    throw PesqUnavailable("cannot run '" + cmd + "'");
  }
  std::string out;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  const int status = pclose(pipe);
  fs::remove(ref_path);
  fs::remove(est_path);
  if (status != 0) {
    throw PesqUnavailable("'" + cmd + "' exited with status " +
                          std::to_string(status));
  }
  // Last numeric token of stdout.
  std::istringstream iss(out);
  std::string tok;
  bool have = false;
  double score = 0.0;
  while (iss >> tok) {
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) {
        score = v;
        have = true;
      }
    } catch (...) {
    }
  }
  if (!have) {
    throw PesqUnavailable("'" + cmd + "' produced no numeric score");
  }
  return score;
}

EvalCell evaluate(const std::string& ckpt_path, const Dataset& dataset,
                  const CorpusReader& reader, const EvalOptions& opts) {
  SeparationModel model = SeparationModel::load(ckpt_path);
  const CorpusManifest& man = reader.manifest();
  if (model.config().sample_rate != man.sample_rate ||
      model.config().fps != man.fps ||
      model.config().resolution != man.resolution) {
    throw ConfigError("checkpoint " + ckpt_path +
                      " is incompatible with the corpus "
                      "(sample rate, fps or resolution)");
  }
  EvalCell cell = score_dataset(
      dataset, reader, opts, [&model](const MixtureExample& ex) {
        const VideoStream vis = prepare_visual(model.config(), ex.visual);
        return model.extract(ex.mixture, vis).est;
      });
  cell.model = to_string(model.config().variant);
  cell.visual_field = to_string(model.config().visual_field);
  return cell;
}

EvalCell evaluate_mixture_row(const Dataset& dataset,
                              const CorpusReader& reader,
                              const EvalOptions& opts) {
  EvalCell cell = score_dataset(
      dataset, reader, opts,
      [](const MixtureExample& ex) { return ex.mixture; });
  cell.model = "mixture";
  cell.visual_field = "-";
  return cell;
}

js EvalReport::to_json() const {
  js j;
  j["config_digest"] = config_digest;
  js cs = js::array();
  for (const EvalCell& c : cells) {
    js e;
    e["model"] = c.model;
    e["visual_field"] = c.visual_field;
    e["dataset"] = c.dataset;
    e["split"] = c.split;
    e["all"] = stats_json(c.all);
    e["diff"] = stats_json(c.diff);
    e["same"] = stats_json(c.same);
    if (c.pesq_mean.has_value()) {
      e["pesq_mean"] = *c.pesq_mean;
      e["pesq_count"] = c.pesq_count;
    }
    if (c.pesq_failures > 0) e["pesq_failures"] = c.pesq_failures;
    cs.push_back(std::move(e));
  }
  j["cells"] = std::move(cs);
  return j;
}

EvalReport EvalReport::from_json(const js& j) {
  EvalReport r;
  r.config_digest = j.value("config_digest", std::string());
  if (j.contains("cells")) {
    for (const js& e : j.at("cells")) {
      EvalCell c;
      c.model = e.value("model", std::string());
      c.visual_field = e.value("visual_field", std::string());
      c.dataset = e.value("dataset", std::string());
      c.split = e.value("split", std::string());
      if (e.contains("all")) c.all = stats_from_json(e.at("all"));
      if (e.contains("diff")) c.diff = stats_from_json(e.at("diff"));
      if (e.contains("same")) c.same = stats_from_json(e.at("same"));
      if (e.contains("pesq_mean")) {
        c.pesq_mean = e.at("pesq_mean").get<double>();
        c.pesq_count = e.value("pesq_count", 0);
      }
      c.pesq_failures = e.value("pesq_failures", 0);
      r.cells.push_back(std::move(c));
    }
  }
  return r;
}

void EvalReport::write(const std::string& path) const {
  write_json_file(path, to_json());
}

EvalReport EvalReport::read(const std::string& path) {
  return from_json(parse_json_file(path));
}

std::string EvalReport::render_table() const {
  bool any_pesq = false;
  for (const EvalCell& c : cells) any_pesq |= c.pesq_mean.has_value();
  std::ostringstream os;
  os << std::left << std::setw(10) << "model" << std::setw(7) << "field"
     << std::setw(6) << "data" << std::setw(7) << "split" << std::right
     << std::setw(5) << "n" << std::setw(9) << "si_snr" << std::setw(9)
     << "si_snri" << std::setw(7) << "n_df" << std::setw(9) << "df_snri"
     << std::setw(7) << "n_sm" << std::setw(9) << "sm_snri";
  if (any_pesq) os << std::setw(7) << "pesq";
  os << "\n";
  os << std::string(any_pesq ? 92 : 85, '-') << "\n";
  os << std::fixed << std::setprecision(2);
  for (const EvalCell& c : cells) {
    os << std::left << std::setw(10) << c.model << std::setw(7)
       << c.visual_field << std::setw(6) << c.dataset << std::setw(7)
       << c.split << std::right << std::setw(5) << c.all.count << std::setw(9)
       << c.all.si_snr_mean << std::setw(9) << c.all.si_snri_mean
       << std::setw(7) << c.diff.count << std::setw(9) << c.diff.si_snri_mean
       << std::setw(7) << c.same.count << std::setw(9) << c.same.si_snri_mean;
    if (any_pesq) {
      if (c.pesq_mean.has_value()) {
        os << std::setw(7) << *c.pesq_mean;
      } else {
        os << std::setw(7) << "-";
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace avsep
