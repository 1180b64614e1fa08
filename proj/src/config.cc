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

#include "avsep/config.h"

#include "avsep/errors.h"

namespace avsep {

js corpus_config_to_json(const CorpusConfig& c) {
  js j;
  j["seed"] = c.seed;
  j["speakers_train"] = c.speakers_train;
  j["speakers_dev"] = c.speakers_dev;
  j["speakers_test"] = c.speakers_test;
  j["utterances_per_speaker"] = c.utterances_per_speaker;
  j["sample_rate"] = c.sample_rate;
  j["fps"] = c.fps;
  j["resolution"] = c.resolution;
  return j;
}

CorpusConfig corpus_config_from_json(const js& j) {
  expect_keys(j,
              {"seed", "speakers_train", "speakers_dev", "speakers_test",
               "utterances_per_speaker", "sample_rate", "fps", "resolution"},
              "corpus config");
  CorpusConfig c;
  c.seed = j.value("seed", c.seed);
  c.speakers_train = j.value("speakers_train", c.speakers_train);
  c.speakers_dev = j.value("speakers_dev", c.speakers_dev);
  c.speakers_test = j.value("speakers_test", c.speakers_test);
  c.utterances_per_speaker =
      j.value("utterances_per_speaker", c.utterances_per_speaker);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.fps = j.value("fps", c.fps);
  c.resolution = j.value("resolution", c.resolution);
  c.validate();
  return c;
}

js schedule_to_json(const TrainSchedule& s) {
  js j;
  j["initial_lr"] = s.initial_lr;
  j["halve_after"] = s.halve_after;
  j["stop_after"] = s.stop_after;
  j["max_epochs"] = s.max_epochs;
  j["batch_size"] = s.batch_size;
  j["seed"] = s.seed;
  return j;
}

TrainSchedule schedule_from_json(const js& j) {
  expect_keys(j,
              {"initial_lr", "halve_after", "stop_after", "max_epochs",
               "batch_size", "seed"},
              "train config");
  TrainSchedule s;
  s.initial_lr = j.value("initial_lr", s.initial_lr);
  s.halve_after = j.value("halve_after", s.halve_after);
  s.stop_after = j.value("stop_after", s.stop_after);
  s.max_epochs = j.value("max_epochs", s.max_epochs);
  s.batch_size = j.value("batch_size", s.batch_size);
  s.seed = j.value("seed", s.seed);
  s.validate();
  return s;
}

void RunConfig::validate() const {
  corpus.validate();
  model.validate();
  train.validate();
  if (simulate.pairs_train < 1 || simulate.pairs_dev < 1 ||
      simulate.pairs_test < 1) {
    throw ConfigError("simulate pair counts must be >= 1");
  }
  if (model.sample_rate != corpus.sample_rate) {
    throw ConfigError("model sample_rate must match corpus sample_rate");
  }
  if (model.fps != corpus.fps) {
    throw ConfigError("model fps must match corpus fps");
  }
  if (model.resolution != corpus.resolution) {
    throw ConfigError("model resolution must match corpus resolution");
  }
}

js RunConfig::to_json() const {
  js j;
  j["corpus"] = corpus_config_to_json(corpus);
  js s;
  s["pairs_train"] = simulate.pairs_train;
  s["pairs_dev"] = simulate.pairs_dev;
  s["pairs_test"] = simulate.pairs_test;
  s["seed"] = simulate.seed;
  j["simulate"] = s;
  j["model"] = model.to_json();
  j["train"] = schedule_to_json(train);
  js e;
  e["pesq_cmd"] = eval.pesq_cmd;
  j["eval"] = e;
  return j;
}

RunConfig RunConfig::from_json(const js& j) {
  expect_keys(j, {"corpus", "simulate", "model", "train", "eval"},
              "run config");
  RunConfig c;
  if (j.contains("corpus")) c.corpus = corpus_config_from_json(j.at("corpus"));
  if (j.contains("simulate")) {
    const js& s = j.at("simulate");
    expect_keys(s, {"pairs_train", "pairs_dev", "pairs_test", "seed"},
                "simulate config");
    c.simulate.pairs_train = s.value("pairs_train", c.simulate.pairs_train);
    c.simulate.pairs_dev = s.value("pairs_dev", c.simulate.pairs_dev);
    c.simulate.pairs_test = s.value("pairs_test", c.simulate.pairs_test);
    c.simulate.seed = s.value("seed", c.simulate.seed);
  }
  if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"));
  if (j.contains("train")) c.train = schedule_from_json(j.at("train"));
  if (j.contains("eval")) {
    const js& e = j.at("eval");
    expect_keys(e, {"pesq_cmd"}, "eval config");
    c.eval.pesq_cmd = e.value("pesq_cmd", c.eval.pesq_cmd);
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_json(parse_json_file(path));
}

std::string RunConfig::digest() const {
  const std::string s = to_json().dump();
  return fnv1a_hex(s.data(), s.size());
}

}  // namespace avsep
