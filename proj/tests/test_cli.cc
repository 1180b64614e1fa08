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

// End-to-end subcommand tests against the installed binary. The binary path
// arrives via the AVSEP_CLI_PATH compile definition.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "avsep/errors.h"
#include "avsep/eval.h"
#include "avsep/jsonio.h"
#include "avsep/mixsim.h"
#include "avsep/wav.h"
#include "testutil.h"

using namespace avsep;
namespace tu = avsep::testutil;

namespace {

struct CmdResult {
  int code = -1;
  std::string out, err;

  // Last stderr line parsed as the machine-readable error record.
  js error_line() const {
    const size_t end = err.find_last_not_of('\n');
    if (end == std::string::npos) return js();
    size_t begin = err.rfind('\n', end);
    begin = begin == std::string::npos ? 0 : begin + 1;
    return js::parse(err.substr(begin, end - begin + 1));
  }
};

// One shared scratch world per process: a tiny corpus plus derived artifacts,
// all produced through the CLI itself.
struct CliWorld {
  tu::TempDir tmp{"cli"};
  std::string corpus_dir;
  std::string config_path;
  int next_capture = 0;

  CmdResult run(const std::string& args) {
    CmdResult r;
    const std::string so = tmp.file("cap" + std::to_string(++next_capture) + ".out");
    const std::string se = tmp.file("cap" + std::to_string(next_capture) + ".err");
    const std::string cmd =
        std::string(AVSEP_CLI_PATH) + " " + args + " >" + so + " 2>" + se;
    const int rc = std::system(cmd.c_str());
    r.code = rc == -1 ? -1 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : -2);
    r.out = tu::slurp(so);
    r.err = tu::slurp(se);
    return r;
  }

  CliWorld() {
    // Small corpus and a matching small model for fast pipeline runs.
    const js cfg = js::parse(R"({
      "corpus": {"seed": 4242, "speakers_train": 4, "speakers_dev": 4,
                 "speakers_test": 4, "utterances_per_speaker": 2},
      "model": {"n_audio_filters": 32, "visual_dim": 12, "tcn_bottleneck": 16,
                "tcn_hidden": 24, "tcn_blocks": 2, "tcn_repeats": 1,
                "visual_stem_channels": 4, "seed": 5}
    })");
    config_path = tmp.file("run.json");
    write_json_file(config_path, cfg);
    corpus_dir = tmp.file("corpus");
    const CmdResult r =
        run("corpus --config " + config_path + " --out " + corpus_dir);
    if (r.code != 0) {
      throw std::runtime_error("cli corpus bootstrap failed: " + r.err);
    }
  }

  static CliWorld& get() {
    static CliWorld w;
    return w;
  }
};

}  // namespace

TEST_CASE("version flag and missing subcommand") {
  CliWorld& w = CliWorld::get();
  const CmdResult v = w.run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("avsep 0.1.0") != std::string::npos);

  CHECK(w.run("").code != 0);
  CHECK(w.run("frobnicate").code != 0);
}

TEST_CASE("corpus subcommand wrote a loadable corpus") {
  CliWorld& w = CliWorld::get();
  namespace fs = std::filesystem;
  CHECK(fs::exists(w.corpus_dir + "/manifest.jsonl"));
  CHECK(fs::exists(w.corpus_dir + "/corpus_meta.json"));
  const CorpusManifest m = CorpusManifest::load(w.corpus_dir);
  CHECK(m.records.size() == 12 * 2);
}

TEST_CASE("simulate writes deterministic descriptors") {
  CliWorld& w = CliWorld::get();
  const std::string base = "simulate --manifest " + w.corpus_dir +
                           " --variant dsav --split test --pairs 6 ";
  CHECK(w.run(base + "--out " + w.tmp.file("a.jsonl")).code == 0);
  CHECK(w.run(base + "--out " + w.tmp.file("b.jsonl")).code == 0);
  CHECK(tu::slurp(w.tmp.file("a.jsonl")) == tu::slurp(w.tmp.file("b.jsonl")));
  CHECK(w.run(base + "--seed 123 --out " + w.tmp.file("c.jsonl")).code == 0);
  CHECK(tu::slurp(w.tmp.file("a.jsonl")) != tu::slurp(w.tmp.file("c.jsonl")));

  const Dataset d = Dataset::read(w.tmp.file("a.jsonl"));
  CHECK(d.variant == DatasetVariant::dsav);
  CHECK(d.split == "test");
  REQUIRE(d.pairs.size() == 6);
  for (const PairDescriptor& p : d.pairs) {
    CHECK(p.sir_db >= kSirLoDb);
    CHECK(p.sir_db <= kSirHiDb);
  }
}

TEST_CASE("simulate can materialize the mixtures") {
  CliWorld& w = CliWorld::get();
  const std::string mat = w.tmp.file("mat");
  const CmdResult r = w.run("simulate --manifest " + w.corpus_dir +
                            " --variant ssav --split dev --pairs 2 --out " +
                            w.tmp.file("m.jsonl") + " --materialize " + mat);
  CHECK(r.code == 0);
  const Waveform mix = read_wav(mat + "/pair0000_mix.wav");
  const Waveform tgt = read_wav(mat + "/pair0000_target.wav");
  CHECK(mix.samples.size() == tgt.samples.size());
  CHECK(mix.samples.size() > 0);
}

TEST_CASE("config errors exit with code 2 and a json error line") {
  CliWorld& w = CliWorld::get();
  const std::string bad = w.tmp.file("bad.json");
  tu::spit(bad, R"({"corpus": {"speaker_count": 4}})");
  const CmdResult r =
      w.run("corpus --config " + bad + " --out " + w.tmp.file("never"));
  CHECK(r.code == 2);
  const js e = r.error_line();
  CHECK(e.at("error").get<std::string>() == "ConfigError");
  CHECK_FALSE(e.at("message").get<std::string>().empty());

  const CmdResult bad_variant =
      w.run("simulate --manifest " + w.corpus_dir +
            " --variant dsva --split test --pairs 2 --out " + w.tmp.file("x"));
  CHECK(bad_variant.code == 2);
  CHECK(bad_variant.error_line().at("error") == "ConfigError");
}

TEST_CASE("state and checkpoint errors exit with code 3") {
  CliWorld& w = CliWorld::get();
  const CmdResult r = w.run("train --manifest " + w.corpus_dir +
                            " --config " + w.config_path +
                            " --variant davse --out " + w.tmp.file("d.ckpt"));
  CHECK(r.code == 3);
  CHECK(r.error_line().at("error") == "CheckpointError");
}

TEST_CASE("io errors exit with code 4") {
  CliWorld& w = CliWorld::get();
  const CmdResult r = w.run("report " + w.tmp.file("missing-report.json"));
  CHECK(r.code == 4);
  CHECK(r.error_line().at("error") == "IoError");
}

TEST_CASE("train, evaluate, embed, report pipeline") {
  CliWorld& w = CliWorld::get();
  const std::string train_set = w.tmp.file("train.jsonl");
  const std::string dev_set = w.tmp.file("dev.jsonl");
  const std::string test_set = w.tmp.file("test.jsonl");
  REQUIRE(w.run("simulate --manifest " + w.corpus_dir +
                " --variant dsav --split train --pairs 4 --out " + train_set)
              .code == 0);
  REQUIRE(w.run("simulate --manifest " + w.corpus_dir +
                " --variant dsav --split dev --pairs 2 --out " + dev_set)
              .code == 0);
  REQUIRE(w.run("simulate --manifest " + w.corpus_dir +
                " --variant dsav --split test --pairs 3 --out " + test_set)
              .code == 0);

  const std::string ckpt = w.tmp.file("baseline.ckpt");
  const CmdResult train =
      w.run("train --manifest " + w.corpus_dir + " --config " + w.config_path +
            " --variant baseline --train-set " + train_set + " --dev-set " +
            dev_set + " --out " + ckpt + " --max-epochs 1 --batch 2");
  CAPTURE(train.err);
  REQUIRE(train.code == 0);
  CHECK(train.out.find("trained baseline") != std::string::npos);
  CHECK(std::filesystem::exists(ckpt));

  const std::string report = w.tmp.file("report.json");
  const CmdResult eval =
      w.run("evaluate --manifest " + w.corpus_dir + " --config " +
            w.config_path + " --dataset " + test_set + " --ckpt " + ckpt +
            " --out " + report);
  CAPTURE(eval.err);
  REQUIRE(eval.code == 0);
  CHECK(eval.out.find("mixture") != std::string::npos);
  CHECK(eval.out.find("baseline") != std::string::npos);
  const EvalReport rep = EvalReport::read(report);
  CHECK(rep.cells.size() == 2);  // mixture row + checkpoint row
  CHECK_FALSE(rep.config_digest.empty());

  const CmdResult shown = w.run("report " + report);
  CHECK(shown.code == 0);
  CHECK(shown.out.find(rep.config_digest) != std::string::npos);
  CHECK(shown.out.find("si_snri") != std::string::npos);

  const std::string emb = w.tmp.file("emb");
  const CmdResult embed =
      w.run("embed --manifest " + w.corpus_dir + " --config " + w.config_path +
            " --ckpt " + ckpt + " --out-dir " + emb + " --speakers 2 --seed 7");
  CAPTURE(embed.err);
  REQUIRE(embed.code == 0);
  for (const char* name : {"embeddings.ave", "frames.csv", "frames.svg",
                           "utts.csv", "utts.svg", "summary.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(emb + "/" + name));
  }
  const js summary = parse_json_file(emb + "/summary.json");
  CHECK(summary.at("tag") == "V");
  CHECK(summary.at("dim").get<int>() == 24);
  CHECK(summary.at("speakers").get<int>() == 2);
  CHECK(summary.at("frame_rows").get<int>() > 0);
  CHECK(summary.at("utt_rows").get<int>() == 4);  // 2 speakers x 2 utts
}
