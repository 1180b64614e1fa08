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

// avsep: corpus synthesis, mixture simulation, extraction training,
// evaluation and embedding export behind one subcommand CLI. One JSON config
// drives a full reproduction; per-command flags override config keys.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "avsep/config.h"
#include "avsep/corpus.h"
#include "avsep/embed.h"
#include "avsep/errors.h"
#include "avsep/eval.h"
#include "avsep/mixsim.h"
#include "avsep/model.h"
#include "avsep/train.h"
#include "avsep/wav.h"

namespace {

using namespace avsep;
namespace fs = std::filesystem;

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (!path.empty()) cfg = RunConfig::from_file(path);
  cfg.validate();
  return cfg;
}

// Scripting contract: 2 = bad config/schema, 3 = bad run state (step order,
// checkpoints, variant constraints), 4 = I/O, 1 = anything else.
int exit_code_for(const std::string& kind) {
  if (kind == "ConfigError" || kind == "ShapeError" || kind == "LabelError" ||
      kind == "DurationOutOfRange") {
    return 2;
  }
  if (kind == "StateError" || kind == "CheckpointError" ||
      kind == "VariantConstraintError" || kind == "AlreadyCropped" ||
      kind == "ZeroEnergyError" || kind == "InputTooShort" ||
      kind == "DegenerateVariance" || kind == "SingleClusterError") {
    return 3;
  }
  if (kind == "IoError" || kind == "PesqUnavailable") return 4;
  return 1;
}

template <typename Fn>
int run_guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    const js line{{"error", e.kind()}, {"message", e.what()}};
    std::cerr << line.dump() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    const js line{{"error", "InternalError"}, {"message", e.what()}};
    std::cerr << line.dump() << "\n";
    return 1;
  }
}

struct CorpusArgs {
  std::string config, out_dir;
};

int cmd_corpus(const CorpusArgs& a) {
  const RunConfig cfg = load_config(a.config);
  const CorpusManifest m = build_corpus(cfg.corpus, a.out_dir);
  std::cout << "corpus: " << m.records.size() << " utterances -> " << a.out_dir
            << "\n";
  return 0;
}

struct SimulateArgs {
  std::string config, manifest_dir, variant, split, out_path, materialize_dir;
  int pairs = 0;
  int64_t seed = -1;
};

int cmd_simulate(const SimulateArgs& a) {
  const RunConfig cfg = load_config(a.config);
  const CorpusManifest manifest = CorpusManifest::load(a.manifest_dir);
  const DatasetVariant variant = dataset_variant_from_string(a.variant);
  int pairs = a.pairs;
  if (pairs <= 0) {
    if (a.split == "train") {
      pairs = cfg.simulate.pairs_train;
    } else if (a.split == "dev") {
      pairs = cfg.simulate.pairs_dev;
    } else if (a.split == "test") {
      pairs = cfg.simulate.pairs_test;
    } else {
      throw ConfigError("simulate: unknown split '" + a.split + "'");
    }
  }
  const uint64_t seed =
      a.seed >= 0 ? static_cast<uint64_t>(a.seed) : cfg.simulate.seed;
  const Dataset d = build_dataset(manifest, variant, a.split, seed, pairs);
  d.write(a.out_path);
  if (!a.materialize_dir.empty()) {
    const CorpusReader reader(manifest);
    fs::create_directories(a.materialize_dir);
    for (size_t i = 0; i < d.pairs.size(); ++i) {
      const MixtureExample ex = render_pair(d.pairs[i], reader);
      char stem[32];
      std::snprintf(stem, sizeof(stem), "pair%04zu", i);
      write_wav(a.materialize_dir + "/" + stem + "_mix.wav", ex.mixture);
      write_wav(a.materialize_dir + "/" + stem + "_target.wav", ex.target);
    }
  }
  std::cout << "dataset: " << d.pairs.size() << " " << to_string(variant)
            << "/" << a.split << " pairs -> " << a.out_path << "\n";
  return 0;
}

struct TrainArgs {
  std::string config, manifest_dir, variant, train_set, dev_set, out_ckpt,
      log_path, spk_ckpt, sync_ckpt, visual_field;
  int64_t seed = -1;
  double lr = 0.0;
  int max_epochs = 0;
  int batch = 0;
  bool verbose = false;
};

int cmd_train(const TrainArgs& a) {
  RunConfig cfg = load_config(a.config);
  cfg.model.variant = variant_from_string(a.variant);
  if (!a.visual_field.empty()) {
    cfg.model.visual_field = field_from_string(a.visual_field);
  }
  if (a.seed >= 0) {
    cfg.model.seed = static_cast<uint64_t>(a.seed);
    cfg.train.seed = static_cast<uint64_t>(a.seed);
  }
  if (a.lr > 0.0) cfg.train.initial_lr = a.lr;
  if (a.max_epochs > 0) cfg.train.max_epochs = a.max_epochs;
  if (a.batch > 0) cfg.train.batch_size = a.batch;
  cfg.validate();
  if (a.out_ckpt.empty()) throw ConfigError("train: --out is required");

  const CorpusManifest manifest = CorpusManifest::load(a.manifest_dir);
  const CorpusReader reader(manifest);
  TrainIo io;
  io.reader = &reader;
  io.out_ckpt = a.out_ckpt;
  io.log_path = a.log_path;
  io.verbose = a.verbose;

  const auto load_set = [](const std::string& path, const char* which) {
    if (path.empty()) {
      throw ConfigError(std::string("train: --") + which + " is required");
    }
    return Dataset::read(path);
  };

  SeparationModel model = SeparationModel::create(cfg.model);
  TrainLog log;
  switch (cfg.model.variant) {
    case Variant::baseline:
      log = train_baseline(model, load_set(a.train_set, "train-set"),
                           load_set(a.dev_set, "dev-set"), cfg.train, io);
      break;
    case Variant::spk: {
      // Step 1 checkpoints separately; its best weights seed step 2.
      TrainIo io1 = io;
      io1.out_ckpt = a.out_ckpt + ".step1";
      io1.log_path = a.log_path.empty() ? "" : a.log_path + ".step1";
      const TrainLog log1 = train_spk_step1(model, cfg.train, io1);
      std::cout << "spk step 1: best dev " << log1.best_dev << " (epoch "
                << log1.best_epoch << ") -> " << io1.out_ckpt << "\n";
      SeparationModel pretrained = SeparationModel::load(io1.out_ckpt);
      log = train_spk_step2(pretrained, load_set(a.train_set, "train-set"),
                            load_set(a.dev_set, "dev-set"), cfg.train, io);
      break;
    }
    case Variant::sync:
      log = train_sync(model, load_set(a.train_set, "train-set"),
                       load_set(a.dev_set, "dev-set"), cfg.train, io);
      break;
    case Variant::davse:
      if (a.spk_ckpt.empty()) {
        throw CheckpointError("davse requires --spk-ckpt");
      }
      if (a.sync_ckpt.empty()) {
        throw CheckpointError("davse requires --sync-ckpt");
      }
      log = train_davse(model, load_set(a.train_set, "train-set"),
                        load_set(a.dev_set, "dev-set"), cfg.train, a.spk_ckpt,
                        a.sync_ckpt, io);
      break;
  }
  std::cout << "trained " << a.variant << ": " << log.epochs.size()
            << " epochs (" << log.stop_reason << "), best dev " << log.best_dev
            << " at epoch " << log.best_epoch << " -> " << a.out_ckpt << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string config, manifest_dir, out_path, pesq_cmd;
  std::vector<std::string> ckpts, datasets;
  bool mixture_row = true;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const RunConfig cfg = load_config(a.config);
  if (a.datasets.empty()) {
    throw ConfigError("evaluate: at least one --dataset is required");
  }
  const CorpusManifest manifest = CorpusManifest::load(a.manifest_dir);
  const CorpusReader reader(manifest);
  EvalOptions opts;
  opts.pesq_cmd = a.pesq_cmd.empty() ? cfg.eval.pesq_cmd : a.pesq_cmd;

  EvalReport report;
  report.config_digest = cfg.digest();
  for (const std::string& dpath : a.datasets) {
    const Dataset d = Dataset::read(dpath);
    if (a.mixture_row) {
      report.cells.push_back(evaluate_mixture_row(d, reader, opts));
    }
    for (const std::string& ckpt : a.ckpts) {
      report.cells.push_back(evaluate(ckpt, d, reader, opts));
    }
  }
  if (!a.out_path.empty()) report.write(a.out_path);
  std::cout << report.render_table();
  return 0;
}

struct EmbedArgs {
  std::string config, manifest_dir, ckpt, out_dir;
  int speakers = 9;
  int64_t seed = 7;
};

// Projects, normalizes and plots one row set; fills silhouette when >= 2
// speakers are present.
void plot_rows(const Tensor& feats, const std::vector<EmbedRecord>& recs,
               const std::string& stem, js* silhouette_out) {
  *silhouette_out = nullptr;
  if (feats.shape.empty() || feats.shape[0] < 2) return;
  const std::vector<Point2> pts = minmax_norm(project_2d(feats));
  emit_plot(pts, recs, stem + ".csv", stem + ".svg");
  std::map<std::string, int> ids;
  std::vector<int> labels;
  labels.reserve(recs.size());
  for (const EmbedRecord& r : recs) {
    const auto it = ids.emplace(r.speaker_id, static_cast<int>(ids.size()));
    labels.push_back(it.first->second);
  }
  if (ids.size() >= 2) *silhouette_out = silhouette(pts, labels);
}

int cmd_embed(const EmbedArgs& a) {
  const RunConfig cfg = load_config(a.config);
  (void)cfg;
  const CorpusManifest manifest = CorpusManifest::load(a.manifest_dir);
  const CorpusReader reader(manifest);
  const EmbeddingDump dump = export_embeddings(
      a.ckpt, reader, a.speakers, static_cast<uint64_t>(a.seed));
  fs::create_directories(a.out_dir);
  dump.write(a.out_dir + "/embeddings.ave");

  js frame_sil, utt_sil;
  plot_rows(dump.features, dump.frames, a.out_dir + "/frames", &frame_sil);
  plot_rows(dump.utt_features, dump.utts, a.out_dir + "/utts", &utt_sil);

  js summary;
  summary["tag"] = dump.tag;
  summary["model_digest"] = dump.model_digest;
  summary["dim"] = dump.dim;
  summary["speakers"] = a.speakers;
  summary["seed"] = a.seed;
  summary["frame_rows"] = dump.frames.size();
  summary["utt_rows"] = dump.utts.size();
  summary["silhouette_frames"] = frame_sil;
  summary["silhouette_utts"] = utt_sil;
  write_json_file(a.out_dir + "/summary.json", summary);
  std::cout << "embeddings: " << dump.frames.size() << " frame rows, "
            << dump.utts.size() << " utterance rows -> " << a.out_dir << "\n";
  if (!utt_sil.is_null()) {
    std::cout << "silhouette (utterance means): " << utt_sil.dump() << "\n";
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& paths) {
  for (const std::string& p : paths) {
    const EvalReport r = EvalReport::read(p);
    std::cout << p << " (config " << r.config_digest << ")\n"
              << r.render_table();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avsep: decoupled audio-visual speaker extraction toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "avsep 0.1.0");
  int workers = 0;
  app.add_option("--workers", workers,
                 "bound parallel example processing (0 = library default)");

  CorpusArgs corpus_args;
  CLI::App* corpus = app.add_subcommand(
      "corpus", "synthesize the audio-visual corpus and write its manifest");
  corpus->add_option("--config", corpus_args.config, "run config JSON");
  corpus->add_option("--out", corpus_args.out_dir, "output corpus directory")
      ->required();

  SimulateArgs sim_args;
  CLI::App* simulate =
      app.add_subcommand("simulate", "build a mixture dataset descriptor");
  simulate->add_option("--config", sim_args.config, "run config JSON");
  simulate->add_option("--manifest", sim_args.manifest_dir, "corpus directory")
      ->required();
  simulate
      ->add_option("--variant", sim_args.variant, "dsav | dssv | ssav")
      ->required();
  simulate->add_option("--split", sim_args.split, "train | dev | test")
      ->required();
  simulate->add_option("--out", sim_args.out_path, "descriptor JSONL path")
      ->required();
  simulate->add_option("--pairs", sim_args.pairs,
                       "pair count (default: config per-split value)");
  simulate->add_option("--seed", sim_args.seed,
                       "simulation seed (default: config value)");
  simulate->add_option("--materialize", sim_args.materialize_dir,
                       "also render mixture/target WAVs into this directory");

  TrainArgs train_args;
  CLI::App* train =
      app.add_subcommand("train", "train one model variant to a checkpoint");
  train->add_option("--config", train_args.config, "run config JSON");
  train->add_option("--manifest", train_args.manifest_dir, "corpus directory")
      ->required();
  train
      ->add_option("--variant", train_args.variant,
                   "baseline | spk | sync | davse")
      ->required();
  train->add_option("--train-set", train_args.train_set,
                    "training dataset descriptor");
  train->add_option("--dev-set", train_args.dev_set,
                    "validation dataset descriptor");
  train->add_option("--out", train_args.out_ckpt, "output checkpoint path")
      ->required();
  train->add_option("--log", train_args.log_path, "JSONL train log path");
  train->add_option("--spk-ckpt", train_args.spk_ckpt,
                    "pretrained identity branch (davse)");
  train->add_option("--sync-ckpt", train_args.sync_ckpt,
                    "pretrained synchronization branch (davse)");
  train->add_option("--visual-field", train_args.visual_field,
                    "face | mouth (overrides config)");
  train->add_option("--seed", train_args.seed,
                    "override model and schedule seeds");
  train->add_option("--lr", train_args.lr, "override initial learning rate");
  train->add_option("--max-epochs", train_args.max_epochs,
                    "override epoch budget");
  train->add_option("--batch", train_args.batch, "override batch size");
  train->add_flag("--verbose", train_args.verbose,
                  "per-epoch progress on stderr");

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "score checkpoints on dataset descriptors");
  evaluate->add_option("--config", eval_args.config, "run config JSON");
  evaluate
      ->add_option("--manifest", eval_args.manifest_dir, "corpus directory")
      ->required();
  evaluate->add_option("--ckpt", eval_args.ckpts, "checkpoint (repeatable)");
  evaluate
      ->add_option("--dataset", eval_args.datasets,
                   "dataset descriptor (repeatable)")
      ->required();
  evaluate->add_option("--out", eval_args.out_path, "report JSON path");
  evaluate->add_option("--pesq-cmd", eval_args.pesq_cmd,
                       "external PESQ command (overrides config)");
  evaluate->add_flag("!--no-mixture", eval_args.mixture_row,
                     "skip the unprocessed-mixture rows");

  EmbedArgs embed_args;
  CLI::App* embed = app.add_subcommand(
      "embed", "export fused embeddings with 2-D plots and silhouette");
  embed->add_option("--config", embed_args.config, "run config JSON");
  embed->add_option("--manifest", embed_args.manifest_dir, "corpus directory")
      ->required();
  embed->add_option("--ckpt", embed_args.ckpt, "checkpoint path")->required();
  embed->add_option("--out-dir", embed_args.out_dir, "output directory")
      ->required();
  embed->add_option("--speakers", embed_args.speakers,
                    "number of sampled test speakers");
  embed->add_option("--seed", embed_args.seed, "speaker sampling seed");

  std::vector<std::string> report_paths;
  CLI::App* report =
      app.add_subcommand("report", "render evaluation reports as text tables");
  report->add_option("paths", report_paths, "report JSON files")->required();

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif

  if (*corpus) return run_guarded([&] { return cmd_corpus(corpus_args); });
  if (*simulate) return run_guarded([&] { return cmd_simulate(sim_args); });
  if (*train) return run_guarded([&] { return cmd_train(train_args); });
  if (*evaluate) return run_guarded([&] { return cmd_evaluate(eval_args); });
  if (*embed) return run_guarded([&] { return cmd_embed(embed_args); });
  if (*report) return run_guarded([&] { return cmd_report(report_paths); });
  return 0;
}
