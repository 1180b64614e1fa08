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

#include "avsep/train.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <utility>

#include "avsep/errors.h"
#include "avsep/losses.h"

namespace avsep {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string speaker_of(const std::string& ref) {
  return ref.substr(0, ref.find('/'));
}

// Fisher-Yates order for one epoch, derived from the schedule seed.
std::vector<int> epoch_order(size_t n, uint64_t seed, int epoch) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hash_combine(hash_bytes(seed, "epoch-order"),
                       static_cast<uint64_t>(epoch)));
  for (size_t i = n; i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

// SI-SNR training loss for one rendered example; gradient scaled by `scale`
// (1 / batch size for mean-of-batch) when backward is requested.
double sep_item_loss(SeparationModel& model, const MixtureExample& ex,
                     double scale, bool backward) {
  const VideoStream vis = prepare_visual(model.config(), ex.visual);
  SeparationModel::ExtractOut out = model.extract(ex.mixture, vis);
  const double loss = -si_snr(ex.target.samples, out.est.samples);
  if (backward) {
    const std::vector<double> g =
        si_snr_loss_grad(ex.target.samples, out.est.samples);
    std::vector<float> gf(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
      gf[i] = static_cast<float>(g[i] * scale);
    }
    model.backward_extract(gf);
  }
  return loss;
}

void check_pair_constraints(const PairDescriptor& pd, DatasetVariant expect,
                            TrainLog& log) {
  if (pd.variant != expect) {
    throw VariantConstraintError(std::string("dataset pair variant ") +
                                 to_string(pd.variant) + " in a " +
                                 to_string(expect) + " run");
  }
  if (expect == DatasetVariant::dssv || expect == DatasetVariant::ssav) {
    ++log.decoupling_checks;
  }
  if (expect == DatasetVariant::dssv) {
    const bool aligned = pd.visual_utt == pd.target_utt;
    const bool same_spk = speaker_of(pd.visual_utt) == speaker_of(pd.target_utt);
    if (aligned || !same_spk) {
      ++log.decoupling_violations;
      throw StateError("dssv batch contains an aligned or cross-speaker "
                       "visual stream: " + pd.target_utt + " / " +
                       pd.visual_utt);
    }
  } else if (expect == DatasetVariant::ssav) {
    if (speaker_of(pd.target_utt) != speaker_of(pd.interferer_utt)) {
      ++log.decoupling_violations;
      throw StateError("ssav batch contains a cross-speaker mixture: " +
                       pd.target_utt + " + " + pd.interferer_utt);
    }
    if (pd.visual_utt != pd.target_utt) {
      ++log.decoupling_violations;
      throw StateError("ssav batch lost visual alignment: " + pd.target_utt +
                       " / " + pd.visual_utt);
    }
  }
}

struct SepRunSpec {
  DatasetVariant data_variant;
  bool reshuffle = false;
  std::string stage_on_save;
};

void require_dataset_variant(const Dataset& d, DatasetVariant expect,
                             const char* which) {
  if (d.variant != expect) {
    throw VariantConstraintError(std::string(which) + " dataset is " +
                                 to_string(d.variant) + ", expected " +
                                 to_string(expect));
  }
}

// Shared SI-SNR training loop: epoch shuffling, optional dssv reshuffle,
// batch gradient accumulation, plateau schedule, best-dev checkpointing.
TrainLog run_separation(SeparationModel& model, const Dataset& train_set,
                        const Dataset& dev_set, const TrainSchedule& sched,
                        const TrainIo& io, const SepRunSpec& spec) {
  sched.validate();
  if (io.reader == nullptr) throw ConfigError("training requires a corpus reader");
  require_dataset_variant(train_set, spec.data_variant, "train");
  require_dataset_variant(dev_set, spec.data_variant, "dev");
  if (train_set.pairs.empty()) throw ConfigError("train dataset is empty");
  if (dev_set.pairs.empty()) throw ConfigError("dev dataset is empty");

  model.set_stage(spec.stage_on_save);
  TrainLog log;
  PlateauTracker tracker(sched);
  Adam opt(model.trainable_parameters(), sched.initial_lr);
  const CorpusManifest& manifest = io.reader->manifest();

  // The dev set is fixed across epochs; render it once.
  std::vector<MixtureExample> dev_examples(dev_set.pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (size_t i = 0; i < dev_set.pairs.size(); ++i) {
    dev_examples[i] = render_pair(dev_set.pairs[i], *io.reader);
  }

  for (int epoch = 1;; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset epoch_set =
        spec.reshuffle
            ? reshuffle_epoch(train_set, static_cast<uint64_t>(epoch), manifest)
            : train_set;
    const std::vector<int> order =
        epoch_order(epoch_set.pairs.size(), sched.seed, epoch);
    const double lr_in_effect = opt.lr();

    double loss_sum = 0.0;
    int items = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += size_t(sched.batch_size)) {
      const size_t b1 =
          std::min(order.size(), b0 + size_t(sched.batch_size));
      const int batch_n = static_cast<int>(b1 - b0);
      for (size_t i = b0; i < b1; ++i) {
        check_pair_constraints(epoch_set.pairs[size_t(order[i])],
                               spec.data_variant, log);
      }
      std::vector<MixtureExample> batch(static_cast<size_t>(batch_n));
#pragma omp parallel for schedule(dynamic)
      for (size_t i = b0; i < b1; ++i) {
        batch[i - b0] = render_pair(epoch_set.pairs[size_t(order[i])],
                                    *io.reader);
      }
      model.zero_grad();
      for (const MixtureExample& ex : batch) {
        loss_sum += sep_item_loss(model, ex, 1.0 / batch_n, true);
        ++items;
      }
      opt.step();
      model.set_training_step(model.training_step() + 1);
    }

    double dev_sum = 0.0;
    for (const MixtureExample& ex : dev_examples) {
      dev_sum += sep_item_loss(model, ex, 0.0, false);
    }
    const double dev_loss = dev_sum / double(dev_examples.size());

    const PlateauTracker::Decision dec = tracker.observe(dev_loss);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / double(items);
    rec.dev_loss = dev_loss;
    rec.lr = lr_in_effect;
    rec.epoch_time_s = seconds_since(t0);
    log.epochs.push_back(rec);
    if (io.verbose) {
      std::fprintf(stderr, "epoch %3d  train %8.3f  dev %8.3f  lr %.3g  %.1fs\n",
                   rec.epoch, rec.train_loss, rec.dev_loss, rec.lr,
                   rec.epoch_time_s);
    }

    if (dec.improved && !io.out_ckpt.empty()) {
      model.save(io.out_ckpt);
    }
    opt.set_lr(dec.lr);
    if (dec.stop) {
      log.stop_reason = dec.reason;
      break;
    }
  }

  log.best_dev = tracker.best();
  log.best_epoch = tracker.best_epoch();
  log.checkpoint_path = io.out_ckpt;
  if (!io.log_path.empty()) log.write(io.log_path);
  return log;
}

}  // namespace

Adam::Adam(std::vector<Param*> params, double lr)
    : params_(std::move(params)), lr_(lr) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const Param* p : params_) {
    m_.emplace_back(p->value.shape);
    v_.emplace_back(p->value.shape);
  }
}

void Adam::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, double(t_));
  const double bc2 = 1.0 - std::pow(beta2_, double(t_));
  for (size_t pi = 0; pi < params_.size(); ++pi) {
    Param* p = params_[pi];
    if (!p->trainable) continue;
    float* w = p->value.data();
    const float* g = p->grad.data();
    float* m = m_[pi].data();
    float* v = v_[pi].data();
    const int64_t n = p->value.numel();
    for (int64_t i = 0; i < n; ++i) {
      const double gi = g[i];
      const double mi = beta1_ * m[i] + (1.0 - beta1_) * gi;
      const double vi = beta2_ * v[i] + (1.0 - beta2_) * gi * gi;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double mhat = mi / bc1;
      const double vhat = vi / bc2;
      w[i] = static_cast<float>(w[i] - lr_ * mhat / (std::sqrt(vhat) + eps_));
    }
  }
}

js TrainLog::to_json() const {
  js j;
  js eps = js::array();
  for (const EpochRecord& r : epochs) {
    js e;
    e["epoch"] = r.epoch;
    e["train_loss"] = r.train_loss;
    e["dev_loss"] = r.dev_loss;
    e["lr"] = r.lr;
    e["epoch_time_s"] = r.epoch_time_s;
    if (r.dev_accuracy >= 0) e["dev_accuracy"] = r.dev_accuracy;
    eps.push_back(std::move(e));
  }
  j["epochs"] = std::move(eps);
  j["stop_reason"] = stop_reason;
  j["checkpoint"] = checkpoint_path;
  j["best_epoch"] = best_epoch;
  j["best_dev"] = best_dev;
  j["decoupling_checks"] = decoupling_checks;
  j["decoupling_violations"] = decoupling_violations;
  return j;
}

void TrainLog::write(const std::string& path) const {
  std::vector<js> lines;
  const js full = to_json();
  for (const js& e : full.at("epochs")) lines.push_back(e);
  js summary = full;
  summary.erase("epochs");
  lines.push_back(std::move(summary));
  write_jsonl(path, lines);
}

VideoStream prepare_visual(const ModelConfig& cfg, VideoStream video) {
  if (cfg.visual_field == VisualField::mouth &&
      video.field == VisualField::face) {
    return crop_mouth(video);
  }
  return video;
}

TrainLog train_baseline(SeparationModel& model, const Dataset& train_set,
                        const Dataset& dev_set, const TrainSchedule& sched,
                        const TrainIo& io) {
  if (model.config().variant != Variant::baseline) {
    throw VariantConstraintError("train_baseline requires the baseline variant");
  }
  SepRunSpec spec;
  spec.data_variant = DatasetVariant::dsav;
  spec.stage_on_save = "trained";
  return run_separation(model, train_set, dev_set, sched, io, spec);
}

TrainLog train_spk_step1(SeparationModel& model, const TrainSchedule& sched,
                         const TrainIo& io) {
  if (model.config().variant != Variant::spk) {
    throw VariantConstraintError("train_spk_step1 requires the spk variant");
  }
  sched.validate();
  if (io.reader == nullptr) throw ConfigError("training requires a corpus reader");
  const CorpusManifest& manifest = io.reader->manifest();
  const std::vector<std::string> speakers = manifest.split_speakers("train");
  if (speakers.size() < 2) {
    throw ConfigError("speaker classification needs at least 2 train speakers");
  }
  model.init_classifier_head(static_cast<int>(speakers.size()));
  model.set_stage("spk_step1");

  struct Item {
    std::string ref;
    int label;
  };
  std::vector<Item> train_items, dev_items;
  for (size_t si = 0; si < speakers.size(); ++si) {
    const auto recs = manifest.speaker_records(speakers[si]);
    const size_t held = std::max<size_t>(1, recs.size() / 5);
    for (size_t i = 0; i < recs.size(); ++i) {
      Item it{CorpusManifest::ref_of(*recs[i]), static_cast<int>(si)};
      if (i + held < recs.size()) {
        train_items.push_back(std::move(it));
      } else {
        dev_items.push_back(std::move(it));
      }
    }
  }
  if (train_items.empty() || dev_items.empty()) {
    throw ConfigError("not enough utterances for a held-out split");
  }

  // Only the identity branch and the head learn in step 1.
  std::vector<Param*> learned;
  for (Param* p : model.trainable_parameters()) {
    if (p->name.starts_with("visual_ident.") || p->name.starts_with("head.")) {
      learned.push_back(p);
    }
  }
  TrainLog log;
  PlateauTracker tracker(sched);
  Adam opt(learned, sched.initial_lr);

  auto item_loss = [&](const Item& it, double scale, bool backward,
                       int64_t* correct, int64_t* total) {
    const VideoStream vis =
        prepare_visual(model.config(), io.reader->video(it.ref));
    const EmbeddingSequence emb =
        model.visual_frontend(vis, Branch::identity);
    const Tensor logits = model.classify_frames(emb);
    const double loss = ce_loss(logits, it.label);
    if (correct != nullptr) {
      const int64_t l = logits.dim(0);
      const int64_t c = logits.dim(1);
      for (int64_t f = 0; f < l; ++f) {
        const float* row = logits.data() + f * c;
        int64_t arg = 0;
        for (int64_t k = 1; k < c; ++k) {
          if (row[k] > row[arg]) arg = k;
        }
        *correct += (arg == it.label) ? 1 : 0;
        ++*total;
      }
    }
    if (backward) {
      Tensor g = ce_loss_grad(logits, it.label);
      for (float& x : g.v) x = static_cast<float>(x * scale);
      model.backward_classify(g);
    }
    return loss;
  };

  for (int epoch = 1;; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> order =
        epoch_order(train_items.size(), sched.seed, epoch);
    const double lr_in_effect = opt.lr();
    double loss_sum = 0.0;
    int items = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += size_t(sched.batch_size)) {
      const size_t b1 = std::min(order.size(), b0 + size_t(sched.batch_size));
      const int batch_n = static_cast<int>(b1 - b0);
      model.zero_grad();
      for (size_t i = b0; i < b1; ++i) {
        loss_sum += item_loss(train_items[size_t(order[i])], 1.0 / batch_n,
                              true, nullptr, nullptr);
        ++items;
      }
      opt.step();
      model.set_training_step(model.training_step() + 1);
    }

    double dev_sum = 0.0;
    int64_t correct = 0, total = 0;
    for (const Item& it : dev_items) {
      dev_sum += item_loss(it, 0.0, false, &correct, &total);
    }
    const double dev_loss = dev_sum / double(dev_items.size());

    const PlateauTracker::Decision dec = tracker.observe(dev_loss);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / double(items);
    rec.dev_loss = dev_loss;
    rec.lr = lr_in_effect;
    rec.epoch_time_s = seconds_since(t0);
    rec.dev_accuracy = double(correct) / double(total);
    log.epochs.push_back(rec);
    if (io.verbose) {
      std::fprintf(stderr,
                   "epoch %3d  train %8.3f  dev %8.3f  acc %.3f  lr %.3g  %.1fs\n",
                   rec.epoch, rec.train_loss, rec.dev_loss, rec.dev_accuracy,
                   rec.lr, rec.epoch_time_s);
    }

    if (dec.improved && !io.out_ckpt.empty()) model.save(io.out_ckpt);
    opt.set_lr(dec.lr);
    if (dec.stop) {
      log.stop_reason = dec.reason;
      break;
    }
  }
  log.best_dev = tracker.best();
  log.best_epoch = tracker.best_epoch();
  log.checkpoint_path = io.out_ckpt;
  if (!io.log_path.empty()) log.write(io.log_path);
  return log;
}

TrainLog train_spk_step2(SeparationModel& model, const Dataset& train_set,
                         const Dataset& dev_set, const TrainSchedule& sched,
                         const TrainIo& io) {
  if (model.config().variant != Variant::spk) {
    throw VariantConstraintError("train_spk_step2 requires the spk variant");
  }
  if (model.stage() != "spk_step1") {
    throw StateError("identity extractor is not pretrained; run step 1 first "
                     "(model stage is '" + model.stage() + "')");
  }
  model.freeze_prefixes({"visual_ident."});
  SepRunSpec spec;
  spec.data_variant = DatasetVariant::dssv;
  spec.reshuffle = true;
  spec.stage_on_save = "spk_step2";
  return run_separation(model, train_set, dev_set, sched, io, spec);
}

TrainLog train_sync(SeparationModel& model, const Dataset& train_set,
                    const Dataset& dev_set, const TrainSchedule& sched,
                    const TrainIo& io) {
  if (model.config().variant != Variant::sync) {
    throw VariantConstraintError("train_sync requires the sync variant");
  }
  SepRunSpec spec;
  spec.data_variant = DatasetVariant::ssav;
  spec.stage_on_save = "trained";
  return run_separation(model, train_set, dev_set, sched, io, spec);
}

TrainLog train_davse(SeparationModel& model, const Dataset& train_set,
                     const Dataset& dev_set, const TrainSchedule& sched,
                     const std::string& spk_ckpt, const std::string& sync_ckpt,
                     const TrainIo& io) {
  if (model.config().variant != Variant::davse) {
    throw VariantConstraintError("train_davse requires the davse variant");
  }
  model.load_branch_from(spk_ckpt, "visual_ident.");
  model.load_branch_from(sync_ckpt, "visual_sync.");
  model.freeze_prefixes({"visual_ident.", "visual_sync."});
  SepRunSpec spec;
  spec.data_variant = DatasetVariant::dsav;
  spec.stage_on_save = "trained";
  return run_separation(model, train_set, dev_set, sched, io, spec);
}

}  // namespace avsep
