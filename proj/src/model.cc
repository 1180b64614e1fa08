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

#include "avsep/model.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <utility>

#include "avsep/errors.h"
#include "avsep/kernels.h"
#include "avsep/tensorfile.h"

namespace avsep {

namespace {

constexpr char kCkptMagic[4] = {'A', 'V', 'C', 'K'};

void put_u32l(std::string& s, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  s.append(b, 4);
}

uint32_t get_u32l(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

// Checkpoint layout: "AVCK" | u32 header_len | header JSON | AVT1 container.
void read_checkpoint_file(const std::string& path, js* header,
                          TensorContainer* params) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(s.data());
  if (s.size() < 8 || std::memcmp(p, kCkptMagic, 4) != 0) {
    throw CheckpointError(path + ": not a checkpoint file");
  }
  const uint32_t hlen = get_u32l(p + 4);
  if (8 + static_cast<size_t>(hlen) > s.size()) {
    throw CheckpointError(path + ": truncated checkpoint header");
  }
  js h = js::parse(s.substr(8, hlen), nullptr, false);
  if (h.is_discarded() || !h.is_object()) {
    throw CheckpointError(path + ": malformed checkpoint header");
  }
  *header = std::move(h);
  try {
    *params = TensorContainer::parse(p + 8 + hlen, s.size() - 8 - hlen, path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
}

bool name_has_prefix(const std::string& name,
                     const std::vector<std::string>& prefixes) {
  for (const std::string& f : prefixes) {
    if (name.starts_with(f)) return true;
  }
  return false;
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::baseline: return "baseline";
    case Variant::spk: return "spk";
    case Variant::sync: return "sync";
    case Variant::davse: return "davse";
  }
  return "baseline";
}

Variant variant_from_string(const std::string& s) {
  if (s == "baseline") return Variant::baseline;
  if (s == "spk") return Variant::spk;
  if (s == "sync") return Variant::sync;
  if (s == "davse") return Variant::davse;
  throw ConfigError("unknown model variant '" + s + "'");
}

void ModelConfig::validate() const {
  if (n_audio_filters < 1) throw ConfigError("n_audio_filters must be >= 1");
  if (audio_kernel < 2) throw ConfigError("audio_kernel must be >= 2");
  if (audio_stride < 1 || audio_stride > audio_kernel) {
    throw ConfigError("audio_stride must be in [1, audio_kernel]");
  }
  if (sample_rate < 1) throw ConfigError("sample_rate must be positive");
  if (fps < 1) throw ConfigError("fps must be positive");
  if (sample_rate % (audio_stride * fps) != 0) {
    throw ConfigError(
        "sample_rate / audio_stride must be an integer multiple of fps");
  }
  if (visual_dim < 1) throw ConfigError("visual_dim must be >= 1");
  if (tcn_bottleneck < 1 || tcn_hidden < 1 || tcn_blocks < 1 ||
      tcn_repeats < 1) {
    throw ConfigError("tcn dimensions must be >= 1");
  }
  if (tcn_kernel < 1 || tcn_kernel % 2 == 0) {
    throw ConfigError("tcn_kernel must be odd");
  }
  if (visual_stem_channels < 1) {
    throw ConfigError("visual_stem_channels must be >= 1");
  }
  if (visual_temporal_kernel < 1 || visual_temporal_kernel % 2 == 0) {
    throw ConfigError("visual_temporal_kernel must be odd");
  }
  if (resolution < 7) throw ConfigError("resolution must be >= 7");
}

js ModelConfig::to_json() const {
  js j;
  j["variant"] = to_string(variant);
  j["n_audio_filters"] = n_audio_filters;
  j["audio_kernel"] = audio_kernel;
  j["audio_stride"] = audio_stride;
  j["visual_dim"] = visual_dim;
  j["tcn_bottleneck"] = tcn_bottleneck;
  j["tcn_hidden"] = tcn_hidden;
  j["tcn_blocks"] = tcn_blocks;
  j["tcn_repeats"] = tcn_repeats;
  j["tcn_kernel"] = tcn_kernel;
  j["visual_stem_channels"] = visual_stem_channels;
  j["visual_temporal_kernel"] = visual_temporal_kernel;
  j["visual_field"] = to_string(visual_field);
  j["sample_rate"] = sample_rate;
  j["fps"] = fps;
  j["resolution"] = resolution;
  j["seed"] = seed;
  return j;
}

ModelConfig ModelConfig::from_json(const js& j) {
  expect_keys(j,
              {"variant", "n_audio_filters", "audio_kernel", "audio_stride",
               "visual_dim", "tcn_bottleneck", "tcn_hidden", "tcn_blocks",
               "tcn_repeats", "tcn_kernel", "visual_stem_channels",
               "visual_temporal_kernel", "visual_field", "sample_rate", "fps",
               "resolution", "seed"},
              "model config");
  ModelConfig c;
  if (j.contains("variant")) {
    c.variant = variant_from_string(j.at("variant").get<std::string>());
  }
  c.n_audio_filters = j.value("n_audio_filters", c.n_audio_filters);
  c.audio_kernel = j.value("audio_kernel", c.audio_kernel);
  c.audio_stride = j.value("audio_stride", c.audio_stride);
  c.visual_dim = j.value("visual_dim", c.visual_dim);
  c.tcn_bottleneck = j.value("tcn_bottleneck", c.tcn_bottleneck);
  c.tcn_hidden = j.value("tcn_hidden", c.tcn_hidden);
  c.tcn_blocks = j.value("tcn_blocks", c.tcn_blocks);
  c.tcn_repeats = j.value("tcn_repeats", c.tcn_repeats);
  c.tcn_kernel = j.value("tcn_kernel", c.tcn_kernel);
  c.visual_stem_channels = j.value("visual_stem_channels", c.visual_stem_channels);
  c.visual_temporal_kernel =
      j.value("visual_temporal_kernel", c.visual_temporal_kernel);
  if (j.contains("visual_field")) {
    c.visual_field = field_from_string(j.at("visual_field").get<std::string>());
  }
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.fps = j.value("fps", c.fps);
  c.resolution = j.value("resolution", c.resolution);
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

void VisualFrontend::init(const std::string& name, const ModelConfig& cfg,
                          int64_t out_dim, Rng& rng) {
  const int64_t c0 = cfg.visual_stem_channels;
  stem_.init(name + ".stem", c0, cfg.visual_temporal_kernel, 7, 4, rng);
  c1_.init(name + ".c1", c0, 2 * c0, rng);
  c2_.init(name + ".c2", 2 * c0, 4 * c0, rng);
  c3_.init(name + ".c3", 4 * c0, out_dim, rng);
  temporal_.clear();
  temporal_.resize(5);
  for (int i = 0; i < 5; ++i) {
    temporal_[i].init(name + ".t" + std::to_string(i), out_dim, 3, 1 << i,
                      rng);
  }
}

Tensor VisualFrontend::spatial_features(const Tensor& video_frames) {
  Tensor x = stem_.forward(video_frames);
  x = r0_.forward(x);
  x = c1_.forward(x);
  x = r1_.forward(x);
  x = c2_.forward(x);
  x = r2_.forward(x);
  x = c3_.forward(x);
  x = r3_.forward(x);
  return gap_.forward(x);
}

Tensor VisualFrontend::forward(const Tensor& video_frames) {
  Tensor x = spatial_features(video_frames);
  for (auto& blk : temporal_) x = blk.forward(x);
  return x;
}

void VisualFrontend::backward(const Tensor& g_emb) {
  Tensor g = g_emb;
  for (auto it = temporal_.rbegin(); it != temporal_.rend(); ++it) {
    g = it->backward(g);
  }
  g = gap_.backward(g);
  g = r3_.backward(g);
  g = c3_.backward(g);
  g = r2_.backward(g);
  g = c2_.backward(g);
  g = r1_.backward(g);
  g = c1_.backward(g);
  g = r0_.backward(g);
  stem_.backward(g);
}

void VisualFrontend::collect(std::vector<Param*>& out) {
  stem_.collect(out);
  c1_.collect(out);
  c2_.collect(out);
  c3_.collect(out);
  for (auto& blk : temporal_) blk.collect(out);
}

void ExtractionCore::init(const ModelConfig& cfg, int64_t visual_dim,
                          Rng& rng) {
  vis_channels_ = visual_dim;
  enc_.init("core.enc", cfg.n_audio_filters, cfg.audio_kernel,
            cfg.audio_stride, rng);
  norm0_.init("core.norm0", cfg.n_audio_filters);
  pw_in_.init("core.pw_in", cfg.n_audio_filters, cfg.tcn_bottleneck, rng);
  up_.ratio = cfg.upsample_ratio();
  pw_cat_.init("core.pw_cat", cfg.tcn_bottleneck + visual_dim,
               cfg.tcn_bottleneck, rng);
  const int total = cfg.tcn_repeats * cfg.tcn_blocks;
  tcn_.clear();
  tcn_.resize(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) {
    tcn_[static_cast<size_t>(i)].init("core.tcn" + std::to_string(i),
                                      cfg.tcn_bottleneck, cfg.tcn_hidden,
                                      cfg.tcn_kernel, 1 << (i % cfg.tcn_blocks),
                                      rng);
  }
  pw_mask_.init("core.pw_mask", cfg.tcn_bottleneck, cfg.n_audio_filters, rng);
  dec_.init("core.dec", cfg.n_audio_filters, cfg.audio_kernel,
            cfg.audio_stride, rng);
}

ExtractionCore::Out ExtractionCore::forward(const std::vector<float>& mixture,
                                            const Tensor& vis_emb) {
  if (vis_emb.rank() != 2 || vis_emb.dim(0) != vis_channels_) {
    throw ShapeError("visual embedding must be [" +
                     std::to_string(vis_channels_) + ", frames], got " +
                     vis_emb.shape_str());
  }
  in_len_ = static_cast<int64_t>(mixture.size());
  latent_ = enc_relu_.forward(enc_.forward(mixture));
  const int64_t na = latent_.dim(0);
  const int64_t ta = latent_.dim(1);
  bott_ = pw_in_.forward(norm0_.forward(latent_));
  visual_up_ = fit_.forward(up_.forward(vis_emb), ta);
  const int64_t b = bott_.dim(0);
  Tensor cat({b + vis_channels_, ta});
  std::memcpy(cat.data(), bott_.data(), sizeof(float) * size_t(b * ta));
  std::memcpy(cat.data() + b * ta, visual_up_.data(),
              sizeof(float) * size_t(vis_channels_ * ta));
  Tensor y = pw_cat_.forward(cat);
  for (auto& blk : tcn_) y = blk.forward(y);
  mask_ = mask_sig_.forward(pw_mask_.forward(y));
  Tensor masked({na, ta});
  kernels::hadamard(latent_.data(), mask_.data(), masked.data(),
                    latent_.numel());
  Out o;
  o.mask = mask_;
  o.est = dec_.forward(masked, in_len_);
  return o;
}

Tensor ExtractionCore::backward(const std::vector<float>& g_est) {
  Tensor g_masked = dec_.backward(g_est);
  const int64_t n = latent_.numel();
  Tensor g_lat_mul(latent_.shape);
  Tensor g_mask(latent_.shape);
  kernels::hadamard(g_masked.data(), mask_.data(), g_lat_mul.data(), n);
  kernels::hadamard(g_masked.data(), latent_.data(), g_mask.data(), n);
  Tensor g = mask_sig_.backward(g_mask);
  g = pw_mask_.backward(g);
  for (auto it = tcn_.rbegin(); it != tcn_.rend(); ++it) g = it->backward(g);
  Tensor g_cat = pw_cat_.backward(g);
  const int64_t ta = g_cat.dim(1);
  const int64_t b = g_cat.dim(0) - vis_channels_;
  Tensor g_bott({b, ta});
  Tensor g_vu({vis_channels_, ta});
  std::memcpy(g_bott.data(), g_cat.data(), sizeof(float) * size_t(b * ta));
  std::memcpy(g_vu.data(), g_cat.data() + b * ta,
              sizeof(float) * size_t(vis_channels_ * ta));
  Tensor g_lat = norm0_.backward(pw_in_.backward(g_bott));
  kernels::axpy(1.0f, g_lat_mul.data(), g_lat.data(), n);
  enc_.backward(enc_relu_.backward(g_lat));
  return up_.backward(fit_.backward(g_vu));
}

Tensor ExtractionCore::encode(const std::vector<float>& mixture) {
  return enc_relu_.forward(enc_.forward(mixture));
}

std::vector<float> ExtractionCore::decode(const Tensor& masked,
                                          int64_t out_len) {
  return dec_.forward(masked, out_len);
}

void ExtractionCore::collect(std::vector<Param*>& out) {
  enc_.collect(out);
  norm0_.collect(out);
  pw_in_.collect(out);
  pw_cat_.collect(out);
  for (auto& blk : tcn_) blk.collect(out);
  pw_mask_.collect(out);
  dec_.collect(out);
}

SeparationModel SeparationModel::create(const ModelConfig& cfg) {
  SeparationModel m;
  m.cfg_ = cfg;
  m.build();
  return m;
}

void SeparationModel::build() {
  cfg_.validate();
  Rng rng(hash_bytes(cfg_.seed, "sepnet"));
  const int64_t branch_dim = cfg_.visual_dim;
  const int64_t core_dim =
      cfg_.variant == Variant::baseline ? cfg_.joint_dim() : branch_dim;
  core_.init(cfg_, core_dim, rng);
  joint_.reset();
  ident_.reset();
  sync_.reset();
  fusion_.reset();
  head_w_.reset();
  switch (cfg_.variant) {
    case Variant::baseline:
      joint_ = std::make_unique<VisualFrontend>();
      joint_->init("visual_joint", cfg_, cfg_.joint_dim(), rng);
      break;
    case Variant::spk:
      ident_ = std::make_unique<VisualFrontend>();
      ident_->init("visual_ident", cfg_, branch_dim, rng);
      break;
    case Variant::sync:
      sync_ = std::make_unique<VisualFrontend>();
      sync_->init("visual_sync", cfg_, branch_dim, rng);
      break;
    case Variant::davse:
      ident_ = std::make_unique<VisualFrontend>();
      ident_->init("visual_ident", cfg_, branch_dim, rng);
      sync_ = std::make_unique<VisualFrontend>();
      sync_->init("visual_sync", cfg_, branch_dim, rng);
      fusion_.emplace();
      fusion_->init("fusion", 2 * branch_dim, branch_dim, rng);
      break;
  }
}

LatentAudio SeparationModel::encode_audio(const Waveform& wave) {
  if (wave.sample_rate != cfg_.sample_rate) {
    throw ConfigError("waveform sample rate " +
                      std::to_string(wave.sample_rate) +
                      " does not match model " +
                      std::to_string(cfg_.sample_rate));
  }
  return LatentAudio{core_.encode(wave.samples)};
}

EmbeddingSequence SeparationModel::visual_frontend(const VideoStream& video,
                                                   Branch branch) {
  if (video.frames.rank() != 3) {
    throw ShapeError("video must be [frames, h, w], got " +
                     video.frames.shape_str());
  }
  if (video.frames.dim(1) != cfg_.resolution ||
      video.frames.dim(2) != cfg_.resolution) {
    throw ShapeError("video resolution " + std::to_string(video.frames.dim(1)) +
                     "x" + std::to_string(video.frames.dim(2)) +
                     " does not match model resolution " +
                     std::to_string(cfg_.resolution));
  }
  if (video.fps != cfg_.fps) {
    throw ConfigError("video fps does not match model fps");
  }
  if (video.field != cfg_.visual_field) {
    throw ConfigError(std::string("model expects ") +
                      to_string(cfg_.visual_field) + " video, got " +
                      to_string(video.field));
  }
  VisualFrontend* fe = nullptr;
  const char* tag = "";
  switch (branch) {
    case Branch::joint:
      fe = joint_.get();
      tag = "V";
      break;
    case Branch::identity:
      fe = ident_.get();
      tag = "V_IE";
      break;
    case Branch::sync:
      fe = sync_.get();
      tag = "V_SE";
      break;
  }
  if (fe == nullptr) {
    throw VariantConstraintError(std::string("variant '") +
                                 to_string(cfg_.variant) +
                                 "' does not have the requested branch");
  }
  return EmbeddingSequence{fe->forward(video.frames), tag};
}

EmbeddingSequence SeparationModel::upsample_visual(const EmbeddingSequence& emb,
                                                   int ratio) {
  if (ratio < 1) throw ConfigError("upsample ratio must be >= 1");
  LinearUpsample up;
  up.ratio = ratio;
  return EmbeddingSequence{up.forward(emb.feat), emb.tag};
}

EmbeddingSequence SeparationModel::fuse(const EmbeddingSequence& v_i,
                                        const EmbeddingSequence& v_s) {
  if (!fusion_) {
    throw VariantConstraintError("fuse requires the davse variant");
  }
  if (!(v_i.tag == "V_I" || v_i.tag == "V_IE") ||
      !(v_s.tag == "V_S" || v_s.tag == "V_SE")) {
    throw ConfigError("fuse expects identity and sync branch embeddings, got " +
                      v_i.tag + " and " + v_s.tag);
  }
  if (v_i.frames() != v_s.frames()) {
    throw ShapeError("fuse length mismatch: " + std::to_string(v_i.frames()) +
                     " vs " + std::to_string(v_s.frames()));
  }
  const int64_t d = v_i.channels();
  const int64_t l = v_i.frames();
  if (v_s.channels() != d) {
    throw ShapeError("fuse channel mismatch");
  }
  Tensor cat({2 * d, l});
  std::memcpy(cat.data(), v_i.feat.data(), sizeof(float) * size_t(d * l));
  std::memcpy(cat.data() + d * l, v_s.feat.data(),
              sizeof(float) * size_t(d * l));
  return EmbeddingSequence{fusion_->forward(cat), "V"};
}

SeparationModel::ExtractOut SeparationModel::extract(
    const Waveform& mixture, const VideoStream& visual) {
  if (mixture.sample_rate != cfg_.sample_rate) {
    throw ConfigError("mixture sample rate does not match model");
  }
  EmbeddingSequence v;
  switch (cfg_.variant) {
    case Variant::baseline:
      v = visual_frontend(visual, Branch::joint);
      last_branch_ = Branch::joint;
      break;
    case Variant::spk:
      v = visual_frontend(visual, Branch::identity);
      last_branch_ = Branch::identity;
      break;
    case Variant::sync:
      v = visual_frontend(visual, Branch::sync);
      last_branch_ = Branch::sync;
      break;
    case Variant::davse: {
      EmbeddingSequence vi = visual_frontend(visual, Branch::identity);
      vi.tag = "V_I";
      EmbeddingSequence vs = visual_frontend(visual, Branch::sync);
      vs.tag = "V_S";
      v = fuse(vi, vs);
      last_branch_ = Branch::joint;
      break;
    }
  }
  ExtractionCore::Out o = core_.forward(mixture.samples, v.feat);
  ExtractOut r;
  r.est = Waveform{std::move(o.est), cfg_.sample_rate};
  r.mask = std::move(o.mask);
  r.v = std::move(v);
  return r;
}

void SeparationModel::backward_extract(const std::vector<float>& g_est) {
  Tensor g_v = core_.backward(g_est);
  switch (cfg_.variant) {
    case Variant::baseline:
      if (!name_has_prefix("visual_joint.", frozen_)) joint_->backward(g_v);
      break;
    case Variant::spk:
      if (!name_has_prefix("visual_ident.", frozen_)) ident_->backward(g_v);
      break;
    case Variant::sync:
      if (!name_has_prefix("visual_sync.", frozen_)) sync_->backward(g_v);
      break;
    case Variant::davse: {
      const bool ident_live = !name_has_prefix("visual_ident.", frozen_);
      const bool sync_live = !name_has_prefix("visual_sync.", frozen_);
      Tensor g_cat = fusion_->backward(g_v, ident_live || sync_live);
      if (ident_live || sync_live) {
        const int64_t d = cfg_.visual_dim;
        const int64_t l = g_cat.dim(1);
        if (ident_live) {
          Tensor gi({d, l});
          std::memcpy(gi.data(), g_cat.data(), sizeof(float) * size_t(d * l));
          ident_->backward(gi);
        }
        if (sync_live) {
          Tensor gs({d, l});
          std::memcpy(gs.data(), g_cat.data() + d * l,
                      sizeof(float) * size_t(d * l));
          sync_->backward(gs);
        }
      }
      break;
    }
  }
}

Tensor SeparationModel::classify_frames(const EmbeddingSequence& v_ie) {
  if (!head_w_) throw StateError("classifier head not initialized");
  const int64_t d = head_w_->value.dim(0);
  const int64_t c = head_w_->value.dim(1);
  if (v_ie.channels() != d) {
    throw ShapeError("embedding dim " + std::to_string(v_ie.channels()) +
                     " does not match classifier head rows " +
                     std::to_string(d));
  }
  head_v_ = v_ie.feat;
  const int64_t l = v_ie.frames();
  Tensor logits({l, c});
  kernels::mm_tn(head_v_.data(), head_w_->value.data(), logits.data(), l, d, c);
  return logits;
}

void SeparationModel::backward_classify(const Tensor& g_logits) {
  if (!head_w_ || head_v_.numel() == 0) {
    throw StateError("classify_frames must run before backward_classify");
  }
  const int64_t d = head_w_->value.dim(0);
  const int64_t c = head_w_->value.dim(1);
  const int64_t l = head_v_.dim(1);
  check_shape(g_logits, {l, c}, "classifier logit gradient");
  kernels::mm_nn(head_v_.data(), g_logits.data(), head_w_->grad.data(), d, l,
                 c, true);
  if (ident_ && !name_has_prefix("visual_ident.", frozen_)) {
    Tensor g_feat({d, l});
    kernels::mm_nt(head_w_->value.data(), g_logits.data(), g_feat.data(), d, c,
                   l);
    ident_->backward(g_feat);
  }
}

void SeparationModel::init_classifier_head(int n_classes) {
  if (cfg_.variant != Variant::spk) {
    throw VariantConstraintError(
        "the speaker classifier head applies to the spk variant only");
  }
  if (n_classes < 2) throw ConfigError("classifier needs >= 2 classes");
  head_w_.emplace();
  head_w_->init("head.w", {cfg_.visual_dim, n_classes});
  Rng rng(hash_bytes(cfg_.seed, "sepnet/head"));
  uniform_init(head_w_->value, he_limit(cfg_.visual_dim), rng);
  apply_frozen();
}

int SeparationModel::classifier_classes() const {
  return head_w_ ? static_cast<int>(head_w_->value.dim(1)) : 0;
}

std::vector<Param*> SeparationModel::parameters() {
  std::vector<Param*> out;
  core_.collect(out);
  if (joint_) joint_->collect(out);
  if (ident_) ident_->collect(out);
  if (sync_) sync_->collect(out);
  if (fusion_) fusion_->collect(out);
  if (head_w_) out.push_back(&*head_w_);
  return out;
}

std::vector<Param*> SeparationModel::trainable_parameters() {
  std::vector<Param*> out;
  for (Param* p : parameters()) {
    if (p->trainable) out.push_back(p);
  }
  return out;
}

void SeparationModel::zero_grad() {
  for (Param* p : parameters()) p->zero_grad();
}

int64_t SeparationModel::param_count(bool trainable_only) const {
  auto* self = const_cast<SeparationModel*>(this);
  int64_t n = 0;
  for (Param* p : self->parameters()) {
    if (!trainable_only || p->trainable) n += p->value.numel();
  }
  return n;
}

void SeparationModel::freeze_prefixes(
    const std::vector<std::string>& prefixes) {
  for (const std::string& f : prefixes) {
    if (std::find(frozen_.begin(), frozen_.end(), f) == frozen_.end()) {
      frozen_.push_back(f);
    }
  }
  apply_frozen();
}

void SeparationModel::apply_frozen() {
  for (Param* p : parameters()) {
    p->trainable = !name_has_prefix(p->name, frozen_);
  }
}

void SeparationModel::save(const std::string& path) const {
  auto* self = const_cast<SeparationModel*>(this);
  js header;
  header["format"] = 1;
  header["variant"] = to_string(cfg_.variant);
  header["config"] = cfg_.to_json();
  header["frozen_set"] = frozen_;
  header["stage"] = stage_;
  header["training_step"] = training_step_;
  header["head_classes"] = classifier_classes();
  TensorContainer c;
  for (Param* p : self->parameters()) c.put(p->name, p->value);
  const std::string hs = header.dump();
  std::string buf(kCkptMagic, 4);
  put_u32l(buf, static_cast<uint32_t>(hs.size()));
  buf += hs;
  buf += c.serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("checkpoint write failed: " + path);
}

SeparationModel SeparationModel::load(const std::string& path) {
  js header;
  TensorContainer c;
  read_checkpoint_file(path, &header, &c);
  ModelConfig cfg;
  try {
    cfg = ModelConfig::from_json(header.at("config"));
  } catch (const std::exception& e) {
    throw CheckpointError(path + ": bad config in header (" + e.what() + ")");
  }
  if (header.contains("variant") &&
      header.at("variant").get<std::string>() != to_string(cfg.variant)) {
    throw CheckpointError(path + ": header variant disagrees with config");
  }
  SeparationModel m = create(cfg);
  m.stage_ = header.value("stage", std::string("fresh"));
  m.training_step_ = header.value("training_step", int64_t{0});
  if (header.contains("frozen_set")) {
    m.frozen_ = header.at("frozen_set").get<std::vector<std::string>>();
  }
  const int head_classes = header.value("head_classes", 0);
  if (head_classes > 0) m.init_classifier_head(head_classes);
  for (Param* p : m.parameters()) {
    if (!c.has(p->name)) {
      throw CheckpointError(path + ": missing tensor '" + p->name + "'");
    }
    Tensor t = c.tensor(p->name);
    if (t.shape != p->value.shape) {
      throw CheckpointError(path + ": dimension mismatch for '" + p->name +
                            "' (" + t.shape_str() + " vs " +
                            p->value.shape_str() + ")");
    }
    p->value = std::move(t);
  }
  m.apply_frozen();
  return m;
}

void SeparationModel::load_branch_from(const std::string& ckpt_path,
                                       const std::string& prefix) {
  js header;
  TensorContainer c;
  read_checkpoint_file(ckpt_path, &header, &c);
  int copied = 0;
  for (Param* p : parameters()) {
    if (!p->name.starts_with(prefix)) continue;
    if (!c.has(p->name)) {
      throw CheckpointError(ckpt_path + ": missing tensor '" + p->name + "'");
    }
    Tensor t = c.tensor(p->name);
    if (t.shape != p->value.shape) {
      throw CheckpointError(ckpt_path + ": dimension mismatch for '" +
                            p->name + "' (" + t.shape_str() + " vs " +
                            p->value.shape_str() + ")");
    }
    p->value = std::move(t);
    ++copied;
  }
  if (copied == 0) {
    throw CheckpointError(ckpt_path + ": no parameters under prefix '" +
                          prefix + "'");
  }
}

}  // namespace avsep
