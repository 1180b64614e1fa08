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

#ifndef AVSEP_MODEL_H_
#define AVSEP_MODEL_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avsep/corpus.h"
#include "avsep/jsonio.h"
#include "avsep/layers.h"
#include "avsep/wav.h"

namespace avsep {

enum class Variant { baseline, spk, sync, davse };

const char* to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ModelConfig {
  Variant variant = Variant::baseline;
  int n_audio_filters = 128;  // N_a
  int audio_kernel = 32;      // K_a, samples
  int audio_stride = 16;      // S_a, samples
  int visual_dim = 64;        // D_v per branch; joint branch uses 2*D_v
  int tcn_bottleneck = 64;
  int tcn_hidden = 128;
  int tcn_blocks = 4;   // X, blocks per repeat, dilation 2^x
  int tcn_repeats = 2;  // R
  int tcn_kernel = 3;
  int visual_stem_channels = 16;
  int visual_temporal_kernel = 5;  // Conv3D temporal extent
  VisualField visual_field = VisualField::face;
  int sample_rate = 8000;
  int fps = 25;
  int resolution = 32;
  uint64_t seed = 1;

  int upsample_ratio() const { return sample_rate / audio_stride / fps; }
  int joint_dim() const { return 2 * visual_dim; }
  void validate() const;
  js to_json() const;
  static ModelConfig from_json(const js& j);
};

// Branch selector for visual_frontend.
enum class Branch { joint, identity, sync };

struct EmbeddingSequence {
  Tensor feat;  // [channels, frames]
  std::string tag;  // V, V_I, V_S, V_IE, V_SE, V_IS

  int64_t frames() const { return feat.dim(1); }
  int64_t channels() const { return feat.dim(0); }
};

struct LatentAudio {
  Tensor feat;  // [N_a, T_a]

  int64_t frames() const { return feat.dim(1); }
  int64_t filters() const { return feat.dim(0); }
};

// Spatial front-end (Conv3D stem + three stride-2 Conv2D + global average
// pool) followed by five residual dilated temporal units. One instance per
// visual branch.
class VisualFrontend {
 public:
  void init(const std::string& name, const ModelConfig& cfg, int64_t out_dim,
            Rng& rng);
  // Full branch; caches for backward.
  Tensor forward(const Tensor& video_frames);
  void backward(const Tensor& g_emb);
  // Spatial stack only (before the temporal units); used by shape tests.
  Tensor spatial_features(const Tensor& video_frames);
  void collect(std::vector<Param*>& out);

 private:
  Conv3dStem stem_;
  Relu r0_;
  Conv2dBlock c1_, c2_, c3_;
  Relu r1_, r2_, r3_;
  GlobalAvgPool2d gap_;
  std::vector<TemporalResBlock> temporal_;
};

// Encoder, visual-conditioned TCN mask estimator, decoder.
class ExtractionCore {
 public:
  void init(const ModelConfig& cfg, int64_t visual_dim, Rng& rng);

  struct Out {
    std::vector<float> est;
    Tensor mask;  // [N_a, T_a]
  };
  // vis_emb is the branch output at video rate [D, L]; the core upsamples
  // and fits it to the latent rate.
  Out forward(const std::vector<float>& mixture, const Tensor& vis_emb);
  // Returns the gradient w.r.t. vis_emb [D, L].
  Tensor backward(const std::vector<float>& g_est);

  Tensor encode(const std::vector<float>& mixture);  // latent after ReLU
  std::vector<float> decode(const Tensor& masked, int64_t out_len);
  int64_t latent_frames(int64_t n_samples) const { return enc_.frames_for(n_samples); }
  void collect(std::vector<Param*>& out);

 private:
  ConvEncoder enc_;
  Relu enc_relu_;
  ChanTimeNorm norm0_;
  PointwiseConv pw_in_;
  LinearUpsample up_;
  TimeFit fit_;
  PointwiseConv pw_cat_;
  std::vector<TcnBlock> tcn_;
  PointwiseConv pw_mask_;
  Sigmoid mask_sig_;
  ConvDecoder dec_;
  // forward caches
  Tensor latent_, mask_, bott_, visual_up_;
  int64_t in_len_ = 0, vis_channels_ = 0;
};

class SeparationModel {
 public:
  static SeparationModel create(const ModelConfig& cfg);
  static SeparationModel load(const std::string& path);
  void save(const std::string& path) const;

  const ModelConfig& config() const { return cfg_; }
  const std::string& stage() const { return stage_; }
  void set_stage(const std::string& s) { stage_ = s; }
  int64_t training_step() const { return training_step_; }
  void set_training_step(int64_t s) { training_step_ = s; }

  LatentAudio encode_audio(const Waveform& wave);
  EmbeddingSequence visual_frontend(const VideoStream& video, Branch branch);
  static EmbeddingSequence upsample_visual(const EmbeddingSequence& emb,
                                           int ratio);
  // davse: concatenate V_I and V_S along channels, then 1x1 conv to D_v.
  EmbeddingSequence fuse(const EmbeddingSequence& v_i,
                         const EmbeddingSequence& v_s);

  struct ExtractOut {
    Waveform est;
    Tensor mask;
    EmbeddingSequence v;
  };
  ExtractOut extract(const Waveform& mixture, const VideoStream& visual);
  // Backward through the cached extract graph. Frozen visual branches are
  // skipped entirely (no trainable parameter sits upstream of them).
  void backward_extract(const std::vector<float>& g_est);

  // spk only: per-frame speaker logits [L, C].
  Tensor classify_frames(const EmbeddingSequence& v_ie);
  void backward_classify(const Tensor& g_logits);
  void init_classifier_head(int n_classes);
  int classifier_classes() const;

  std::vector<Param*> parameters();
  std::vector<Param*> trainable_parameters();
  void zero_grad();
  int64_t param_count(bool trainable_only) const;

  // Freeze by parameter-name prefixes (e.g. "visual_ident.").
  void freeze_prefixes(const std::vector<std::string>& prefixes);
  const std::vector<std::string>& frozen_set() const { return frozen_; }

  // davse: load branch parameters from spk/sync checkpoints by name prefix.
  void load_branch_from(const std::string& ckpt_path,
                        const std::string& prefix);

  // mask/encode/decode test hooks.
  ExtractionCore& core() { return core_; }

 private:
  void build();
  void apply_frozen();

  ModelConfig cfg_;
  std::string stage_ = "fresh";
  int64_t training_step_ = 0;
  std::vector<std::string> frozen_;

  ExtractionCore core_;
  std::unique_ptr<VisualFrontend> joint_, ident_, sync_;
  std::optional<PointwiseConv> fusion_;
  std::optional<Param> head_w_;  // [D_v, C]

  // extract() routing caches for backward_extract.
  Branch last_branch_ = Branch::joint;
  Tensor head_v_;  // cached V_IE for backward_classify
};

}  // namespace avsep

#endif  // AVSEP_MODEL_H_
