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

#ifndef AVSEP_CORPUS_H_
#define AVSEP_CORPUS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "avsep/tensor.h"
#include "avsep/wav.h"

namespace avsep {

enum class Group { low, high };
enum class VisualField { face, mouth };

const char* to_string(Group g);
const char* to_string(VisualField f);
Group group_from_string(const std::string& s);
VisualField field_from_string(const std::string& s);

struct VideoStream {
  Tensor frames;  // [t, h, w], values in [0, 1]
  int fps = 25;
  VisualField field = VisualField::face;
};

/// Synthetic speakers carry identity in exactly two places: a smooth
// per-speaker face field and an index-coded signature row. The mouth region
// is rendered by a speaker-independent function of the aperture, so cropping
// to it removes the identity cue by construction.
struct SpeakerProfile {
  std::string speaker_id;
  Group group = Group::low;
  double f0_hz = 0.0;
  std::array<double, 8> timbre{};  // max element == 1
  Tensor face_template;            // [h, w]
  uint64_t seed = 0;
};

struct Utterance {
  std::string speaker_id;
  std::string utt_id;
  Waveform audio;
  VideoStream video;
  std::vector<float> aperture;  // one value per video frame, in [0, 1]
};

struct CorpusConfig {
  uint64_t seed = 1234;
  int speakers_train = 32;
  int speakers_dev = 8;
  int speakers_test = 10;
  int utterances_per_speaker = 20;
  int sample_rate = 8000;
  int fps = 25;
  int resolution = 32;

  void validate() const;
};

struct UttRecord {
  std::string speaker_id, utt_id, group, split, audio_path, video_path;
  double duration_s = 0.0;
};

struct CorpusManifest {
  uint64_t global_seed = 0;
  int sample_rate = 0, fps = 0, resolution = 0;
  std::vector<UttRecord> records;
  std::string root_dir;

  // "spk000/utt03" style reference.
  static std::string ref_of(const UttRecord& r) {
    return r.speaker_id + "/" + r.utt_id;
  }
  const UttRecord& find(const std::string& ref) const;
  std::vector<std::string> split_speakers(const std::string& split) const;
  std::vector<const UttRecord*> speaker_records(const std::string& speaker_id) const;
  Group speaker_group(const std::string& speaker_id) const;

  static CorpusManifest load(const std::string& dir);
};

SpeakerProfile make_speaker(uint64_t global_seed, int index, Group group,
                            int resolution);

// Stable per-utterance seed; generation order independent.
uint64_t utt_seed(uint64_t global_seed, const std::string& speaker_id,
                  const std::string& utt_id);

Utterance synth_utterance(const SpeakerProfile& profile,
                          const std::string& utt_id, uint64_t seed,
                          double duration_s, int sample_rate, int fps);

// Face template composited with an aperture-driven mouth; the building block
// of every video frame.
Tensor render_face_frame(const Tensor& face_template, double aperture);

VideoStream crop_mouth(const VideoStream& video);

CorpusManifest build_corpus(const CorpusConfig& config,
                            const std::string& out_dir);

// Loads audio/video for manifest records.
class CorpusReader {
 public:
  explicit CorpusReader(CorpusManifest manifest);

  const CorpusManifest& manifest() const { return manifest_; }
  Waveform audio(const std::string& ref) const;
  VideoStream video(const std::string& ref) const;

 private:
  CorpusManifest manifest_;
};

// Video container entries: frames quantized to int16 against a [0,1] range.
void write_video_file(const std::string& path, const VideoStream& video);
VideoStream read_video_file(const std::string& path);

}  // namespace avsep

#endif  // AVSEP_CORPUS_H_
