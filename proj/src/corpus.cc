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

#include "avsep/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "avsep/errors.h"
#include "avsep/jsonio.h"
#include "avsep/rng.h"
#include "avsep/tensorfile.h"

namespace avsep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kHarmonics = 8;
constexpr int kPhones = 6;

// Mouth rectangle in relative frame coordinates. crop_mouth and the mouth
// renderer must agree on these so the crop contains no identity content.
constexpr double kMouthTop = 0.60, kMouthBottom = 0.94;
constexpr double kMouthLeft = 0.25, kMouthRight = 0.75;

// Per-phone harmonic emphasis, shared by all speakers so the viseme-audio
// relation is speaker independent.
constexpr double kPhoneEmph[kPhones][kHarmonics] = {
    {1.00, 0.60, 0.30, 0.15, 0.10, 0.05, 0.02, 0.01},
    {0.30, 1.00, 0.70, 0.30, 0.10, 0.05, 0.02, 0.01},
    {0.20, 0.40, 1.00, 0.70, 0.30, 0.10, 0.05, 0.02},
    {0.10, 0.20, 0.50, 1.00, 0.60, 0.30, 0.10, 0.05},
    {0.10, 0.10, 0.30, 0.60, 1.00, 0.60, 0.30, 0.10},
    {0.05, 0.10, 0.20, 0.30, 0.60, 1.00, 0.70, 0.30},
};

struct MouthRect {
  int64_t r0, r1, c0, c1;
};

MouthRect mouth_rect(int64_t h, int64_t w) {
  MouthRect r;
  r.r0 = llround(kMouthTop * h);
  r.r1 = llround(kMouthBottom * h);
  r.c0 = llround(kMouthLeft * w);
  r.c1 = llround(kMouthRight * w);
  return r;
}

// Paints the mouth rectangle as a pure function of the aperture. Everything
// under the rectangle is overwritten, so no speaker identity survives here.
void render_mouth(Tensor& frame, double aperture) {
  const int64_t h = frame.dim(0), w = frame.dim(1);
  const MouthRect m = mouth_rect(h, w);
  for (int64_t y = m.r0; y < m.r1; ++y) {
    for (int64_t x = m.c0; x < m.c1; ++x) {
      frame.v[static_cast<size_t>(y * w + x)] = 0.35f;
    }
  }
  const double cy = 0.5 * static_cast<double>(m.r0 + m.r1 - 1);
  const double cx = 0.5 * static_cast<double>(m.c0 + m.c1 - 1);
  const double ax = 0.42 * static_cast<double>(m.c1 - m.c0);
  const double ay = aperture * 0.48 * static_cast<double>(m.r1 - m.r0);
  if (ay >= 0.35) {
    for (int64_t y = m.r0; y < m.r1; ++y) {
      const double dy = (static_cast<double>(y) - cy) / ay;
      for (int64_t x = m.c0; x < m.c1; ++x) {
        const double dx = (static_cast<double>(x) - cx) / ax;
        const double d = dx * dx + dy * dy;
        if (d <= 1.0) {
          float& px = frame.v[static_cast<size_t>(y * w + x)];
          if (d <= 0.85) {
            px = 0.06f;
          } else {
            const double mix = (d - 0.85) / 0.15;
            px = static_cast<float>(0.06 + (0.35 - 0.06) * mix);
          }
        }
      }
    }
  } else {
    const int64_t line = llround(cy);
    for (int64_t x = m.c0 + 1; x < m.c1 - 1; ++x) {
      frame.v[static_cast<size_t>(line * w + x)] = 0.2f;
    }
  }
}

Tensor bilinear_resize(const Tensor& img, int64_t oh, int64_t ow) {
  const int64_t h = img.dim(0), w = img.dim(1);
  Tensor out({oh, ow});
  for (int64_t y = 0; y < oh; ++y) {
    double v = (static_cast<double>(y) + 0.5) * static_cast<double>(h) /
                   static_cast<double>(oh) -
               0.5;
    v = std::clamp(v, 0.0, static_cast<double>(h - 1));
    const int64_t y0 = static_cast<int64_t>(std::floor(v));
    const int64_t y1 = std::min(y0 + 1, h - 1);
    const double fy = v - static_cast<double>(y0);
    for (int64_t x = 0; x < ow; ++x) {
      double u = (static_cast<double>(x) + 0.5) * static_cast<double>(w) /
                     static_cast<double>(ow) -
                 0.5;
      u = std::clamp(u, 0.0, static_cast<double>(w - 1));
      const int64_t x0 = static_cast<int64_t>(std::floor(u));
      const int64_t x1 = std::min(x0 + 1, w - 1);
      const double fx = u - static_cast<double>(x0);
      const double p00 = img.v[static_cast<size_t>(y0 * w + x0)];
      const double p01 = img.v[static_cast<size_t>(y0 * w + x1)];
      const double p10 = img.v[static_cast<size_t>(y1 * w + x0)];
      const double p11 = img.v[static_cast<size_t>(y1 * w + x1)];
      out.v[static_cast<size_t>(y * ow + x)] = static_cast<float>(
          (1 - fy) * ((1 - fx) * p00 + fx * p01) +
          fy * ((1 - fx) * p10 + fx * p11));
    }
  }
  return out;
}

std::string speaker_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "spk%03d", index);
  return buf;
}

std::string utt_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "utt%02d", index);
  return buf;
}

}  // namespace

const char* to_string(Group g) { return g == Group::low ? "low" : "high"; }
const char* to_string(VisualField f) {
  return f == VisualField::face ? "face" : "mouth";
}

Group group_from_string(const std::string& s) {
  if (s == "low") return Group::low;
  if (s == "high") return Group::high;
  throw ConfigError("unknown group '" + s + "'");
}

VisualField field_from_string(const std::string& s) {
  if (s == "face") return VisualField::face;
  if (s == "mouth") return VisualField::mouth;
  throw ConfigError("unknown visual field '" + s + "'");
}

void CorpusConfig::validate() const {
  if (utterances_per_speaker < 2) {
    throw ConfigError("corpus: utterances_per_speaker must be >= 2 "
                      "(same-speaker mixing needs two)");
  }
  for (int n : {speakers_train, speakers_dev, speakers_test}) {
    if (n < 4) {
      throw ConfigError("corpus: each split needs >= 4 speakers "
                        "(two per pitch group)");
    }
  }
  if (sample_rate <= 0 || fps <= 0 || sample_rate % fps != 0) {
    throw ConfigError("corpus: sample_rate must be a positive multiple of fps");
  }
  if (resolution < 16 || resolution > 512) {
    throw ConfigError("corpus: resolution must be in [16, 512]");
  }
}

SpeakerProfile make_speaker(uint64_t global_seed, int index, Group group,
                            int resolution) {
  if (index < 0) throw ConfigError("make_speaker: index must be >= 0");
  SpeakerProfile p;
  p.speaker_id = speaker_name(index);
  p.group = group;
  p.seed = hash_combine(mix64(global_seed), static_cast<uint64_t>(index) * 2 +
                                                (group == Group::high ? 1 : 0));
  Rng rng(p.seed);
  p.f0_hz = group == Group::low ? rng.uniform(100.0, 140.0)
                                : rng.uniform(180.0, 240.0);
  double mx = 0.0;
  for (int h = 0; h < kHarmonics; ++h) {
    p.timbre[static_cast<size_t>(h)] = rng.uniform(0.05, 1.0);
    mx = std::max(mx, p.timbre[static_cast<size_t>(h)]);
  }
  for (double& a : p.timbre) a /= mx;

  const int64_t hw = resolution;
  p.face_template = Tensor({hw, hw});
  const double f1u = rng.uniform(0.5, 2.5), f1v = rng.uniform(0.5, 2.5);
  const double f2u = rng.uniform(0.5, 2.5), f2v = rng.uniform(0.5, 2.5);
  const double ph1 = rng.uniform(0.0, 2.0 * kPi), ph2 = rng.uniform(0.0, 2.0 * kPi);
  const double eye_depth = rng.uniform(0.2, 0.5);
  const double eye_sigma = rng.uniform(0.06, 0.12) * static_cast<double>(hw);
  for (int64_t y = 0; y < hw; ++y) {
    const double v = static_cast<double>(y) / static_cast<double>(hw - 1);
    for (int64_t x = 0; x < hw; ++x) {
      const double u = static_cast<double>(x) / static_cast<double>(hw - 1);
      double val = 0.5 + 0.16 * std::sin(2.0 * kPi * (f1u * u + f1v * v) + ph1) +
                   0.12 * std::sin(2.0 * kPi * (f2u * u + f2v * v) + ph2);
      for (double ex : {0.30, 0.70}) {
        const double dx = (u - ex) * static_cast<double>(hw - 1);
        const double dy = (v - 0.30) * static_cast<double>(hw - 1);
        val -= eye_depth *
               std::exp(-(dx * dx + dy * dy) / (2.0 * eye_sigma * eye_sigma));
      }
      p.face_template.v[static_cast<size_t>(y * hw + x)] =
          static_cast<float>(std::clamp(val, 0.05, 0.95));
    }
  }
  // Index-coded signature row: adjacent speakers always differ by >= 0.9 in
  // some pixel, which pins the template-uniqueness guarantee.
  const int64_t sig_col = std::min<int64_t>(2, hw - 16);
  for (int bit = 0; bit < 16; ++bit) {
    const bool on = (static_cast<unsigned>(index) >> bit) & 1u;
    p.face_template.v[static_cast<size_t>(1 * hw + sig_col + bit)] =
        on ? 0.95f : 0.05f;
  }
  render_mouth(p.face_template, 0.0);
  return p;
}

uint64_t utt_seed(uint64_t global_seed, const std::string& speaker_id,
                  const std::string& utt_id) {
  return hash_bytes(global_seed, speaker_id + "/" + utt_id);
}

Tensor render_face_frame(const Tensor& face_template, double aperture) {
  Tensor frame = face_template;
  render_mouth(frame, aperture);
  return frame;
}

Utterance synth_utterance(const SpeakerProfile& profile,
                          const std::string& utt_id, uint64_t seed,
                          double duration_s, int sample_rate, int fps) {
  if (duration_s < 4.0 || duration_s > 6.0) {
    throw DurationOutOfRange("utterance duration " + std::to_string(duration_s) +
                             " s outside [4, 6]");
  }
  if (sample_rate <= 0 || fps <= 0 || sample_rate % fps != 0) {
    throw ConfigError("synth: sample_rate must be a positive multiple of fps");
  }
  const int64_t hop = sample_rate / fps;
  const int64_t frames = llround(duration_s * fps);
  const int64_t n = frames * hop;

  Rng rng(seed);
  double phase[kHarmonics];
  for (double& ph : phase) ph = rng.uniform(0.0, 2.0 * kPi);

  struct Segment {
    int64_t start, len;
    double level;  // 0 for silence
    int phone;
  };
  std::vector<Segment> segs;
  int64_t t = 0;
  bool phone_next = true;
  bool loud = rng.uniform() < 0.5;
  double since_silence = 0.0;
  while (t < n) {
    Segment s{};
    s.start = t;
    if (phone_next) {
      const double dur = rng.uniform(0.08, 0.24);
      s.level = loud ? rng.uniform(0.70, 1.00) : rng.uniform(0.30, 0.55);
      loud = !loud;
      s.phone = rng.uniform_int(kPhones);
      s.len = std::min<int64_t>(llround(dur * sample_rate), n - t);
      since_silence += dur;
      phone_next = !(since_silence >= 1.2 || rng.uniform() < 0.45);
    } else {
      const double dur = rng.uniform(0.08, 0.16);
      s.level = 0.0;
      s.phone = -1;
      s.len = std::min<int64_t>(llround(dur * sample_rate), n - t);
      since_silence = 0.0;
      phone_next = true;
    }
    if (s.len > 0) segs.push_back(s);
    t += s.len;
  }

  std::vector<double> x(static_cast<size_t>(n), 0.0);
  const double ramp_s = 0.012;
  for (const Segment& s : segs) {
    if (s.level <= 0.0) continue;
    double amps[kHarmonics];
    double norm = 0.0;
    for (int h = 0; h < kHarmonics; ++h) {
      amps[h] = profile.timbre[static_cast<size_t>(h)] * kPhoneEmph[s.phone][h];
      norm += amps[h] * amps[h];
    }
    norm = std::sqrt(norm);
    for (double& a : amps) a = a / norm * 0.45;
    const double attack =
        std::min(ramp_s * sample_rate, static_cast<double>(s.len) / 4.0);
    for (int64_t i = 0; i < s.len; ++i) {
      const double tt =
          static_cast<double>(s.start + i) / static_cast<double>(sample_rate);
      const double edge = static_cast<double>(std::min(i, s.len - 1 - i));
      const double env = attack > 0.0 ? std::min(1.0, edge / attack) : 1.0;
      double v = 0.0;
      for (int h = 0; h < kHarmonics; ++h) {
        v += amps[h] *
             std::sin(2.0 * kPi * profile.f0_hz * (h + 1) * tt + phase[h]);
      }
      x[static_cast<size_t>(s.start + i)] = s.level * env * v;
    }
  }
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? 0.85 / peak : 1.0;

  Utterance u;
  u.speaker_id = profile.speaker_id;
  u.utt_id = utt_id;
  u.audio.sample_rate = sample_rate;
  u.audio.samples.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    u.audio.samples[static_cast<size_t>(i)] =
        static_cast<float>(x[static_cast<size_t>(i)] * scale);
  }

  std::vector<double> rms(static_cast<size_t>(frames), 0.0);
  for (int64_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (int64_t i = f * hop; i < (f + 1) * hop; ++i) {
      const double v = u.audio.samples[static_cast<size_t>(i)];
      acc += v * v;
    }
    rms[static_cast<size_t>(f)] = std::sqrt(acc / static_cast<double>(hop));
  }
  std::vector<double> smooth(static_cast<size_t>(frames));
  for (int64_t f = 0; f < frames; ++f) {
    const double a = rms[static_cast<size_t>(std::max<int64_t>(f - 1, 0))];
    const double b = rms[static_cast<size_t>(f)];
    const double c = rms[static_cast<size_t>(std::min(f + 1, frames - 1))];
    smooth[static_cast<size_t>(f)] = 0.25 * a + 0.5 * b + 0.25 * c;
  }
  double lo = smooth[0], hi = smooth[0];
  for (double v : smooth) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  u.aperture.resize(static_cast<size_t>(frames), 0.0f);
  if (hi > lo) {
    for (int64_t f = 0; f < frames; ++f) {
      u.aperture[static_cast<size_t>(f)] =
          static_cast<float>((smooth[static_cast<size_t>(f)] - lo) / (hi - lo));
    }
  }

  const int64_t res = profile.face_template.dim(0);
  u.video.fps = fps;
  u.video.field = VisualField::face;
  u.video.frames = Tensor({frames, res, res});
  for (int64_t f = 0; f < frames; ++f) {
    Tensor fr = render_face_frame(profile.face_template,
                                  u.aperture[static_cast<size_t>(f)]);
    std::copy(fr.v.begin(), fr.v.end(),
              u.video.frames.v.begin() + f * res * res);
  }
  return u;
}

VideoStream crop_mouth(const VideoStream& video) {
  if (video.field == VisualField::mouth) {
    throw AlreadyCropped("crop_mouth: video is already a mouth crop");
  }
  const int64_t t = video.frames.dim(0), h = video.frames.dim(1),
                w = video.frames.dim(2);
  const MouthRect m = mouth_rect(h, w);
  VideoStream out;
  out.fps = video.fps;
  out.field = VisualField::mouth;
  out.frames = Tensor({t, h, w});
  for (int64_t f = 0; f < t; ++f) {
    Tensor crop({m.r1 - m.r0, m.c1 - m.c0});
    for (int64_t y = m.r0; y < m.r1; ++y) {
      for (int64_t x = m.c0; x < m.c1; ++x) {
        crop.v[static_cast<size_t>((y - m.r0) * (m.c1 - m.c0) + (x - m.c0))] =
            video.frames.v[static_cast<size_t>((f * h + y) * w + x)];
      }
    }
    Tensor up = bilinear_resize(crop, h, w);
    std::copy(up.v.begin(), up.v.end(), out.frames.v.begin() + f * h * w);
  }
  return out;
}

void write_video_file(const std::string& path, const VideoStream& video) {
  TensorContainer c;
  std::vector<int16_t> q(video.frames.v.size());
  for (size_t i = 0; i < q.size(); ++i) {
    q[i] = quantize_i16(video.frames.v[i]);
  }
  c.put_i16("frames", video.frames.shape, std::move(q));
  Tensor meta({2});
  meta.v[0] = static_cast<float>(video.fps);
  meta.v[1] = video.field == VisualField::face ? 0.0f : 1.0f;
  c.put("meta", meta);
  c.write(path);
}

VideoStream read_video_file(const std::string& path) {
  TensorContainer c = TensorContainer::read(path);
  const TensorEntry& e = c.entry("frames");
  if (e.dtype != TensorEntry::kI16 || e.shape.size() != 3) {
    throw IoError(path + ": malformed video entry");
  }
  VideoStream v;
  v.frames.shape = e.shape;
  v.frames.v.resize(e.i16.size());
  for (size_t i = 0; i < e.i16.size(); ++i) {
    v.frames.v[i] = dequantize_i16(e.i16[i]);
  }
  Tensor meta = c.tensor("meta");
  v.fps = static_cast<int>(meta.v[0]);
  v.field = meta.v[1] == 0.0f ? VisualField::face : VisualField::mouth;
  return v;
}

CorpusManifest build_corpus(const CorpusConfig& config,
                            const std::string& out_dir) {
  config.validate();
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "audio", ec);
  fs::create_directories(fs::path(out_dir) / "video", ec);
  if (ec) throw IoError("cannot create corpus directories under " + out_dir);

  struct SpeakerSlot {
    SpeakerProfile profile;
    std::string split;
  };
  std::vector<SpeakerSlot> speakers;
  int global_index = 0;
  const std::pair<const char*, int> splits[] = {
      {"train", config.speakers_train},
      {"dev", config.speakers_dev},
      {"test", config.speakers_test}};
  for (const auto& [split, count] : splits) {
    for (int i = 0; i < count; ++i, ++global_index) {
      const Group g = i % 2 == 0 ? Group::low : Group::high;
      speakers.push_back(
          {make_speaker(config.seed, global_index, g, config.resolution),
           split});
    }
  }

  const int upu = config.utterances_per_speaker;
  const int64_t total = static_cast<int64_t>(speakers.size()) * upu;
  std::vector<UttRecord> records(static_cast<size_t>(total));
  // Each item is a pure function of (config.seed, speaker_id, utt_id).
#pragma omp parallel for schedule(dynamic)
  for (int64_t item = 0; item < total; ++item) {
    const SpeakerSlot& slot = speakers[static_cast<size_t>(item / upu)];
    const int ui = static_cast<int>(item % upu);
    const std::string uid = utt_name(ui);
    const uint64_t useed = utt_seed(config.seed, slot.profile.speaker_id, uid);
    Rng drng(hash_combine(useed, 0xD17Aull));
    const double draw = drng.uniform(4.0, 6.0);
    const double duration =
        static_cast<double>(llround(draw * config.fps)) / config.fps;
    Utterance u = synth_utterance(slot.profile, uid, useed, duration,
                                  config.sample_rate, config.fps);
    const std::string stem = slot.profile.speaker_id + "_" + uid;
    const std::string audio_rel = "audio/" + stem + ".wav";
    const std::string video_rel = "video/" + stem + ".avt";
    write_wav((fs::path(out_dir) / audio_rel).string(), u.audio);
    write_video_file((fs::path(out_dir) / video_rel).string(), u.video);
    UttRecord& r = records[static_cast<size_t>(item)];
    r.speaker_id = slot.profile.speaker_id;
    r.utt_id = uid;
    r.group = to_string(slot.profile.group);
    r.split = slot.split;
    r.audio_path = audio_rel;
    r.video_path = video_rel;
    r.duration_s = duration;
  }

  CorpusManifest m;
  m.global_seed = config.seed;
  m.sample_rate = config.sample_rate;
  m.fps = config.fps;
  m.resolution = config.resolution;
  m.records = std::move(records);
  m.root_dir = out_dir;

  std::vector<js> lines;
  lines.reserve(m.records.size());
  for (const UttRecord& r : m.records) {
    lines.push_back(js{{"speaker_id", r.speaker_id},
                       {"utt_id", r.utt_id},
                       {"group", r.group},
                       {"split", r.split},
                       {"audio_path", r.audio_path},
                       {"video_path", r.video_path},
                       {"duration_s", r.duration_s}});
  }
  write_jsonl((fs::path(out_dir) / "manifest.jsonl").string(), lines);
  js meta{{"global_seed", m.global_seed},
          {"sample_rate", m.sample_rate},
          {"fps", m.fps},
          {"resolution", m.resolution},
          {"speakers", js{{"train", config.speakers_train},
                          {"dev", config.speakers_dev},
                          {"test", config.speakers_test}}},
          {"utterances_per_speaker", upu}};
  write_json_file((fs::path(out_dir) / "corpus_meta.json").string(), meta);
  return m;
}

const UttRecord& CorpusManifest::find(const std::string& ref) const {
  for (const UttRecord& r : records) {
    if (ref_of(r) == ref) return r;
  }
  throw IoError("manifest: no record for '" + ref + "'");
}

std::vector<std::string> CorpusManifest::split_speakers(
    const std::string& split) const {
  std::vector<std::string> out;
  for (const UttRecord& r : records) {
    if (r.split == split && (out.empty() || out.back() != r.speaker_id)) {
      if (std::find(out.begin(), out.end(), r.speaker_id) == out.end()) {
        out.push_back(r.speaker_id);
      }
    }
  }
  return out;
}

std::vector<const UttRecord*> CorpusManifest::speaker_records(
    const std::string& speaker_id) const {
  std::vector<const UttRecord*> out;
  for (const UttRecord& r : records) {
    if (r.speaker_id == speaker_id) out.push_back(&r);
  }
  return out;
}

Group CorpusManifest::speaker_group(const std::string& speaker_id) const {
  for (const UttRecord& r : records) {
    if (r.speaker_id == speaker_id) return group_from_string(r.group);
  }
  throw IoError("manifest: unknown speaker '" + speaker_id + "'");
}

CorpusManifest CorpusManifest::load(const std::string& dir) {
  namespace fs = std::filesystem;
  const js meta = parse_json_file((fs::path(dir) / "corpus_meta.json").string());
  CorpusManifest m;
  m.global_seed = meta.at("global_seed").get<uint64_t>();
  m.sample_rate = meta.at("sample_rate").get<int>();
  m.fps = meta.at("fps").get<int>();
  m.resolution = meta.at("resolution").get<int>();
  m.root_dir = dir;
  for (const js& r : read_jsonl((fs::path(dir) / "manifest.jsonl").string())) {
    UttRecord rec;
    rec.speaker_id = r.at("speaker_id").get<std::string>();
    rec.utt_id = r.at("utt_id").get<std::string>();
    rec.group = r.at("group").get<std::string>();
    rec.split = r.at("split").get<std::string>();
    rec.audio_path = r.at("audio_path").get<std::string>();
    rec.video_path = r.at("video_path").get<std::string>();
    rec.duration_s = r.at("duration_s").get<double>();
    m.records.push_back(std::move(rec));
  }
  if (m.records.empty()) throw IoError(dir + ": empty manifest");
  return m;
}

CorpusReader::CorpusReader(CorpusManifest manifest)
    : manifest_(std::move(manifest)) {}

Waveform CorpusReader::audio(const std::string& ref) const {
  const UttRecord& r = manifest_.find(ref);
  return read_wav(
      (std::filesystem::path(manifest_.root_dir) / r.audio_path).string());
}

VideoStream CorpusReader::video(const std::string& ref) const {
  const UttRecord& r = manifest_.find(ref);
  return read_video_file(
      (std::filesystem::path(manifest_.root_dir) / r.video_path).string());
}

}  // namespace avsep
