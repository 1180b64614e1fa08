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

#include "avsep/mixsim.h"

#include <algorithm>
#include <cmath>

#include "avsep/errors.h"
#include "avsep/jsonio.h"
#include "avsep/rng.h"

namespace avsep {

namespace {

double mean_square(const std::vector<float>& x, size_t n) {
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(x[i]) * static_cast<double>(x[i]);
  }
  return acc / static_cast<double>(n);
}

std::string speaker_of(const std::string& ref) {
  return ref.substr(0, ref.find('/'));
}

}  // namespace

const char* to_string(DatasetVariant v) {
  switch (v) {
    case DatasetVariant::dsav: return "dsav";
    case DatasetVariant::dssv: return "dssv";
    case DatasetVariant::ssav: return "ssav";
  }
  return "?";
}

const char* to_string(GroupPair g) {
  return g == GroupPair::diff ? "diff" : "same";
}

DatasetVariant dataset_variant_from_string(const std::string& s) {
  if (s == "dsav") return DatasetVariant::dsav;
  if (s == "dssv") return DatasetVariant::dssv;
  if (s == "ssav") return DatasetVariant::ssav;
  throw ConfigError("unknown dataset variant '" + s + "'");
}

GroupPair group_pair_from_string(const std::string& s) {
  if (s == "diff") return GroupPair::diff;
  if (s == "same") return GroupPair::same;
  throw ConfigError("unknown group pair '" + s + "'");
}

Waveform scale_for_sir(const Waveform& target, const Waveform& interferer,
                       double sir_db) {
  const size_t overlap = std::min(target.samples.size(), interferer.samples.size());
  if (overlap == 0) throw ZeroEnergyError("scale_for_sir: empty input");
  const double pt = mean_square(target.samples, overlap);
  const double pi = mean_square(interferer.samples, overlap);
  if (pt == 0.0 || pi == 0.0) {
    throw ZeroEnergyError("scale_for_sir: zero-energy source");
  }
  const double alpha = std::sqrt(pt / (pi * std::pow(10.0, sir_db / 10.0)));
  Waveform out;
  out.sample_rate = interferer.sample_rate;
  out.samples.resize(interferer.samples.size());
  for (size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = static_cast<float>(interferer.samples[i] * alpha);
  }
  return out;
}

MixtureExample mix_pair(const Utterance& target, const Utterance& interferer,
                        double sir_db, DatasetVariant variant,
                        const Utterance& visual_source) {
  const bool same_speaker = target.speaker_id == interferer.speaker_id;
  const bool same_utt =
      same_speaker && target.utt_id == interferer.utt_id;
  switch (variant) {
    case DatasetVariant::dsav:
      if (same_speaker) {
        throw VariantConstraintError("dsav: sources must be different speakers");
      }
      if (visual_source.speaker_id != target.speaker_id ||
          visual_source.utt_id != target.utt_id) {
        throw VariantConstraintError("dsav: visual must be the target utterance");
      }
      break;
    case DatasetVariant::dssv:
      if (same_speaker) {
        throw VariantConstraintError("dssv: sources must be different speakers");
      }
      if (visual_source.speaker_id != target.speaker_id) {
        throw VariantConstraintError("dssv: visual speaker must equal target");
      }
      if (visual_source.utt_id == target.utt_id) {
        throw VariantConstraintError("dssv: visual must not be time-aligned");
      }
      break;
    case DatasetVariant::ssav:
      if (!same_speaker) {
        throw VariantConstraintError("ssav: sources must share one speaker");
      }
      if (same_utt) {
        throw VariantConstraintError("ssav: sources must be distinct utterances");
      }
      if (visual_source.speaker_id != target.speaker_id ||
          visual_source.utt_id != target.utt_id) {
        throw VariantConstraintError("ssav: visual must be the target utterance");
      }
      break;
  }
  if (target.audio.sample_rate != interferer.audio.sample_rate) {
    throw ShapeError("mix_pair: sample-rate mismatch");
  }

  const size_t n =
      std::min(target.audio.samples.size(), interferer.audio.samples.size());
  Waveform tgt;
  tgt.sample_rate = target.audio.sample_rate;
  tgt.samples.assign(target.audio.samples.begin(),
                     target.audio.samples.begin() + static_cast<long>(n));
  Waveform itf;
  itf.sample_rate = interferer.audio.sample_rate;
  itf.samples.assign(interferer.audio.samples.begin(),
                     interferer.audio.samples.begin() + static_cast<long>(n));
  Waveform scaled = scale_for_sir(tgt, itf, sir_db);

  MixtureExample ex;
  ex.mixture.sample_rate = tgt.sample_rate;
  ex.mixture.samples.resize(n);
  float peak = 0.0f;
  for (size_t i = 0; i < n; ++i) {
    ex.mixture.samples[i] = tgt.samples[i] + scaled.samples[i];
    peak = std::max(peak, std::abs(ex.mixture.samples[i]));
  }
  // One shared factor keeps all scale-invariant relations intact.
  if (peak > kMixPeak) {
    const float f = static_cast<float>(kMixPeak) / peak;
    for (size_t i = 0; i < n; ++i) {
      ex.mixture.samples[i] *= f;
      tgt.samples[i] *= f;
    }
  }
  ex.target = std::move(tgt);
  ex.target_speaker_id = target.speaker_id;
  ex.interferer_speaker_id = interferer.speaker_id;
  ex.visual = visual_source.video;
  ex.visual_utt_id = visual_source.utt_id;
  ex.sir_db = sir_db;
  ex.variant = variant;
  ex.group_pair = same_speaker ? GroupPair::same : GroupPair::diff;
  return ex;
}

void Dataset::write(const std::string& path) const {
  std::vector<js> lines;
  lines.reserve(pairs.size() + 1);
  lines.push_back(js{{"variant", to_string(variant)},
                     {"split", split},
                     {"seed", seed},
                     {"pairs", pairs.size()}});
  for (const PairDescriptor& p : pairs) {
    lines.push_back(js{{"variant", to_string(p.variant)},
                       {"target_utt", p.target_utt},
                       {"interferer_utt", p.interferer_utt},
                       {"visual_utt", p.visual_utt},
                       {"sir_db", p.sir_db},
                       {"group_pair", to_string(p.group_pair)}});
  }
  write_jsonl(path, lines);
}

Dataset Dataset::read(const std::string& path) {
  const std::vector<js> lines = read_jsonl(path);
  if (lines.empty()) throw IoError(path + ": empty dataset descriptor");
  Dataset d;
  d.variant = dataset_variant_from_string(lines[0].at("variant").get<std::string>());
  d.split = lines[0].at("split").get<std::string>();
  d.seed = lines[0].at("seed").get<uint64_t>();
  for (size_t i = 1; i < lines.size(); ++i) {
    const js& r = lines[i];
    PairDescriptor p;
    p.variant = dataset_variant_from_string(r.at("variant").get<std::string>());
    p.target_utt = r.at("target_utt").get<std::string>();
    p.interferer_utt = r.at("interferer_utt").get<std::string>();
    p.visual_utt = r.at("visual_utt").get<std::string>();
    p.sir_db = r.at("sir_db").get<double>();
    p.group_pair = group_pair_from_string(r.at("group_pair").get<std::string>());
    d.pairs.push_back(std::move(p));
  }
  return d;
}

Dataset build_dataset(const CorpusManifest& manifest, DatasetVariant variant,
                      const std::string& split, uint64_t seed, int pairs) {
  if (pairs <= 0) throw ConfigError("build_dataset: pairs must be positive");
  const std::vector<std::string> speakers = manifest.split_speakers(split);
  if (speakers.size() < 2) {
    throw ConfigError("build_dataset: split '" + split + "' needs >= 2 speakers");
  }
  struct SpeakerUtts {
    Group group;
    std::vector<std::string> utts;
  };
  std::vector<SpeakerUtts> su(speakers.size());
  for (size_t i = 0; i < speakers.size(); ++i) {
    su[i].group = manifest.speaker_group(speakers[i]);
    for (const UttRecord* r : manifest.speaker_records(speakers[i])) {
      su[i].utts.push_back(CorpusManifest::ref_of(*r));
    }
    if (su[i].utts.size() < 2 && variant != DatasetVariant::dsav) {
      throw ConfigError("build_dataset: speaker " + speakers[i] +
                        " has < 2 utterances");
    }
  }

  Dataset d;
  d.variant = variant;
  d.split = split;
  d.seed = seed;
  d.pairs.resize(static_cast<size_t>(pairs));
  const uint64_t base =
      hash_bytes(seed, std::string(to_string(variant)) + "/" + split);
  // Each pair is a pure function of (manifest, seed, index).
#pragma omp parallel for schedule(static)
  for (int i = 0; i < pairs; ++i) {
    Rng rng(hash_combine(base, static_cast<uint64_t>(i)));
    PairDescriptor p;
    p.variant = variant;
    p.sir_db = rng.uniform(kSirLoDb, kSirHiDb);
    const int ts = rng.uniform_int(static_cast<int>(speakers.size()));
    const SpeakerUtts& t = su[static_cast<size_t>(ts)];
    const int tu = rng.uniform_int(static_cast<int>(t.utts.size()));
    p.target_utt = t.utts[static_cast<size_t>(tu)];
    if (variant == DatasetVariant::ssav) {
      int iu = rng.uniform_int(static_cast<int>(t.utts.size()) - 1);
      if (iu >= tu) ++iu;
      p.interferer_utt = t.utts[static_cast<size_t>(iu)];
      p.visual_utt = p.target_utt;
      p.group_pair = GroupPair::same;
    } else {
      int is = rng.uniform_int(static_cast<int>(speakers.size()) - 1);
      if (is >= ts) ++is;
      const SpeakerUtts& itf = su[static_cast<size_t>(is)];
      p.interferer_utt =
          itf.utts[static_cast<size_t>(rng.uniform_int(static_cast<int>(itf.utts.size())))];
      p.group_pair =
          t.group == itf.group ? GroupPair::same : GroupPair::diff;
      if (variant == DatasetVariant::dsav) {
        p.visual_utt = p.target_utt;
      } else {
        int vu = rng.uniform_int(static_cast<int>(t.utts.size()) - 1);
        if (vu >= tu) ++vu;
        p.visual_utt = t.utts[static_cast<size_t>(vu)];
      }
    }
    d.pairs[static_cast<size_t>(i)] = std::move(p);
  }
  return d;
}

Dataset reshuffle_epoch(const Dataset& dataset, uint64_t epoch_seed,
                        const CorpusManifest& manifest) {
  if (dataset.variant != DatasetVariant::dssv) {
    throw VariantConstraintError("reshuffle_epoch: dataset is not dssv");
  }
  Dataset out = dataset;
  const uint64_t base = hash_combine(mix64(epoch_seed), dataset.seed);
  for (size_t i = 0; i < out.pairs.size(); ++i) {
    PairDescriptor& p = out.pairs[i];
    const std::string spk = speaker_of(p.target_utt);
    std::vector<std::string> utts;
    for (const UttRecord* r : manifest.speaker_records(spk)) {
      const std::string ref = CorpusManifest::ref_of(*r);
      if (ref != p.target_utt) utts.push_back(ref);
    }
    if (utts.empty()) {
      throw ConfigError("reshuffle_epoch: speaker " + spk +
                        " has no alternate utterance");
    }
    Rng rng(hash_combine(base, static_cast<uint64_t>(i)));
    p.visual_utt = utts[static_cast<size_t>(rng.uniform_int(static_cast<int>(utts.size())))];
  }
  return out;
}

MixtureExample render_pair(const PairDescriptor& pair,
                           const CorpusReader& reader) {
  Utterance target, interferer, visual;
  const UttRecord& tr = reader.manifest().find(pair.target_utt);
  target.speaker_id = tr.speaker_id;
  target.utt_id = tr.utt_id;
  target.audio = reader.audio(pair.target_utt);
  const UttRecord& ir = reader.manifest().find(pair.interferer_utt);
  interferer.speaker_id = ir.speaker_id;
  interferer.utt_id = ir.utt_id;
  interferer.audio = reader.audio(pair.interferer_utt);
  const UttRecord& vr = reader.manifest().find(pair.visual_utt);
  visual.speaker_id = vr.speaker_id;
  visual.utt_id = vr.utt_id;
  visual.video = reader.video(pair.visual_utt);
  // mix_pair validates variant constraints; give the visual-only utterance a
  // placeholder audio so sample-rate checks stay meaningful.
  visual.audio.sample_rate = target.audio.sample_rate;
  MixtureExample ex =
      mix_pair(target, interferer, pair.sir_db, pair.variant, visual);
  ex.group_pair = pair.group_pair;
  return ex;
}

}  // namespace avsep
