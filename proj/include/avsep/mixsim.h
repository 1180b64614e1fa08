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

#ifndef AVSEP_MIXSIM_H_
#define AVSEP_MIXSIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "avsep/corpus.h"

namespace avsep {

// The three simulated conditions: different-speaker aligned-visual,
// different-speaker shuffled-visual, same-speaker aligned-visual.
enum class DatasetVariant { dsav, dssv, ssav };
enum class GroupPair { diff, same };

const char* to_string(DatasetVariant v);
const char* to_string(GroupPair g);
DatasetVariant dataset_variant_from_string(const std::string& s);
GroupPair group_pair_from_string(const std::string& s);

constexpr double kSirLoDb = -5.0;
constexpr double kSirHiDb = 10.0;
constexpr double kMixPeak = 0.9;

struct MixtureExample {
  Waveform mixture;
  Waveform target;
  std::string target_speaker_id, interferer_speaker_id;
  VideoStream visual;
  std::string visual_utt_id;
  double sir_db = 0.0;
  DatasetVariant variant = DatasetVariant::dsav;
  GroupPair group_pair = GroupPair::diff;
};

struct PairDescriptor {
  std::string target_utt, interferer_utt, visual_utt;  // "spk000/utt01" refs
  double sir_db = 0.0;
  DatasetVariant variant = DatasetVariant::dsav;
  GroupPair group_pair = GroupPair::diff;
};

struct Dataset {
  DatasetVariant variant = DatasetVariant::dsav;
  std::string split;
  uint64_t seed = 0;
  std::vector<PairDescriptor> pairs;

  void write(const std::string& path) const;
  static Dataset read(const std::string& path);
};

// Returns the interferer scaled so that 10*log10(P_t / P_i') == sir_db over
// the overlapped (shorter) length.
Waveform scale_for_sir(const Waveform& target, const Waveform& interferer,
                       double sir_db);

// Validates the variant constraints, truncates to the overlap, mixes at the
// requested SIR and applies the joint peak rescale. group_pair is filled by
// speaker equality; for cross-speaker variants the caller owns the
// pitch-group comparison (build_dataset records it in the descriptor).
MixtureExample mix_pair(const Utterance& target, const Utterance& interferer,
                        double sir_db, DatasetVariant variant,
                        const Utterance& visual_source);

Dataset build_dataset(const CorpusManifest& manifest, DatasetVariant variant,
                      const std::string& split, uint64_t seed, int pairs);

// dssv only: resample each pair's visual reference (a different utterance of
// the target speaker). Audio assignments are untouched.
Dataset reshuffle_epoch(const Dataset& dataset, uint64_t epoch_seed,
                        const CorpusManifest& manifest);

// Loads sources and materializes the mixture for one descriptor.
MixtureExample render_pair(const PairDescriptor& pair,
                           const CorpusReader& reader);

}  // namespace avsep

#endif  // AVSEP_MIXSIM_H_
