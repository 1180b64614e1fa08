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

#ifndef AVSEP_EMBED_H_
#define AVSEP_EMBED_H_

#include <string>
#include <vector>

#include "avsep/corpus.h"
#include "avsep/tensor.h"

namespace avsep {

struct EmbedRecord {
  std::string speaker_id;
  std::string group;
  std::string utt_id;
  int frame_index = 0;  // -1 marks an utterance-mean record
};

// Fused/joint embeddings V for sampled test speakers: one row per frame plus
// one utterance-mean row per utterance.
struct EmbeddingDump {
  std::string tag;  // "V"
  std::string model_digest;
  int64_t dim = 0;
  std::vector<EmbedRecord> frames;  // metadata for rows of `features`
  Tensor features;                  // [n_frames, dim]
  std::vector<EmbedRecord> utts;    // metadata for rows of `utt_features`
  Tensor utt_features;              // [n_utts, dim]

  // Single file: "AVE1" | u32 header_len | JSON index | tensor container.
  void write(const std::string& path) const;
  static EmbeddingDump read(const std::string& path);
};

// Exports V for n_speakers distinct test speakers (all frames of all their
// utterances). Only the fused (davse) and joint (baseline) variants carry a
// V embedding.
EmbeddingDump export_embeddings(const std::string& ckpt_path,
                                const CorpusReader& reader, int n_speakers,
                                uint64_t seed);

struct Point2 {
  double x = 0.0, y = 0.0;
};

// Projection onto the top-2 principal directions of the mean-centered rows.
// Sign convention: each component's largest-magnitude loading is positive.
std::vector<Point2> project_2d(const Tensor& features);

// Per-axis (x - min) / (max - min); a zero-range axis maps to 0.
std::vector<Point2> minmax_norm(const std::vector<Point2>& points);

// Mean silhouette coefficient with Euclidean distance.
double silhouette(const std::vector<Point2>& points,
                  const std::vector<int>& labels);

// CSV (speaker_id, group, x, y) and a self-contained SVG scatter. Expects
// normalized points; one label record per point.
void emit_plot(const std::vector<Point2>& points,
               const std::vector<EmbedRecord>& records,
               const std::string& csv_path, const std::string& svg_path);

}  // namespace avsep

#endif  // AVSEP_EMBED_H_
