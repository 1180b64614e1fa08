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

#include "avsep/embed.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "avsep/errors.h"
#include "avsep/jsonio.h"
#include "avsep/model.h"
#include "avsep/tensorfile.h"
#include "avsep/train.h"

namespace avsep {

namespace {

constexpr char kDumpMagic[4] = {'A', 'V', 'E', '1'};

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

js records_json(const std::vector<EmbedRecord>& recs) {
  js a = js::array();
  for (const EmbedRecord& r : recs) {
    js e;
    e["speaker_id"] = r.speaker_id;
    e["group"] = r.group;
    e["utt_id"] = r.utt_id;
    e["frame_index"] = r.frame_index;
    a.push_back(std::move(e));
  }
  return a;
}

std::vector<EmbedRecord> records_from_json(const js& a) {
  std::vector<EmbedRecord> recs;
  for (const js& e : a) {
    EmbedRecord r;
    r.speaker_id = e.value("speaker_id", std::string());
    r.group = e.value("group", std::string());
    r.utt_id = e.value("utt_id", std::string());
    r.frame_index = e.value("frame_index", 0);
    recs.push_back(std::move(r));
  }
  return recs;
}

// Cyclic Jacobi sweeps on a symmetric matrix; returns eigenvalues on the
// diagonal and accumulates rotations into `vecs` (column eigenvectors).
void jacobi_eigen(std::vector<double>& a, std::vector<double>& vecs,
                  int64_t d) {
  vecs.assign(size_t(d * d), 0.0);
  for (int64_t i = 0; i < d; ++i) vecs[size_t(i * d + i)] = 1.0;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int64_t p = 0; p < d; ++p) {
      for (int64_t q = p + 1; q < d; ++q) {
        off += a[size_t(p * d + q)] * a[size_t(p * d + q)];
      }
    }
    if (off < 1e-24) break;
    for (int64_t p = 0; p < d; ++p) {
      for (int64_t q = p + 1; q < d; ++q) {
        const double apq = a[size_t(p * d + q)];
        if (std::abs(apq) < 1e-300) continue;
        const double app = a[size_t(p * d + p)];
        const double aqq = a[size_t(q * d + q)];
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int64_t k = 0; k < d; ++k) {
          const double akp = a[size_t(k * d + p)];
          const double akq = a[size_t(k * d + q)];
          a[size_t(k * d + p)] = c * akp - s * akq;
          a[size_t(k * d + q)] = s * akp + c * akq;
        }
        for (int64_t k = 0; k < d; ++k) {
          const double apk = a[size_t(p * d + k)];
          const double aqk = a[size_t(q * d + k)];
          a[size_t(p * d + k)] = c * apk - s * aqk;
          a[size_t(q * d + k)] = s * apk + c * aqk;
        }
        for (int64_t k = 0; k < d; ++k) {
          const double vkp = vecs[size_t(k * d + p)];
          const double vkq = vecs[size_t(k * d + q)];
          vecs[size_t(k * d + p)] = c * vkp - s * vkq;
          vecs[size_t(k * d + q)] = s * vkp + c * vkq;
        }
      }
    }
  }
}

const char* kPalette[12] = {"#4363d8", "#e6194b", "#3cb44b", "#f58231",
                            "#911eb4", "#46f0f0", "#f032e6", "#bcf60c",
                            "#fabebe", "#008080", "#9a6324", "#800000"};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void EmbeddingDump::write(const std::string& path) const {
  js header;
  header["tag"] = tag;
  header["model_digest"] = model_digest;
  header["dim"] = dim;
  header["frames"] = records_json(frames);
  header["utts"] = records_json(utts);
  TensorContainer c;
  c.put("features", features);
  c.put("utt_features", utt_features);
  const std::string hs = header.dump();
  std::string buf(kDumpMagic, 4);
  put_u32l(buf, static_cast<uint32_t>(hs.size()));
  buf += hs;
  buf += c.serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

EmbeddingDump EmbeddingDump::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(s.data());
  if (s.size() < 8 || std::memcmp(p, kDumpMagic, 4) != 0) {
    throw IoError(path + ": not an embedding dump");
  }
  const uint32_t hlen = get_u32l(p + 4);
  if (8 + size_t(hlen) > s.size()) throw IoError(path + ": truncated dump");
  const js header = js::parse(s.substr(8, hlen), nullptr, false);
  if (header.is_discarded()) throw IoError(path + ": malformed dump header");
  TensorContainer c =
      TensorContainer::parse(p + 8 + hlen, s.size() - 8 - hlen, path);
  EmbeddingDump d;
  d.tag = header.value("tag", std::string());
  d.model_digest = header.value("model_digest", std::string());
  d.dim = header.value("dim", int64_t{0});
  d.frames = records_from_json(header.at("frames"));
  d.utts = records_from_json(header.at("utts"));
  d.features = c.tensor("features");
  d.utt_features = c.tensor("utt_features");
  return d;
}

EmbeddingDump export_embeddings(const std::string& ckpt_path,
                                const CorpusReader& reader, int n_speakers,
                                uint64_t seed) {
  SeparationModel model = SeparationModel::load(ckpt_path);
  const Variant variant = model.config().variant;
  if (variant != Variant::davse && variant != Variant::baseline) {
    throw VariantConstraintError(
        "embedding export needs a fused or joint V embedding "
        "(davse or baseline variant)");
  }
  const CorpusManifest& man = reader.manifest();
  if (model.config().sample_rate != man.sample_rate ||
      model.config().fps != man.fps ||
      model.config().resolution != man.resolution) {
    throw ConfigError("checkpoint " + ckpt_path +
                      " is incompatible with the corpus");
  }
  std::vector<std::string> speakers = man.split_speakers("test");
  if (n_speakers < 0 ||
      n_speakers > static_cast<int>(speakers.size())) {
    throw ConfigError("n_speakers must be within the test split size (" +
                      std::to_string(speakers.size()) + ")");
  }
  Rng rng(hash_bytes(seed, "embed-speakers"));
  for (size_t i = speakers.size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(static_cast<int>(i)));
    std::swap(speakers[i - 1], speakers[j]);
  }
  speakers.resize(size_t(n_speakers));

  EmbeddingDump dump;
  dump.tag = "V";
  dump.model_digest = file_digest(ckpt_path);
  dump.dim = variant == Variant::baseline ? model.config().joint_dim()
                                          : model.config().visual_dim;
  std::vector<float> feat_rows, utt_rows;
  for (const std::string& spk : speakers) {
    const std::string group = to_string(man.speaker_group(spk));
    for (const UttRecord* rec : man.speaker_records(spk)) {
      const std::string ref = CorpusManifest::ref_of(*rec);
      const VideoStream vis =
          prepare_visual(model.config(), reader.video(ref));
      EmbeddingSequence v;
      if (variant == Variant::baseline) {
        v = model.visual_frontend(vis, Branch::joint);
      } else {
        EmbeddingSequence vi = model.visual_frontend(vis, Branch::identity);
        vi.tag = "V_I";
        EmbeddingSequence vs = model.visual_frontend(vis, Branch::sync);
        vs.tag = "V_S";
        v = model.fuse(vi, vs);
      }
      const int64_t n = v.channels();
      const int64_t l = v.frames();
      std::vector<double> mean(size_t(n), 0.0);
      for (int64_t f = 0; f < l; ++f) {
        for (int64_t k = 0; k < n; ++k) {
          const float x = v.feat.data()[k * l + f];
          feat_rows.push_back(x);
          mean[size_t(k)] += x;
        }
        dump.frames.push_back(
            EmbedRecord{spk, group, rec->utt_id, static_cast<int>(f)});
      }
      for (int64_t k = 0; k < n; ++k) {
        utt_rows.push_back(static_cast<float>(mean[size_t(k)] / double(l)));
      }
      dump.utts.push_back(EmbedRecord{spk, group, rec->utt_id, -1});
    }
  }
  dump.features = Tensor({static_cast<int64_t>(dump.frames.size()), dump.dim});
  dump.features.v = std::move(feat_rows);
  dump.utt_features =
      Tensor({static_cast<int64_t>(dump.utts.size()), dump.dim});
  dump.utt_features.v = std::move(utt_rows);
  return dump;
}

std::vector<Point2> project_2d(const Tensor& features) {
  if (features.rank() != 2) {
    throw ShapeError("project_2d expects [records, dim]");
  }
  const int64_t n = features.dim(0);
  const int64_t d = features.dim(1);
  if (n < 2) throw ConfigError("project_2d needs at least 2 records");
  std::vector<double> mean(size_t(d), 0.0);
  const float* x = features.data();
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t k = 0; k < d; ++k) mean[size_t(k)] += x[i * d + k];
  }
  for (double& m : mean) m /= double(n);
  std::vector<double> cov(size_t(d * d), 0.0);
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t a = 0; a < d; ++a) {
      const double xa = x[i * d + a] - mean[size_t(a)];
      for (int64_t b = a; b < d; ++b) {
        cov[size_t(a * d + b)] += xa * (x[i * d + b] - mean[size_t(b)]);
      }
    }
  }
  double trace = 0.0;
  for (int64_t a = 0; a < d; ++a) {
    for (int64_t b = 0; b < a; ++b) {
      cov[size_t(a * d + b)] = cov[size_t(b * d + a)];
    }
    trace += cov[size_t(a * d + a)];
  }
  if (!(trace > 0.0)) {
    throw DegenerateVariance("all embedding vectors are identical");
  }
  std::vector<double> vecs;
  jacobi_eigen(cov, vecs, d);
  int64_t top1 = 0, top2 = -1;
  for (int64_t k = 1; k < d; ++k) {
    if (cov[size_t(k * d + k)] > cov[size_t(top1 * d + top1)]) top1 = k;
  }
  for (int64_t k = 0; k < d; ++k) {
    if (k == top1) continue;
    if (top2 < 0 || cov[size_t(k * d + k)] > cov[size_t(top2 * d + top2)]) {
      top2 = k;
    }
  }
  if (d == 1) top2 = top1;  // degenerate width; y collapses to x
  auto component = [&](int64_t col) {
    std::vector<double> v(static_cast<size_t>(d));
    double big = 0.0;
    int64_t arg = 0;
    for (int64_t k = 0; k < d; ++k) {
      v[size_t(k)] = vecs[size_t(k * d + col)];
      if (std::abs(v[size_t(k)]) > big) {
        big = std::abs(v[size_t(k)]);
        arg = k;
      }
    }
    if (v[size_t(arg)] < 0) {
      for (double& e : v) e = -e;
    }
    return v;
  };
  const std::vector<double> v1 = component(top1);
  const std::vector<double> v2 = component(top2);
  std::vector<Point2> pts(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double px = 0.0, py = 0.0;
    for (int64_t k = 0; k < d; ++k) {
      const double xc = x[i * d + k] - mean[size_t(k)];
      px += xc * v1[size_t(k)];
      py += xc * v2[size_t(k)];
    }
    pts[size_t(i)] = Point2{px, py};
  }
  return pts;
}

std::vector<Point2> minmax_norm(const std::vector<Point2>& points) {
  if (points.empty()) throw ConfigError("minmax_norm needs at least 1 point");
  double xmin = points[0].x, xmax = points[0].x;
  double ymin = points[0].y, ymax = points[0].y;
  for (const Point2& p : points) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  const double xr = xmax - xmin, yr = ymax - ymin;
  std::vector<Point2> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    out[i].x = xr > 0 ? (points[i].x - xmin) / xr : 0.0;
    out[i].y = yr > 0 ? (points[i].y - ymin) / yr : 0.0;
  }
  return out;
}

double silhouette(const std::vector<Point2>& points,
                  const std::vector<int>& labels) {
  if (points.size() != labels.size()) {
    throw ShapeError("silhouette: points and labels differ in length");
  }
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) {
    throw SingleClusterError("silhouette needs at least 2 clusters");
  }
  const size_t n = points.size();
  auto dist = [&](size_t i, size_t j) {
    const double dx = points[i].x - points[j].x;
    const double dy = points[i].y - points[j].y;
    return std::sqrt(dx * dx + dy * dy);
  };
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double a_sum = 0.0;
    int64_t a_n = 0;
    // mean distance to each other cluster, keyed by label
    std::vector<std::pair<int, std::pair<double, int64_t>>> others;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (labels[j] == labels[i]) {
        a_sum += dist(i, j);
        ++a_n;
      } else {
        bool found = false;
        for (auto& o : others) {
          if (o.first == labels[j]) {
            o.second.first += dist(i, j);
            ++o.second.second;
            found = true;
            break;
          }
        }
        if (!found) others.push_back({labels[j], {dist(i, j), 1}});
      }
    }
    if (a_n == 0) continue;  // singleton cluster contributes 0 by convention
    const double a = a_sum / double(a_n);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& o : others) {
      b = std::min(b, o.second.first / double(o.second.second));
    }
    const double denom = std::max(a, b);
    sum += denom > 0 ? (b - a) / denom : 0.0;
  }
  return sum / double(n);
}

void emit_plot(const std::vector<Point2>& points,
               const std::vector<EmbedRecord>& records,
               const std::string& csv_path, const std::string& svg_path) {
  if (points.size() != records.size()) {
    throw ShapeError("emit_plot: points and records differ in length");
  }
  std::string csv = "speaker_id,group,x,y\n";
  for (size_t i = 0; i < points.size(); ++i) {
    csv += records[i].speaker_id + "," + records[i].group + "," +
           fmt6(points[i].x) + "," + fmt6(points[i].y) + "\n";
  }
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + csv_path);
    out << csv;
    if (!out) throw IoError("write failed: " + csv_path);
  }

  // Speaker color by first appearance; marker shape by pitch group.
  std::vector<std::string> speaker_order;
  auto color_of = [&](const std::string& spk) {
    for (size_t k = 0; k < speaker_order.size(); ++k) {
      if (speaker_order[k] == spk) return kPalette[k % 12];
    }
    speaker_order.push_back(spk);
    return kPalette[(speaker_order.size() - 1) % 12];
  };
  const double pad = 40.0, span = 560.0;
  std::string svg =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" "
      "height=\"640\" viewBox=\"0 0 760 640\">\n"
      "<rect width=\"760\" height=\"640\" fill=\"white\"/>\n"
      "<rect x=\"40\" y=\"40\" width=\"560\" height=\"560\" fill=\"none\" "
      "stroke=\"#cccccc\"/>\n"
      "<text x=\"40\" y=\"28\" font-family=\"monospace\" font-size=\"13\">"
      "visual embeddings, 2-D projection (circle: low group, square: high)"
      "</text>\n";
  for (size_t i = 0; i < points.size(); ++i) {
    const double cx = pad + points[i].x * span;
    const double cy = pad + (1.0 - points[i].y) * span;
    const std::string col = color_of(records[i].speaker_id);
    if (records[i].group == "high") {
      svg += "<rect x=\"" + fmt6(cx - 3.0) + "\" y=\"" + fmt6(cy - 3.0) +
             "\" width=\"6\" height=\"6\" fill=\"" + col + "\"/>\n";
    } else {
      svg += "<circle cx=\"" + fmt6(cx) + "\" cy=\"" + fmt6(cy) +
             "\" r=\"3.2\" fill=\"" + col + "\"/>\n";
    }
  }
  for (size_t k = 0; k < speaker_order.size(); ++k) {
    const double ly = 56.0 + 18.0 * double(k);
    svg += "<circle cx=\"620\" cy=\"" + fmt6(ly - 4.0) +
           "\" r=\"4\" fill=\"" + std::string(kPalette[k % 12]) + "\"/>\n";
    svg += "<text x=\"632\" y=\"" + fmt6(ly) +
           "\" font-family=\"monospace\" font-size=\"12\">" +
           speaker_order[k] + "</text>\n";
  }
  svg += "</svg>\n";
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + svg_path);
  out << svg;
  if (!out) throw IoError("write failed: " + svg_path);
}

}  // namespace avsep
