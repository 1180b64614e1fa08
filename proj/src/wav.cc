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

#include "avsep/wav.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "avsep/errors.h"

namespace avsep {

namespace {

void put_u32(std::string& s, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff),
               static_cast<char>((v >> 24) & 0xff)};
  s.append(b, 4);
}

void put_u16(std::string& s, uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  s.append(b, 2);
}

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t get_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

int16_t quantize_i16(float x) {
  float y = std::nearbyint(x * 32767.0f);
  if (y > 32767.0f) y = 32767.0f;
  if (y < -32768.0f) y = -32768.0f;
  return static_cast<int16_t>(y);
}

void write_wav(const std::string& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw IoError("write_wav: bad sample rate");
  const uint32_t n = static_cast<uint32_t>(w.samples.size());
  const uint32_t data_bytes = n * 2;
  std::string buf;
  buf.reserve(44 + data_bytes);
  buf.append("RIFF");
  put_u32(buf, 36 + data_bytes);
  buf.append("WAVE");
  buf.append("fmt ");
  put_u32(buf, 16);
  put_u16(buf, 1);  // PCM
  put_u16(buf, 1);  // mono
  put_u32(buf, static_cast<uint32_t>(w.sample_rate));
  put_u32(buf, static_cast<uint32_t>(w.sample_rate) * 2);
  put_u16(buf, 2);   // block align
  put_u16(buf, 16);  // bits per sample
  buf.append("data");
  put_u32(buf, data_bytes);
  for (float x : w.samples) {
    const int16_t q = quantize_i16(x);
    buf.push_back(static_cast<char>(q & 0xff));
    buf.push_back(static_cast<char>((q >> 8) & 0xff));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  const unsigned char* p = reinterpret_cast<const unsigned char*>(s.data());
  if (s.size() < 44 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw IoError(path + ": not a RIFF/WAVE file");
  }
  Waveform w;
  size_t off = 12;
  bool have_fmt = false, have_data = false;
  while (off + 8 <= s.size()) {
    const char* tag = s.data() + off;
    const uint32_t sz = get_u32(p + off + 4);
    const size_t body = off + 8;
    if (body + sz > s.size()) throw IoError(path + ": truncated chunk");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      if (sz < 16) throw IoError(path + ": short fmt chunk");
      const uint16_t fmt = get_u16(p + body);
      const uint16_t ch = get_u16(p + body + 2);
      const uint32_t rate = get_u32(p + body + 4);
      const uint16_t bits = get_u16(p + body + 14);
      if (fmt != 1 || ch != 1 || bits != 16) {
        throw IoError(path + ": only mono 16-bit PCM is supported");
      }
      w.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      if (!have_fmt) throw IoError(path + ": data chunk before fmt");
      const size_t n = sz / 2;
      w.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const int16_t q = static_cast<int16_t>(get_u16(p + body + 2 * i));
        w.samples[i] = dequantize_i16(q);
      }
      have_data = true;
    }
    off = body + sz + (sz & 1);
  }
  if (!have_data) throw IoError(path + ": missing data chunk");
  return w;
}

}  // namespace avsep
