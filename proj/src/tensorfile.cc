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

#include "avsep/tensorfile.h"

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

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

// f32 payloads are serialized as IEEE-754 bit patterns, little-endian.
void put_f32(std::string& s, float f) {
  uint32_t u;
  std::memcpy(&u, &f, 4);
  put_u32(s, u);
}

float get_f32(const unsigned char* p) {
  const uint32_t u = get_u32(p);
  float f;
  std::memcpy(&f, &u, 4);
  return f;
}

}  // namespace

void TensorContainer::put(const std::string& name, const Tensor& t) {
  TensorEntry e;
  e.dtype = TensorEntry::kF32;
  e.shape = t.shape;
  e.f32 = t.v;
  if (!entries_.count(name)) order_.push_back(name);
  entries_[name] = std::move(e);
}

void TensorContainer::put_i16(const std::string& name,
                              std::vector<int64_t> shape,
                              std::vector<int16_t> data) {
  if (Tensor::numel_of(shape) != static_cast<int64_t>(data.size())) {
    throw ShapeError("put_i16: payload size does not match shape");
  }
  TensorEntry e;
  e.dtype = TensorEntry::kI16;
  e.shape = std::move(shape);
  e.i16 = std::move(data);
  if (!entries_.count(name)) order_.push_back(name);
  entries_[name] = std::move(e);
}

const TensorEntry& TensorContainer::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw IoError("container: no entry '" + name + "'");
  return it->second;
}

Tensor TensorContainer::tensor(const std::string& name) const {
  const TensorEntry& e = entry(name);
  if (e.dtype != TensorEntry::kF32) {
    throw IoError("container: entry '" + name + "' is not float32");
  }
  Tensor t;
  t.shape = e.shape;
  t.v = e.f32;
  return t;
}

std::vector<std::string> TensorContainer::names() const { return order_; }

std::string TensorContainer::serialize() const {
  std::string buf;
  buf.append("AVT1");
  put_u32(buf, static_cast<uint32_t>(order_.size()));
  for (const std::string& name : order_) {
    const TensorEntry& e = entries_.at(name);
    put_u32(buf, static_cast<uint32_t>(name.size()));
    buf.append(name);
    put_u32(buf, static_cast<uint32_t>(e.shape.size()));
    for (int64_t d : e.shape) put_u32(buf, static_cast<uint32_t>(d));
    put_u32(buf, static_cast<uint32_t>(e.dtype));
    if (e.dtype == TensorEntry::kF32) {
      for (float f : e.f32) put_f32(buf, f);
    } else {
      for (int16_t q : e.i16) {
        buf.push_back(static_cast<char>(q & 0xff));
        buf.push_back(static_cast<char>((q >> 8) & 0xff));
      }
    }
  }
  return buf;
}

void TensorContainer::write(const std::string& path) const {
  const std::string buf = serialize();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

TensorContainer TensorContainer::parse(const unsigned char* p, size_t size,
                                       const std::string& what) {
  const std::string& path = what;
  if (size < 8 || std::memcmp(p, "AVT1", 4) != 0) {
    throw IoError(path + ": not an AVT1 container");
  }
  TensorContainer c;
  size_t off = 4;
  const uint32_t count = get_u32(p + off);
  off += 4;
  auto need = [&](size_t n) {
    if (off + n > size) throw IoError(path + ": truncated container");
  };
  for (uint32_t i = 0; i < count; ++i) {
    need(4);
    const uint32_t name_len = get_u32(p + off);
    off += 4;
    need(name_len);
    std::string name(reinterpret_cast<const char*>(p) + off, name_len);
    off += name_len;
    need(4);
    const uint32_t rank = get_u32(p + off);
    off += 4;
    if (rank > 8) throw IoError(path + ": implausible tensor rank");
    std::vector<int64_t> shape(rank);
    need(4 * static_cast<size_t>(rank));
    for (uint32_t r = 0; r < rank; ++r) {
      shape[r] = get_u32(p + off);
      off += 4;
    }
    need(4);
    const uint32_t dtype = get_u32(p + off);
    off += 4;
    const int64_t n = Tensor::numel_of(shape);
    if (dtype == TensorEntry::kF32) {
      need(4 * static_cast<size_t>(n));
      TensorEntry e;
      e.dtype = TensorEntry::kF32;
      e.shape = shape;
      e.f32.resize(static_cast<size_t>(n));
      for (int64_t j = 0; j < n; ++j) {
        e.f32[static_cast<size_t>(j)] = get_f32(p + off);
        off += 4;
      }
      if (!c.entries_.count(name)) c.order_.push_back(name);
      c.entries_[name] = std::move(e);
    } else if (dtype == TensorEntry::kI16) {
      need(2 * static_cast<size_t>(n));
      TensorEntry e;
      e.dtype = TensorEntry::kI16;
      e.shape = shape;
      e.i16.resize(static_cast<size_t>(n));
      for (int64_t j = 0; j < n; ++j) {
        e.i16[static_cast<size_t>(j)] =
            static_cast<int16_t>(p[off] | (p[off + 1] << 8));
        off += 2;
      }
      if (!c.entries_.count(name)) c.order_.push_back(name);
      c.entries_[name] = std::move(e);
    } else {
      throw IoError(path + ": unknown dtype code " + std::to_string(dtype));
    }
  }
  return c;
}

TensorContainer TensorContainer::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return parse(reinterpret_cast<const unsigned char*>(s.data()), s.size(),
               path);
}

}  // namespace avsep
