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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>

#include "avsep/errors.h"
#include "avsep/tensorfile.h"
#include "testutil.h"

using namespace avsep;
namespace tu = avsep::testutil;

TEST_CASE("container round-trips float tensors bitwise") {
  tu::TempDir dir("container");
  Rng rng(7);
  TensorContainer c;
  const Tensor a = tu::random_tensor({3, 5}, rng, -10.0, 10.0);
  const Tensor b = tu::random_tensor({2, 4, 6}, rng, -1e6, 1e6);
  Tensor scalarish({1});
  scalarish.v[0] = -0.0f;
  c.put("enc.w", a);
  c.put("dec.w", b);
  c.put("odd", scalarish);

  const std::string path = dir.file("t.avt");
  c.write(path);
  const TensorContainer r = TensorContainer::read(path);

  REQUIRE(r.names() == std::vector<std::string>{"enc.w", "dec.w", "odd"});
  const Tensor ra = r.tensor("enc.w");
  CHECK(ra.shape == a.shape);
  CHECK(std::memcmp(ra.data(), a.data(), sizeof(float) * a.v.size()) == 0);
  const Tensor rb = r.tensor("dec.w");
  CHECK(std::memcmp(rb.data(), b.data(), sizeof(float) * b.v.size()) == 0);
  // -0.0 must survive bitwise, not compare-equal survive.
  const Tensor ro = r.tensor("odd");
  CHECK(std::signbit(ro.v[0]));
}

TEST_CASE("container round-trips int16 payloads") {
  tu::TempDir dir("container");
  TensorContainer c;
  std::vector<int16_t> q{-32768, -1, 0, 1, 32767, 12345};
  c.put_i16("video", {2, 3}, q);
  const std::string path = dir.file("q.avt");
  c.write(path);
  const TensorContainer r = TensorContainer::read(path);
  const TensorEntry& e = r.entry("video");
  CHECK(e.dtype == TensorEntry::kI16);
  CHECK(e.shape == std::vector<int64_t>{2, 3});
  CHECK(e.i16 == q);
}

TEST_CASE("serialize and parse match the file forms") {
  tu::TempDir dir("container");
  Rng rng(9);
  TensorContainer c;
  c.put("x", tu::random_tensor({17}, rng));
  c.put_i16("y", {4}, {1, -2, 3, -4});
  const std::string blob = c.serialize();
  CHECK(blob.substr(0, 4) == "AVT1");

  const std::string path = dir.file("s.avt");
  c.write(path);
  CHECK(tu::slurp(path) == blob);

  const TensorContainer r = TensorContainer::parse(
      reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), "blob");
  CHECK(r.names() == c.names());
  CHECK(r.tensor("x").v == c.tensor("x").v);
}

TEST_CASE("rewriting an unchanged container is byte-identical") {
  tu::TempDir dir("container");
  Rng rng(11);
  TensorContainer c;
  c.put("a", tu::random_tensor({64, 3}, rng));
  c.write(dir.file("one.avt"));
  c.write(dir.file("two.avt"));
  CHECK(tu::slurp(dir.file("one.avt")) == tu::slurp(dir.file("two.avt")));
}

TEST_CASE("malformed containers are rejected") {
  tu::TempDir dir("container");
  TensorContainer c;
  Tensor t({2});
  t.v = {1.0f, 2.0f};
  c.put("t", t);
  const std::string good = c.serialize();

  SUBCASE("bad magic") {
    std::string bad = good;
    bad[0] = 'X';
    tu::spit(dir.file("bad.avt"), bad);
    CHECK_THROWS_AS(TensorContainer::read(dir.file("bad.avt")), IoError);
  }
  SUBCASE("truncated payload") {
    tu::spit(dir.file("trunc.avt"), good.substr(0, good.size() - 3));
    CHECK_THROWS_AS(TensorContainer::read(dir.file("trunc.avt")), IoError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(TensorContainer::read(dir.file("absent.avt")), IoError);
  }
  SUBCASE("unknown entry name") {
    CHECK_THROWS_AS(c.entry("nope"), IoError);
  }
}
