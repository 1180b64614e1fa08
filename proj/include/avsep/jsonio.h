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

#ifndef AVSEP_JSONIO_H_
#define AVSEP_JSONIO_H_

#include <string>
#include <vector>

#include <json.hpp>

#include "avsep/errors.h"

namespace avsep {

// ordered_json keeps key order stable, which keeps emitted files
// byte-deterministic.
using js = nlohmann::ordered_json;

js parse_json_file(const std::string& path);
void write_json_file(const std::string& path, const js& j, int indent = 2);

std::vector<js> read_jsonl(const std::string& path);
void write_jsonl(const std::string& path, const std::vector<js>& records);

// Rejects keys not in `allowed`; config files must not silently carry typos.
void expect_keys(const js& obj, const std::vector<std::string>& allowed,
                 const std::string& where);

// FNV-1a over bytes, rendered as 16 hex chars. Used for config digests and
// determinism checks in tests.
std::string fnv1a_hex(const void* data, size_t n);
std::string file_digest(const std::string& path);

}  // namespace avsep

#endif  // AVSEP_JSONIO_H_
