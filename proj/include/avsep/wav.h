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

#ifndef AVSEP_WAV_H_
#define AVSEP_WAV_H_

#include <cstdint>
#include <string>
#include <vector>

namespace avsep {

struct Waveform {
  std::vector<float> samples;  // nominal range [-1, 1]
  int sample_rate = 0;

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// Mono 16-bit PCM only. Anything else in the header is an IoError.
Waveform read_wav(const std::string& path);
void write_wav(const std::string& path, const Waveform& w);

int16_t quantize_i16(float x);
inline float dequantize_i16(int16_t q) {
  return static_cast<float>(q) / 32767.0f;
}

}  // namespace avsep

#endif  // AVSEP_WAV_H_
