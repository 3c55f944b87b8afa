// Copyright 2026 The Upcall Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

namespace upcall {

enum class Label { kUnknown, kPositive, kNegative };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);

// Mono clip with amplitudes in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 2000;
  Label label = Label::kUnknown;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws kInvalidArgument when the clip violates its invariants.
void validate(const AudioClip& clip);

// PCM16 mono RIFF/WAVE only. Samples are scaled by 1/32768.
// Errors: kIoFailure, kNotWav, kUnsupportedEncoding, kTruncated.
AudioClip read_wav(const std::filesystem::path& path);
AudioClip parse_wav(std::string_view bytes);

// Quantizes with round(x * 32768), clamped to the int16 range, so 1.0 stores
// as 32767 and every sample round-trips within one quantum.
void write_wav(const AudioClip& clip, const std::filesystem::path& path);
std::vector<char> encode_wav(const AudioClip& clip);

}  // namespace upcall
