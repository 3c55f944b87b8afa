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

#include "upcall/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>

#include "upcall/error.hpp"

namespace upcall {
namespace {

std::uint32_t read_u32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t read_u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(
      static_cast<unsigned char>(b[at]) |
      static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::vector<char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<char>& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_tag(std::vector<char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kPositive: return "positive";
    case Label::kNegative: return "negative";
    case Label::kUnknown: break;
  }
  return "unknown";
}

Label parse_label(std::string_view text) {
  if (text == "positive") return Label::kPositive;
  if (text == "negative") return Label::kNegative;
  if (text == "unknown" || text.empty()) return Label::kUnknown;
  fail(ErrorCode::kInvalidArgument, "unknown label '" + std::string(text) + "'");
}

void validate(const AudioClip& clip) {
  if (clip.sample_rate_hz <= 0) {
    fail(ErrorCode::kInvalidArgument, "sample rate must be positive");
  }
  for (double s : clip.samples) {
    if (!(s >= -1.0 && s <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "sample outside [-1, 1]");
    }
  }
}

AudioClip parse_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" ||
      bytes.substr(8, 4) != "WAVE") {
    fail(ErrorCode::kNotWav, "missing RIFF/WAVE magic");
  }

  AudioClip clip;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::string_view id = bytes.substr(pos, 4);
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;

    if (id == "fmt ") {
      if (size < 16 || body + 16 > bytes.size()) {
        fail(ErrorCode::kTruncated, "fmt chunk truncated");
      }
      const std::uint16_t format = read_u16(bytes, body);
      const std::uint16_t channels = read_u16(bytes, body + 2);
      const std::uint32_t rate = read_u32(bytes, body + 4);
      const std::uint16_t bits = read_u16(bytes, body + 14);
      if (format != 1 || bits != 16) {
        fail(ErrorCode::kUnsupportedEncoding, "only PCM16 is supported");
      }
      if (channels != 1) {
        fail(ErrorCode::kUnsupportedEncoding, "only mono is supported");
      }
      if (rate == 0 || rate > 0x7fffffffU) {
        fail(ErrorCode::kUnsupportedEncoding, "invalid sample rate");
      }
      clip.sample_rate_hz = static_cast<int>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) fail(ErrorCode::kNotWav, "data chunk before fmt chunk");
      if (body + size > bytes.size()) {
        fail(ErrorCode::kTruncated, "data chunk shorter than declared");
      }
      const std::size_t n = size / 2;
      clip.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
        clip.samples[i] = raw / 32768.0;
      }
      return clip;
    }
    // Chunks are word aligned.
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) fail(ErrorCode::kNotWav, "no fmt chunk");
  fail(ErrorCode::kTruncated, "no data chunk");
}

AudioClip read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIoFailure, "read error on " + path.string());
  return parse_wav(bytes);
}

std::vector<char> encode_wav(const AudioClip& clip) {
  validate(clip);
  const auto data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(clip.sample_rate_hz);

  std::vector<char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);         // PCM
  put_u16(out, 1);         // mono
  put_u32(out, rate);
  put_u32(out, rate * 2);  // byte rate
  put_u16(out, 2);         // block align
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : clip.samples) {
    const double q = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  const std::vector<char> bytes = encode_wav(clip);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIoFailure, "write error on " + path.string());
}

}  // namespace upcall
