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

#include "upcall/inspect.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "upcall/error.hpp"

namespace upcall {

Stage parse_stage(std::string_view name) {
  if (name == "raw") return Stage::kRaw;
  if (name == "thresholded") return Stage::kThresholded;
  if (name == "cleaned") return Stage::kCleaned;
  if (name == "traced") return Stage::kTraced;
  fail(ErrorCode::kInvalidArgument, "unknown stage '" + std::string(name) + "'");
}

DumpFormat parse_dump_format(std::string_view name) {
  if (name == "pgm") return DumpFormat::kPgm;
  if (name == "csv") return DumpFormat::kCsv;
  fail(ErrorCode::kInvalidArgument, "unknown format '" + std::string(name) + "'");
}

std::string format_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string to_pgm(const Spectrogram& spec, const std::vector<Cell>* marks) {
  const double peak = spec.mag.empty() ? 0.0 : *std::max_element(spec.mag.begin(), spec.mag.end());
  const double full = marks != nullptr ? 127.0 : 255.0;
  std::vector<int> pixels(spec.mag.size(), 0);
  for (std::size_t i = 0; i < spec.mag.size(); ++i) {
    pixels[i] = peak > 0.0 ? static_cast<int>(std::lround(spec.mag[i] / peak * full)) : 0;
  }
  if (marks != nullptr) {
    for (const Cell& c : *marks) pixels[c.bin * spec.n_frames + c.frame] = 255;
  }

  std::string out = "P2\n" + std::to_string(spec.n_frames) + " " + std::to_string(spec.n_bins) +
                    "\n255\n";
  for (std::size_t row = 0; row < spec.n_bins; ++row) {
    const std::size_t bin = spec.n_bins - 1 - row;
    for (std::size_t t = 0; t < spec.n_frames; ++t) {
      if (t != 0) out += ' ';
      out += std::to_string(pixels[bin * spec.n_frames + t]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string spectrogram_to_pgm(const Spectrogram& spec) { return to_pgm(spec, nullptr); }

std::string spectrogram_to_csv(const Spectrogram& spec) {
  std::string out;
  for (std::size_t b = 0; b < spec.n_bins; ++b) {
    for (std::size_t t = 0; t < spec.n_frames; ++t) {
      if (t != 0) out += ',';
      out += format_number(spec.at(b, t));
    }
    out += '\n';
  }
  return out;
}

std::string render_stage(const ClipAnalysis& a, Stage stage, DumpFormat format) {
  const Spectrogram* matrix = nullptr;
  switch (stage) {
    case Stage::kRaw: matrix = &a.raw; break;
    case Stage::kThresholded: matrix = &a.thresholded; break;
    case Stage::kCleaned: matrix = &a.cleaned; break;
    case Stage::kTraced: break;
  }
  if (matrix != nullptr) {
    return format == DumpFormat::kPgm ? spectrogram_to_pgm(*matrix) : spectrogram_to_csv(*matrix);
  }

  if (format == DumpFormat::kPgm) {
    std::vector<Cell> marks;
    for (const CandidateCall& c : a.candidates) {
      marks.insert(marks.end(), c.path.points.begin(), c.path.points.end());
    }
    return to_pgm(a.cleaned, &marks);
  }
  std::string out = "frame,bin,magnitude,path_id\n";
  for (std::size_t id = 0; id < a.candidates.size(); ++id) {
    for (const Cell& c : a.candidates[id].path.points) {
      out += std::to_string(c.frame) + ',' + std::to_string(c.bin) + ',' +
             format_number(a.cleaned.at(c.bin, c.frame)) + ',' + std::to_string(id) + '\n';
    }
  }
  return out;
}

}  // namespace upcall
