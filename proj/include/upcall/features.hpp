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

#include <array>
#include <cstddef>
#include <string_view>

#include "upcall/path_tracer.hpp"
#include "upcall/spectrogram.hpp"

namespace upcall {

inline constexpr std::size_t kFeatureCount = 11;

// Band used for the local noise estimate.
inline constexpr double kNoiseBandLowHz = 50.0;
inline constexpr double kNoiseBandHighHz = 440.0;

// Call descriptors, index 0 holds f1 and index 10 holds f11.
//   f1  duration (s)                    f7  segmentation threshold
//   f2  minimum frequency (Hz)          f8  mean instantaneous bandwidth (Hz)
//   f3  maximum bandwidth (Hz)          f9  fraction of holes
//   f4  start-end bandwidth (Hz, fit)   f10 fraction of downsweep
//   f5  upsweep duration (s)            f11 fraction with a 2x harmonic
//   f6  local noise level
struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  double duration() const { return values[0]; }
  double min_frequency() const { return values[1]; }
  double max_bandwidth() const { return values[2]; }
  double start_end_bandwidth() const { return values[3]; }
  double upsweep_duration() const { return values[4]; }
  double noise_level() const { return values[5]; }
  double segmentation_threshold() const { return values[6]; }
  double mean_bandwidth() const { return values[7]; }
  double hole_fraction() const { return values[8]; }
  double downsweep_fraction() const { return values[9]; }
  double harmonic_fraction() const { return values[10]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

std::string_view feature_name(std::size_t index);

// Per-frame ridge contour: the bin of peak cleaned magnitude inside the
// frame's extent, then a 5-frame running median. Sweep features (f4, f5,
// f10) are computed on it.
struct ContourPoint {
  int frame = 0;
  int bin = 0;
};
std::vector<ContourPoint> ridge_contour(const CandidateCall& cand, const Spectrogram& spec_clean);

// Errors: kBandOutOfRange when spec_raw does not reach 440 Hz.
FeatureVector extract_features(const CandidateCall& cand, const Spectrogram& spec_raw,
                               const Spectrogram& spec_clean, double seg_threshold);

}  // namespace upcall
