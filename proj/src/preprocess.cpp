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

#include "upcall/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "upcall/error.hpp"

namespace upcall {

void validate(const PreprocessParams& params) {
  if (!(params.discard_fraction >= 0.0 && params.discard_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "discard_fraction must lie in [0, 1)");
  }
}

double weakest_threshold_value(const Spectrogram& spec, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "fraction must lie in [0, 1)");
  }
  if (spec.mag.empty()) return 0.0;
  std::vector<double> values = spec.mag;
  const auto index = static_cast<std::size_t>(std::floor(fraction * values.size()));
  const auto nth = values.begin() + static_cast<std::ptrdiff_t>(index);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

Spectrogram threshold_weakest(const Spectrogram& spec, double fraction) {
  const double v = weakest_threshold_value(spec, fraction);
  Spectrogram out = spec;
  for (double& m : out.mag) {
    if (m < v) m = 0.0;
  }
  return out;
}

Spectrogram clear_data_islands(const Spectrogram& spec) {
  Spectrogram out = spec;
  if (spec.n_bins < 3 || spec.n_frames < 3) return out;

  for (std::size_t b = 1; b + 1 < spec.n_bins; ++b) {
    for (std::size_t t = 1; t + 1 < spec.n_frames; ++t) {
      if (spec.at(b, t) == 0.0) continue;
      int sum = 0;
      for (int db = -1; db <= 1; ++db) {
        for (int dt = -1; dt <= 1; ++dt) {
          if (db == 0 && dt == 0) continue;
          if (spec.at(b + db, t + dt) > 0.0) ++sum;
        }
      }
      if (sum < 4) out.at(b, t) = 0.0;
    }
  }
  return out;
}

Spectrogram weakest_neighborhood(const Spectrogram& spec, const PreprocessParams& params,
                                 std::size_t* passes) {
  Spectrogram current = spec;
  std::size_t n = 0;
  while (true) {
    Spectrogram next = clear_data_islands(current);
    ++n;
    const bool stable = next.mag == current.mag;
    current = std::move(next);
    if (stable || (params.max_passes != 0 && n >= params.max_passes)) break;
  }
  if (passes != nullptr) *passes = n;
  return current;
}

}  // namespace upcall
