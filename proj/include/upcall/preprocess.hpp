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

#include <cstddef>

#include "upcall/spectrogram.hpp"

namespace upcall {

struct PreprocessParams {
  double discard_fraction = 0.8;
  std::size_t max_passes = 0;  // 0 = run to the fixpoint
};

void validate(const PreprocessParams& params);

// Value at ascending-sorted index floor(fraction * N) over all cells.
// Returns 0 for an empty matrix.
double weakest_threshold_value(const Spectrogram& spec, double fraction);

// Zeroes every cell strictly below weakest_threshold_value(spec, fraction).
// Cells tied with the threshold survive.
Spectrogram threshold_weakest(const Spectrogram& spec, double fraction);

// One synchronous sweep: each nonzero interior cell with fewer than four
// nonzero 8-neighbours (counted in the input) becomes zero. Edge rows and
// columns are copied unchanged.
Spectrogram clear_data_islands(const Spectrogram& spec);

// Applies clear_data_islands until a sweep changes nothing or max_passes
// sweeps have run. `passes`, when given, receives the number of sweeps.
Spectrogram weakest_neighborhood(const Spectrogram& spec, const PreprocessParams& params,
                                 std::size_t* passes = nullptr);

}  // namespace upcall
