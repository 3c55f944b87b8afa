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

#include <string>
#include <string_view>

#include "upcall/pipeline.hpp"

namespace upcall {

enum class Stage { kRaw, kThresholded, kCleaned, kTraced };
enum class DumpFormat { kPgm, kCsv };

// Errors: kInvalidArgument for an unknown name.
Stage parse_stage(std::string_view name);
DumpFormat parse_dump_format(std::string_view name);

// Shortest round-trip decimal form, always with a fraction or exponent
// ("0.0", "0.25", "1e-07").
std::string format_number(double v);

// ASCII PGM (P2): magnitudes scaled linearly so the maximum maps to 255;
// the top image row is the highest bin.
std::string spectrogram_to_pgm(const Spectrogram& spec);

// Rows are bins in ascending order, columns are frames.
std::string spectrogram_to_csv(const Spectrogram& spec);

// Stage dump of an analysed clip. The traced stage renders the cleaned
// matrix with candidate points at full scale (pgm) or lists the points as
// frame,bin,magnitude,path_id (csv).
std::string render_stage(const ClipAnalysis& analysis, Stage stage, DumpFormat format);

}  // namespace upcall
