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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "upcall/rng.hpp"
#include "upcall/spectrogram.hpp"

namespace upcall {

struct TracerConfig {
  std::size_t n_particles = 10;
  double alpha = 0.8;  // weight of the deterministic term
  double beta = 0.2;   // weight of the random term; alpha + beta == 1
  double min_path_duration_s = 0.3;
  std::size_t max_steps_per_leg = 0;  // 0 = four times the leg's frame gap
  std::size_t max_rounds = 10;
  std::uint64_t rng_seed = 0;
};

void validate(const TracerConfig& cfg);

// A position on the spectrogram grid.
struct Cell {
  int frame = 0;
  int bin = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Particle {
  int time_frame = 0;
  int freq_bin = 0;
  bool active = false;

  Cell cell() const { return {time_frame, freq_bin}; }
};

// Time-sorted chain of nonzero cells, consecutive points 8-adjacent.
struct Path {
  std::vector<Cell> points;
  std::vector<double> magnitudes;
  double duration_s = 0.0;

  int first_frame() const { return points.front().frame; }
  int last_frame() const { return points.back().frame; }

  friend bool operator==(const Path&, const Path&) = default;
};

Path make_path(const Spectrogram& spec, std::vector<Cell> points);

// Frequency extent found by walking up and down from one path point.
struct PointExtent {
  int low_bin = 0;
  int high_bin = 0;
  bool failed = false;  // neither walk met a zero cell

  friend bool operator==(const PointExtent&, const PointExtent&) = default;
};

struct FrameExtent {
  int frame = 0;
  int low_bin = 0;
  int high_bin = 0;
};

struct CandidateCall {
  Path path;
  std::vector<PointExtent> extents;  // parallel to path.points

  // Union of the point extents that share a frame, in frame order.
  std::vector<FrameExtent> frame_extents() const;

  friend bool operator==(const CandidateCall&, const CandidateCall&) = default;
};

// Particle k sits at frame round(k * (n_frames - 1) / (n - 1)), on the lowest
// nonzero interior bin of that column. Island clearing never touches edge
// cells, so edge rows are skipped and a particle on the first or last frame
// moves one frame inward. Particles in empty columns are inactive.
std::vector<Particle> seed_particles(const Spectrogram& spec, std::size_t n);

// Same placement rule over an arbitrary sorted set of frames.
std::vector<Particle> seed_particles_on_axis(const Spectrogram& spec,
                                             std::span<const int> axis_frames,
                                             std::size_t n);

// Roulette-wheel pick among `candidates`. Candidate j gets weight
//   alpha / (1 + (mag_j - mu)^2) + beta * x_j,   x_j ~ U[0, 1)
// and is chosen with probability w_j / sum(w).
// Errors: kEmptyCandidates.
Cell roulette_step(const Spectrogram& spec, std::span<const Cell> candidates, double mu,
                   const TracerConfig& cfg, Rng& rng);

// Walks from `from` towards the column of `to` over nonzero cells. Moves are
// forward (up, level, down) or vertical within the current column; cells
// already on the leg or listed in `visited` are never re-entered. Returns
// nullopt when no route exists or the step budget runs out.
std::optional<Path> trace_leg(const Spectrogram& spec, Cell from, Cell to,
                              const TracerConfig& cfg, Rng& rng,
                              std::span<const Cell> visited = {});

struct RoundTrace {
  std::vector<Path> raw;        // every chained path before the duration filter
  std::vector<Path> surviving;  // raw paths lasting at least min_path_duration_s
};

RoundTrace trace_particles(const Spectrogram& spec, std::span<const Particle> particles,
                           const TracerConfig& cfg, Rng& rng);

// One seeding over the full time axis followed by tracing and filtering.
std::vector<Path> trace_round(const Spectrogram& spec, const TracerConfig& cfg, Rng& rng);

struct TraceResult {
  std::vector<Path> paths;
  std::size_t rounds = 0;
};

// Re-seeds over the union of the surviving paths' frames until a round
// produces no short path or max_rounds is reached.
TraceResult iterate_until_stable(const Spectrogram& spec, const TracerConfig& cfg, Rng& rng);

std::vector<CandidateCall> propagate_frequency(const Spectrogram& spec,
                                               std::span<const Path> paths);

// Drops failed points, points with no other surviving point within Chebyshev
// distance 2, and candidates left shorter than min_path_duration_s.
std::vector<CandidateCall> prune(std::span<const CandidateCall> candidates,
                                 double time_res_s, const TracerConfig& cfg);

// iterate_until_stable -> propagate_frequency -> prune.
std::vector<CandidateCall> trace_candidates(const Spectrogram& spec, const TracerConfig& cfg,
                                            Rng& rng);

}  // namespace upcall
