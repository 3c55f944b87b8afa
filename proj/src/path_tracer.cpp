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

#include "upcall/path_tracer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "upcall/error.hpp"

namespace upcall {
namespace {

bool contains(std::span<const Cell> cells, Cell c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

double mean_nonzero_in_rect(const Spectrogram& spec, Cell a, Cell b) {
  const int lo_bin = std::min(a.bin, b.bin);
  const int hi_bin = std::max(a.bin, b.bin);
  const int lo_frame = std::min(a.frame, b.frame);
  const int hi_frame = std::max(a.frame, b.frame);
  double sum = 0.0;
  std::size_t count = 0;
  for (int bin = lo_bin; bin <= hi_bin; ++bin) {
    for (int t = lo_frame; t <= hi_frame; ++t) {
      const double v = spec.at(bin, t);
      if (v != 0.0) {
        sum += v;
        ++count;
      }
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

Particle place_on_column(const Spectrogram& spec, int frame) {
  // Edge columns are never cleaned either; step one frame inward.
  if (spec.n_frames >= 3) frame = std::clamp(frame, 1, static_cast<int>(spec.n_frames) - 2);
  Particle p{frame, 0, false};
  const bool skip_edges = spec.n_bins >= 3;
  const std::size_t first = skip_edges ? 1 : 0;
  const std::size_t last = skip_edges ? spec.n_bins - 1 : spec.n_bins;
  for (std::size_t b = first; b < last; ++b) {
    if (spec.at(b, frame) != 0.0) {
      p.freq_bin = static_cast<int>(b);
      p.active = true;
      break;
    }
  }
  return p;
}

}  // namespace

void validate(const TracerConfig& cfg) {
  if (cfg.n_particles < 2) {
    fail(ErrorCode::kInvalidArgument, "n_particles must be at least 2");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0 && cfg.beta >= 0.0 && cfg.beta <= 1.0) ||
      std::abs(cfg.alpha + cfg.beta - 1.0) > 1e-12) {
    fail(ErrorCode::kInvalidArgument, "alpha and beta must lie in [0, 1] and sum to 1");
  }
  if (!(cfg.min_path_duration_s > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "min_path_duration_s must be positive");
  }
  if (cfg.max_rounds == 0) {
    fail(ErrorCode::kInvalidArgument, "max_rounds must be at least 1");
  }
}

Path make_path(const Spectrogram& spec, std::vector<Cell> points) {
  Path path;
  path.points = std::move(points);
  path.magnitudes.reserve(path.points.size());
  for (const Cell& c : path.points) path.magnitudes.push_back(spec.at(c.bin, c.frame));
  if (!path.points.empty()) {
    path.duration_s = (path.last_frame() - path.first_frame()) * spec.time_res_s;
  }
  return path;
}

std::vector<FrameExtent> CandidateCall::frame_extents() const {
  std::vector<FrameExtent> out;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const int frame = path.points[i].frame;
    if (out.empty() || out.back().frame != frame) {
      out.push_back({frame, extents[i].low_bin, extents[i].high_bin});
    } else {
      out.back().low_bin = std::min(out.back().low_bin, extents[i].low_bin);
      out.back().high_bin = std::max(out.back().high_bin, extents[i].high_bin);
    }
  }
  return out;
}

std::vector<Particle> seed_particles(const Spectrogram& spec, std::size_t n) {
  std::vector<int> axis(spec.n_frames);
  for (std::size_t t = 0; t < spec.n_frames; ++t) axis[t] = static_cast<int>(t);
  return seed_particles_on_axis(spec, axis, n);
}

std::vector<Particle> seed_particles_on_axis(const Spectrogram& spec,
                                             std::span<const int> axis_frames,
                                             std::size_t n) {
  if (n < 2) fail(ErrorCode::kInvalidArgument, "need at least two particles");
  std::vector<Particle> out(n);
  if (axis_frames.empty()) return out;

  const double span = static_cast<double>(axis_frames.size() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const auto pos = static_cast<std::size_t>(
        std::lround(static_cast<double>(k) * span / static_cast<double>(n - 1)));
    out[k] = place_on_column(spec, axis_frames[pos]);
  }
  return out;
}

Cell roulette_step(const Spectrogram& spec, std::span<const Cell> candidates, double mu,
                   const TracerConfig& cfg, Rng& rng) {
  if (candidates.empty()) fail(ErrorCode::kEmptyCandidates, "no candidate cells");

  std::vector<double> weights(candidates.size());
  double total = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const double d = spec.at(candidates[j].bin, candidates[j].frame) - mu;
    weights[j] = cfg.alpha / (1.0 + d * d) + cfg.beta * rng.uniform();
    total += weights[j];
  }

  const double spin = rng.uniform() * total;
  double acc = 0.0;
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    acc += weights[j];
    if (spin < acc) return candidates[j];
  }
  // Only reachable when every weight is zero (alpha = 0 and all draws 0).
  return candidates.back();
}

std::optional<Path> trace_leg(const Spectrogram& spec, Cell from, Cell to,
                              const TracerConfig& cfg, Rng& rng,
                              std::span<const Cell> visited) {
  if (from.frame >= to.frame) {
    fail(ErrorCode::kInvalidArgument, "leg must move forward in time");
  }
  if (spec.at(from.bin, from.frame) == 0.0) return std::nullopt;

  static constexpr std::array<Cell, 5> kMoves{
      {{1, -1}, {1, 0}, {1, 1}, {0, -1}, {0, 1}}};

  const std::size_t gap = static_cast<std::size_t>(to.frame - from.frame);
  const std::size_t max_steps = cfg.max_steps_per_leg != 0 ? cfg.max_steps_per_leg : 4 * gap;
  const double mu = mean_nonzero_in_rect(spec, from, to);
  const int n_bins = static_cast<int>(spec.n_bins);

  std::vector<Cell> points{from};
  std::vector<Cell> candidates;
  Cell cur = from;
  for (std::size_t step = 0; step < max_steps; ++step) {
    candidates.clear();
    for (const Cell& m : kMoves) {
      const Cell next{cur.frame + m.frame, cur.bin + m.bin};
      if (next.frame > to.frame || next.bin < 0 || next.bin >= n_bins) continue;
      if (spec.at(next.bin, next.frame) == 0.0) continue;
      if (contains(points, next) || contains(visited, next)) continue;
      candidates.push_back(next);
    }
    if (candidates.empty()) return std::nullopt;
    cur = roulette_step(spec, candidates, mu, cfg, rng);
    points.push_back(cur);
    if (cur.frame == to.frame) return make_path(spec, std::move(points));
  }
  return std::nullopt;
}

RoundTrace trace_particles(const Spectrogram& spec, std::span<const Particle> particles,
                           const TracerConfig& cfg, Rng& rng) {
  std::vector<Particle> active;
  for (const Particle& p : particles) {
    if (!p.active) continue;
    if (!active.empty() && active.back().time_frame >= p.time_frame) continue;
    active.push_back(p);
  }

  RoundTrace out;
  std::vector<Cell> chain;
  auto flush = [&] {
    if (chain.size() >= 2) out.raw.push_back(make_path(spec, std::move(chain)));
    chain.clear();
  };

  for (std::size_t i = 0; i + 1 < active.size(); ++i) {
    const Cell target = active[i + 1].cell();
    if (!chain.empty()) {
      // The particle carries on from wherever the previous leg arrived.
      if (auto leg = trace_leg(spec, chain.back(), target, cfg, rng, chain)) {
        chain.insert(chain.end(), leg->points.begin() + 1, leg->points.end());
        continue;
      }
      const bool same_start = chain.back() == active[i].cell();
      flush();
      if (same_start) continue;
    }
    if (auto leg = trace_leg(spec, active[i].cell(), target, cfg, rng)) {
      chain = std::move(leg->points);
    }
  }
  flush();

  for (const Path& p : out.raw) {
    if (p.duration_s >= cfg.min_path_duration_s) out.surviving.push_back(p);
  }
  return out;
}

std::vector<Path> trace_round(const Spectrogram& spec, const TracerConfig& cfg, Rng& rng) {
  const std::vector<Particle> particles = seed_particles(spec, cfg.n_particles);
  return trace_particles(spec, particles, cfg, rng).surviving;
}

TraceResult iterate_until_stable(const Spectrogram& spec, const TracerConfig& cfg, Rng& rng) {
  validate(cfg);
  std::vector<int> axis(spec.n_frames);
  for (std::size_t t = 0; t < spec.n_frames; ++t) axis[t] = static_cast<int>(t);

  TraceResult result;
  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    result.rounds = round;
    const std::vector<Particle> particles =
        seed_particles_on_axis(spec, axis, cfg.n_particles);
    RoundTrace trace = trace_particles(spec, particles, cfg, rng);
    result.paths = std::move(trace.surviving);
    if (result.paths.empty()) break;

    const bool any_short = std::any_of(trace.raw.begin(), trace.raw.end(), [&](const Path& p) {
      return p.duration_s < cfg.min_path_duration_s;
    });
    if (!any_short) break;

    // The new time axis is the union of the surviving paths' frame spans.
    axis.clear();
    for (const Path& p : result.paths) {
      for (int t = p.first_frame(); t <= p.last_frame(); ++t) axis.push_back(t);
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
  }
  return result;
}

std::vector<CandidateCall> propagate_frequency(const Spectrogram& spec,
                                               std::span<const Path> paths) {
  const int n_bins = static_cast<int>(spec.n_bins);
  std::vector<CandidateCall> out;
  out.reserve(paths.size());
  for (const Path& path : paths) {
    CandidateCall cand;
    cand.path = path;
    cand.extents.reserve(path.points.size());
    for (const Cell& c : path.points) {
      int up = c.bin + 1;
      while (up < n_bins && spec.at(up, c.frame) != 0.0) ++up;
      int down = c.bin - 1;
      while (down >= 0 && spec.at(down, c.frame) != 0.0) --down;
      const bool up_hit_zero = up < n_bins;
      const bool down_hit_zero = down >= 0;
      cand.extents.push_back({down + 1, up - 1, !up_hit_zero && !down_hit_zero});
    }
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<CandidateCall> prune(std::span<const CandidateCall> candidates,
                                 double time_res_s, const TracerConfig& cfg) {
  std::vector<CandidateCall> out;
  for (const CandidateCall& cand : candidates) {
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < cand.path.points.size(); ++i) {
      if (!cand.extents[i].failed) alive.push_back(i);
    }

    CandidateCall kept;
    for (std::size_t i : alive) {
      const Cell a = cand.path.points[i];
      const bool has_neighbour = std::any_of(alive.begin(), alive.end(), [&](std::size_t j) {
        const Cell b = cand.path.points[j];
        return j != i && std::abs(a.frame - b.frame) <= 2 && std::abs(a.bin - b.bin) <= 2;
      });
      if (!has_neighbour) continue;
      kept.path.points.push_back(a);
      kept.path.magnitudes.push_back(cand.path.magnitudes[i]);
      kept.extents.push_back(cand.extents[i]);
    }
    if (kept.path.points.empty()) continue;
    kept.path.duration_s = (kept.path.last_frame() - kept.path.first_frame()) * time_res_s;
    if (kept.path.duration_s < cfg.min_path_duration_s) continue;
    out.push_back(std::move(kept));
  }
  return out;
}

std::vector<CandidateCall> trace_candidates(const Spectrogram& spec, const TracerConfig& cfg,
                                            Rng& rng) {
  const TraceResult traced = iterate_until_stable(spec, cfg, rng);
  const std::vector<CandidateCall> raw = propagate_frequency(spec, traced.paths);
  return prune(raw, spec.time_res_s, cfg);
}

}  // namespace upcall
