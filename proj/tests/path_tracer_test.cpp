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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

#include "test_util.hpp"
#include "upcall/error.hpp"
#include "upcall/preprocess.hpp"

namespace upcall {
namespace {

using testing::make_matrix;

// 2 s at the default resolution.
constexpr std::size_t kFrames = 126;

Spectrogram ridge(std::size_t bins, int row, int first, int last, double value = 1.0) {
  Spectrogram s = make_matrix(bins, kFrames);
  for (int t = first; t <= last; ++t) s.at(row, t) = value;
  return s;
}

TracerConfig deterministic_config() {
  TracerConfig cfg;
  cfg.alpha = 1.0;
  cfg.beta = 0.0;
  return cfg;
}

TEST(SeedParticles, TenParticlesSpanTheClip) {
  const Spectrogram s = make_matrix(64, kFrames, 1.0);
  const auto particles = seed_particles(s, 10);
  ASSERT_EQ(particles.size(), 10U);
  for (std::size_t k = 0; k < particles.size(); ++k) {
    const double expected = 2.0 * static_cast<double>(k) / 9.0;
    EXPECT_NEAR(s.frame_time_s(particles[k].time_frame), expected, s.time_res_s + 1e-9);
    EXPECT_TRUE(particles[k].active);
    EXPECT_EQ(particles[k].freq_bin, 1);  // lowest interior bin
  }
  // The edge columns themselves are never used.
  EXPECT_EQ(particles.front().time_frame, 1);
  EXPECT_EQ(particles.back().time_frame, static_cast<int>(kFrames) - 2);
}

TEST(SeedParticles, EmptyMatrixGivesInactiveParticles) {
  const auto particles = seed_particles(make_matrix(64, kFrames), 10);
  ASSERT_EQ(particles.size(), 10U);
  for (const Particle& p : particles) EXPECT_FALSE(p.active);
}

TEST(SeedParticles, SingleRowPinsFrequency) {
  const auto particles = seed_particles(ridge(64, 17, 0, kFrames - 1), 10);
  for (const Particle& p : particles) {
    EXPECT_TRUE(p.active);
    EXPECT_EQ(p.freq_bin, 17);
  }
}

TEST(SeedParticles, SkipsEdgeRows) {
  Spectrogram s = ridge(64, 30, 0, kFrames - 1);
  for (std::size_t t = 0; t < kFrames; ++t) s.at(0, t) = 5.0;
  for (const Particle& p : seed_particles(s, 10)) EXPECT_EQ(p.freq_bin, 30);
}

TEST(SeedParticles, AxisPlacement) {
  const Spectrogram s = make_matrix(8, kFrames, 1.0);
  const std::array<int, 4> axis{10, 11, 20, 40};
  const auto particles = seed_particles_on_axis(s, axis, 3);
  ASSERT_EQ(particles.size(), 3U);
  EXPECT_EQ(particles[0].time_frame, 10);
  EXPECT_EQ(particles[1].time_frame, 20);  // index round(1.5) = 2
  EXPECT_EQ(particles[2].time_frame, 40);
}

TEST(RouletteStep, SingleCandidateAlwaysWins) {
  Spectrogram s = make_matrix(8, 8, 2.0);
  const std::array<Cell, 1> only{Cell{3, 4}};
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(roulette_step(s, only, 0.0, {}, rng), only[0]);
}

TEST(RouletteStep, EmptyCandidatesFail) {
  Rng rng(1);
  try {
    roulette_step(make_matrix(4, 4), {}, 0.0, {}, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCandidates);
  }
}

TEST(RouletteStep, DeterministicTermFavoursMagnitudeNearMean) {
  // Weights 1 / (1 + 0) and 1 / (1 + 9) give 10/11 and 1/11.
  Spectrogram s = make_matrix(4, 4);
  s.at(1, 1) = 2.0;
  s.at(2, 1) = 5.0;
  const std::array<Cell, 2> cands{Cell{1, 1}, Cell{1, 2}};
  Rng rng(99);
  const int draws = 100000;
  int first = 0;
  for (int i = 0; i < draws; ++i) {
    if (roulette_step(s, cands, 2.0, deterministic_config(), rng) == cands[0]) ++first;
  }
  EXPECT_NEAR(static_cast<double>(first) / draws, 10.0 / 11.0, 0.01);
}

TEST(RouletteStep, RandomTermIsExchangeable) {
  TracerConfig cfg;
  cfg.alpha = 0.0;
  cfg.beta = 1.0;
  const std::array<Cell, 3> cands{Cell{1, 1}, Cell{1, 2}, Cell{1, 3}};
  const std::array<std::array<double, 3>, 2> orders{{{1.0, 5.0, 9.0}, {9.0, 1.0, 5.0}}};
  for (const auto& mags : orders) {
    Spectrogram s = make_matrix(5, 4);
    for (int j = 0; j < 3; ++j) s.at(j + 1, 1) = mags[j];
    Rng rng(5);
    std::array<int, 3> counts{};
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      const Cell c = roulette_step(s, cands, 4.0, cfg, rng);
      ++counts[c.bin - 1];
    }
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(counts[j] / double(draws), 1.0 / 3.0, 0.01);
  }
}

TEST(TraceLeg, FollowsSingleRowRidge) {
  const Spectrogram s = ridge(32, 10, 5, 60);
  Rng rng(3);
  const auto leg = trace_leg(s, {5, 10}, {40, 10}, {}, rng);
  ASSERT_TRUE(leg.has_value());
  ASSERT_EQ(leg->points.size(), 36U);
  for (std::size_t i = 0; i < leg->points.size(); ++i) {
    EXPECT_EQ(leg->points[i], (Cell{static_cast<int>(5 + i), 10}));
  }
  EXPECT_DOUBLE_EQ(leg->duration_s, 35 * s.time_res_s);
}

TEST(TraceLeg, FailsAcrossZeroGap) {
  Spectrogram s = ridge(32, 10, 5, 60);
  s.at(10, 30) = 0.0;
  Rng rng(3);
  EXPECT_FALSE(trace_leg(s, {5, 10}, {40, 10}, {}, rng).has_value());
  EXPECT_FALSE(trace_leg(make_matrix(8, 20), {1, 1}, {10, 1}, {}, rng).has_value());
}

TEST(TraceLeg, RespectsVisitedCells) {
  Spectrogram s = ridge(32, 10, 0, 60);
  const std::array<Cell, 1> visited{Cell{20, 10}};
  Rng rng(3);
  EXPECT_FALSE(trace_leg(s, {5, 10}, {40, 10}, {}, rng, visited).has_value());
}

TEST(TraceLeg, StepBudgetBoundsTheWalk) {
  const Spectrogram s = ridge(32, 10, 0, 60);
  TracerConfig cfg;
  cfg.max_steps_per_leg = 10;
  Rng rng(3);
  EXPECT_FALSE(trace_leg(s, {0, 10}, {30, 10}, cfg, rng).has_value());
  EXPECT_TRUE(trace_leg(s, {0, 10}, {10, 10}, cfg, rng).has_value());
}

TEST(TraceLeg, WalksAreValidOnRandomBlobs) {
  std::mt19937_64 gen(21);
  int successes = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Spectrogram s = weakest_neighborhood(testing::random_matrix(40, 60, 0.75, gen), {});
    const auto particles = seed_particles(s, 4);
    if (!particles[0].active || !particles[1].active) continue;
    Rng rng(static_cast<std::uint64_t>(trial));
    const auto leg = trace_leg(s, particles[0].cell(), particles[1].cell(), {}, rng);
    if (!leg) continue;
    ++successes;
    std::set<Cell> seen;
    EXPECT_EQ(leg->points.front(), particles[0].cell());
    EXPECT_EQ(leg->points.back().frame, particles[1].time_frame);
    for (std::size_t i = 0; i < leg->points.size(); ++i) {
      const Cell c = leg->points[i];
      ASSERT_GT(s.at(c.bin, c.frame), 0.0);
      ASSERT_EQ(leg->magnitudes[i], s.at(c.bin, c.frame));
      ASSERT_TRUE(seen.insert(c).second) << "cell revisited";
      if (i > 0) {
        const Cell p = leg->points[i - 1];
        const int dt = c.frame - p.frame;
        const int df = std::abs(c.bin - p.bin);
        ASSERT_TRUE((dt == 1 && df <= 1) || (dt == 0 && df == 1));
      }
    }
  }
  EXPECT_GT(successes, 20);
}

TEST(TraceLeg, SameSeedSameWalk) {
  std::mt19937_64 gen(4);
  const Spectrogram s = weakest_neighborhood(testing::random_matrix(40, 60, 0.8, gen), {});
  const auto particles = seed_particles(s, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed);
    Rng b(seed);
    EXPECT_EQ(trace_leg(s, particles[0].cell(), particles[1].cell(), {}, a),
              trace_leg(s, particles[0].cell(), particles[1].cell(), {}, b));
  }
}

TEST(TraceRound, HalfSecondRidgeSurvives) {
  const Spectrogram s = ridge(64, 20, 40, 72);  // 0.512 s
  Rng rng(8);
  const auto paths = trace_round(s, {}, rng);
  ASSERT_EQ(paths.size(), 1U);
  EXPECT_GE(paths[0].duration_s, 0.3);
  for (const Cell& c : paths[0].points) {
    EXPECT_EQ(c.bin, 20);
    EXPECT_GE(c.frame, 40);
    EXPECT_LE(c.frame, 72);
  }
}

TEST(TraceRound, ShortRidgeIsDiscarded) {
  Rng rng(8);
  EXPECT_TRUE(trace_round(ridge(64, 20, 40, 52), {}, rng).empty());
}

TEST(IterateUntilStable, StopsOnEmptyAndCleanRounds) {
  TracerConfig cfg;
  Rng rng(1);
  const TraceResult none = iterate_until_stable(make_matrix(64, kFrames), cfg, rng);
  EXPECT_TRUE(none.paths.empty());
  EXPECT_EQ(none.rounds, 1U);

  const TraceResult clean = iterate_until_stable(ridge(64, 20, 0, kFrames - 1), cfg, rng);
  ASSERT_EQ(clean.paths.size(), 1U);
  EXPECT_EQ(clean.rounds, 1U);
  EXPECT_EQ(clean.paths[0].first_frame(), 1);
  EXPECT_EQ(clean.paths[0].last_frame(), static_cast<int>(kFrames) - 2);
}

TEST(IterateUntilStable, NeverExceedsMaxRounds) {
  std::mt19937_64 gen(31);
  TracerConfig cfg;
  cfg.max_rounds = 3;
  for (int trial = 0; trial < 50; ++trial) {
    const Spectrogram s = weakest_neighborhood(testing::random_matrix(48, kFrames, 0.7, gen), {});
    Rng rng(static_cast<std::uint64_t>(trial));
    const TraceResult r = iterate_until_stable(s, cfg, rng);
    EXPECT_GE(r.rounds, 1U);
    EXPECT_LE(r.rounds, 3U);
    for (const Path& p : r.paths) EXPECT_GE(p.duration_s, cfg.min_path_duration_s);
  }
}

TEST(PropagateFrequency, SingleBinRidge) {
  const Spectrogram s = ridge(32, 12, 10, 40);
  std::vector<Cell> pts;
  for (int t = 10; t <= 40; ++t) pts.push_back({t, 12});
  const std::array<Path, 1> paths{make_path(s, pts)};
  const auto cands = propagate_frequency(s, paths);
  ASSERT_EQ(cands.size(), 1U);
  for (const PointExtent& e : cands[0].extents) {
    EXPECT_EQ(e, (PointExtent{12, 12, false}));
  }
}

TEST(PropagateFrequency, FiveBinBlobAndFullColumn) {
  Spectrogram s = make_matrix(32, 50);
  for (int t = 10; t <= 40; ++t) {
    for (int b = 18; b <= 22; ++b) s.at(b, t) = 1.0;
  }
  for (int b = 0; b < 32; ++b) s.at(b, 25) = 1.0;  // column with no zero
  std::vector<Cell> pts;
  for (int t = 10; t <= 40; ++t) pts.push_back({t, 20});
  const std::array<Path, 1> paths{make_path(s, pts)};
  const auto cands = propagate_frequency(s, paths);
  ASSERT_EQ(cands.size(), 1U);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].frame == 25) {
      EXPECT_TRUE(cands[0].extents[i].failed);
    } else {
      EXPECT_EQ(cands[0].extents[i], (PointExtent{18, 22, false}));
    }
  }
}

TEST(Prune, DropsStrayAndFailedPoints) {
  Spectrogram s = ridge(32, 12, 10, 40);
  s.at(12, 50) = 1.0;
  std::vector<Cell> pts;
  for (int t = 10; t <= 40; ++t) pts.push_back({t, 12});
  pts.push_back({50, 12});
  const std::array<Path, 1> paths{make_path(s, pts)};
  const auto pruned = prune(propagate_frequency(s, paths), s.time_res_s, {});
  ASSERT_EQ(pruned.size(), 1U);
  EXPECT_EQ(pruned[0].path.first_frame(), 10);
  EXPECT_EQ(pruned[0].path.last_frame(), 40);
  EXPECT_DOUBLE_EQ(pruned[0].path.duration_s, 30 * s.time_res_s);

  // Every point failed: nothing is left.
  const Spectrogram full = make_matrix(32, kFrames, 1.0);
  const std::array<Path, 1> full_paths{make_path(full, pts)};
  EXPECT_TRUE(prune(propagate_frequency(full, full_paths), full.time_res_s, {}).empty());
}

TEST(TraceCandidates, InvariantsOnRandomMatrices) {
  std::mt19937_64 gen(77);
  std::size_t total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Spectrogram s =
        weakest_neighborhood(testing::random_matrix(64, kFrames, 0.6 + 0.001 * trial, gen), {});
    TracerConfig cfg;
    Rng rng(static_cast<std::uint64_t>(trial));
    const auto cands = trace_candidates(s, cfg, rng);
    total += cands.size();
    for (const CandidateCall& c : cands) {
      ASSERT_EQ(c.extents.size(), c.path.points.size());
      EXPECT_GE(c.path.duration_s, cfg.min_path_duration_s);
      for (std::size_t i = 0; i < c.path.points.size(); ++i) {
        const Cell p = c.path.points[i];
        ASSERT_GT(s.at(p.bin, p.frame), 0.0);
        ASSERT_FALSE(c.extents[i].failed);
        ASSERT_LE(c.extents[i].low_bin, p.bin);
        ASSERT_GE(c.extents[i].high_bin, p.bin);
      }
    }
    Rng again(static_cast<std::uint64_t>(trial));
    EXPECT_EQ(trace_candidates(s, cfg, again), cands);
  }
  EXPECT_GT(total, 0U);
}

TEST(TracerConfig, Validation) {
  TracerConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.alpha = 0.5;
  EXPECT_THROW(validate(cfg), Error);
  cfg = {};
  cfg.n_particles = 1;
  EXPECT_THROW(validate(cfg), Error);
  cfg = {};
  cfg.min_path_duration_s = 0.0;
  EXPECT_THROW(validate(cfg), Error);
}

}  // namespace
}  // namespace upcall
