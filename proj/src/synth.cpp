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

#include "upcall/synth.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "upcall/error.hpp"
#include "upcall/spectrogram.hpp"

namespace upcall {
namespace {

constexpr double kCallPeak = 0.5;
constexpr double kTaperS = 0.05;

double band_fraction(int sample_rate_hz) {
  return (kCallBandHighHz - kCallBandLowHz) / (0.5 * sample_rate_hz);
}

double taper(double tau, double duration) {
  const double ramp = std::min(kTaperS, duration / 4.0);
  const double edge = std::min(tau, duration - tau);
  if (edge >= ramp) return 1.0;
  if (edge <= 0.0) return 0.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * edge / ramp);
}

// Adds a swept tone starting at `onset`. Returns the number of samples covered.
std::size_t add_sweep(std::vector<double>& out, double f0, double f1, double duration,
                      double onset, SweepShape shape, double harmonic, int sample_rate_hz) {
  const auto first = static_cast<std::size_t>(std::llround(onset * sample_rate_hz));
  const auto count = static_cast<std::size_t>(std::llround(duration * sample_rate_hz));
  for (std::size_t i = 0; i < count && first + i < out.size(); ++i) {
    const double tau = static_cast<double>(i) / sample_rate_hz;
    const double u = tau / duration;
    const double cycles = shape == SweepShape::kLinear
                              ? f0 * tau + (f1 - f0) * duration * u * u / 2.0
                              : f0 * tau + (f1 - f0) * duration * u * u * u / 3.0;
    const double phase = 2.0 * std::numbers::pi * cycles;
    const double env = kCallPeak * taper(tau, duration);
    out[first + i] += env * (std::sin(phase) + harmonic * std::sin(2.0 * phase));
  }
  return count;
}

double noise_sigma_for_snr(double band_signal_power, double snr_db, int sample_rate_hz) {
  return std::sqrt(band_signal_power / (std::pow(10.0, snr_db / 10.0) * band_fraction(sample_rate_hz)));
}

AudioClip mix(const std::vector<double>& a, const std::vector<double>& b, int sample_rate_hz,
              Label label) {
  AudioClip clip;
  clip.sample_rate_hz = sample_rate_hz;
  clip.label = label;
  clip.samples.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) clip.samples[i] = std::clamp(a[i] + b[i], -1.0, 1.0);
  return clip;
}

std::vector<double> white(std::size_t n, double sigma, Rng& rng) {
  std::vector<double> out(n);
  for (double& v : out) v = sigma * rng.normal();
  return out;
}

std::size_t clip_samples(double clip_len_s, int sample_rate_hz) {
  if (sample_rate_hz <= 0 || !(clip_len_s > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "sample rate and clip length must be positive");
  }
  return static_cast<std::size_t>(std::llround(clip_len_s * sample_rate_hz));
}

std::string format_field(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

std::optional<double> parse_optional(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::kInvalidArgument, "bad number '" + std::string(text) + "' in manifest");
  }
  return v;
}

}  // namespace

void validate(const UpcallSpec& spec, double clip_len_s) {
  if (!(spec.f_start_hz >= kCallBandLowHz && spec.f_end_hz <= kCallBandHighHz &&
        spec.f_end_hz > spec.f_start_hz)) {
    fail(ErrorCode::kBandViolation, "up-call must sweep upward within 50-440 Hz");
  }
  if (!(spec.duration_s >= 0.3 && spec.duration_s <= 1.5)) {
    fail(ErrorCode::kBandViolation, "up-call duration must lie in [0.3, 1.5] s");
  }
  if (!(spec.harmonic_level >= 0.0 && spec.harmonic_level <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "harmonic_level must lie in [0, 1]");
  }
  if (!(spec.onset_s >= 0.0 && spec.onset_s + spec.duration_s <= clip_len_s + 1e-12)) {
    fail(ErrorCode::kInvalidArgument, "call does not fit in the clip");
  }
  if (!std::isfinite(spec.snr_db)) fail(ErrorCode::kInvalidArgument, "snr_db must be finite");
}

double band_energy(std::span<const double> x, int sample_rate_hz, double lo_hz, double hi_hz) {
  if (x.empty()) return 0.0;
  const std::size_t m = std::bit_ceil(x.size());
  std::vector<std::complex<double>> buf(m);
  std::copy(x.begin(), x.end(), buf.begin());
  fft_inplace(buf);
  const double df = static_cast<double>(sample_rate_hz) / static_cast<double>(m);
  double sum = 0.0;
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double f = k * df;
    if (f < lo_hz || f > hi_hz) continue;
    const double weight = (k == 0 || k == m / 2) ? 1.0 : 2.0;
    sum += weight * std::norm(buf[k]);
  }
  return sum / static_cast<double>(m);
}

SynthParts synth_upcall_parts(const UpcallSpec& spec, int sample_rate_hz, double clip_len_s,
                              Rng& rng) {
  validate(spec, clip_len_s);
  const std::size_t n = clip_samples(clip_len_s, sample_rate_hz);
  SynthParts parts;
  parts.signal.assign(n, 0.0);
  const std::size_t covered = add_sweep(parts.signal, spec.f_start_hz, spec.f_end_hz,
                                        spec.duration_s, spec.onset_s, spec.sweep_shape,
                                        spec.harmonic_level, sample_rate_hz);
  const double power =
      band_energy(parts.signal, sample_rate_hz, kCallBandLowHz, kCallBandHighHz) /
      static_cast<double>(covered);
  parts.noise = white(n, noise_sigma_for_snr(power, spec.snr_db, sample_rate_hz), rng);
  return parts;
}

AudioClip synth_upcall(const UpcallSpec& spec, int sample_rate_hz, double clip_len_s, Rng& rng) {
  const SynthParts parts = synth_upcall_parts(spec, sample_rate_hz, clip_len_s, rng);
  return mix(parts.signal, parts.noise, sample_rate_hz, Label::kPositive);
}

std::string_view to_string(NegativeKind kind) {
  switch (kind) {
    case NegativeKind::kWhite: return "white";
    case NegativeKind::kTonalVessel: return "tonal_vessel";
    case NegativeKind::kBroadbandTransient: return "broadband_transient";
    case NegativeKind::kDownsweepConfuser: return "downsweep_confuser";
  }
  return "white";
}

NegativeKind parse_negative_kind(std::string_view text) {
  for (NegativeKind k : {NegativeKind::kWhite, NegativeKind::kTonalVessel,
                         NegativeKind::kBroadbandTransient, NegativeKind::kDownsweepConfuser}) {
    if (to_string(k) == text) return k;
  }
  fail(ErrorCode::kInvalidArgument, "unknown negative kind '" + std::string(text) + "'");
}

NegativeSpec draw_negative_spec(NegativeKind kind, double clip_len_s, double snr_min_db,
                                double snr_max_db, Rng& rng) {
  NegativeSpec spec;
  spec.kind = kind;
  switch (kind) {
    case NegativeKind::kWhite:
      spec.noise_level = rng.uniform(0.02, 0.1);
      break;
    case NegativeKind::kTonalVessel:
      spec.f_start_hz = rng.uniform(40.0, 300.0);
      spec.f_end_hz = rng.uniform(40.0, 300.0);
      spec.snr_db = rng.uniform(snr_min_db, snr_max_db);
      break;
    case NegativeKind::kBroadbandTransient:
      spec.snr_db = rng.uniform(snr_min_db, snr_max_db);
      break;
    case NegativeKind::kDownsweepConfuser: {
      spec.f_start_hz = rng.uniform(160.0, 250.0);
      spec.f_end_hz = rng.uniform(70.0, 110.0);
      const double duration = rng.uniform(0.5, std::min(1.5, clip_len_s - 0.2));
      spec.duration_s = duration;
      spec.onset_s = rng.uniform(0.1, clip_len_s - duration - 0.1);
      spec.snr_db = rng.uniform(snr_min_db, snr_max_db);
      break;
    }
  }
  return spec;
}

AudioClip synth_negative(const NegativeSpec& spec, int sample_rate_hz, double clip_len_s,
                         Rng& rng) {
  const std::size_t n = clip_samples(clip_len_s, sample_rate_hz);
  std::vector<double> signal(n, 0.0);
  const double snr = spec.snr_db.value_or(10.0);

  switch (spec.kind) {
    case NegativeKind::kWhite:
      return mix(signal, white(n, spec.noise_level, rng), sample_rate_hz, Label::kNegative);

    case NegativeKind::kTonalVessel: {
      // One or two steady engine tones over the whole clip.
      const double f1 = spec.f_start_hz.value_or(100.0);
      const double f2 = spec.f_end_hz.value_or(f1);
      const double ph1 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double ph2 = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / sample_rate_hz;
        signal[i] = 0.3 * std::sin(2.0 * std::numbers::pi * f1 * t + ph1) +
                    0.2 * std::sin(2.0 * std::numbers::pi * f2 * t + ph2);
      }
      const double power = band_energy(signal, sample_rate_hz, kCallBandLowHz, kCallBandHighHz) /
                           static_cast<double>(n);
      return mix(signal, white(n, noise_sigma_for_snr(power, snr, sample_rate_hz), rng),
                 sample_rate_hz, Label::kNegative);
    }

    case NegativeKind::kBroadbandTransient: {
      const auto clicks = 3 + static_cast<std::size_t>(rng.uniform() * 6.0);
      const auto click_len = static_cast<std::size_t>(0.005 * sample_rate_hz);
      std::size_t covered = 0;
      for (std::size_t c = 0; c < clicks; ++c) {
        const auto at = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - click_len));
        const double amp = rng.uniform(0.3, 0.8);
        for (std::size_t i = 0; i < click_len; ++i) {
          signal[at + i] += amp * std::exp(-static_cast<double>(i) / (0.2 * click_len)) * rng.normal();
        }
        covered += click_len;
      }
      std::transform(signal.begin(), signal.end(), signal.begin(),
                     [](double v) { return std::clamp(v, -0.95, 0.95); });
      const double power = band_energy(signal, sample_rate_hz, kCallBandLowHz, kCallBandHighHz) /
                           static_cast<double>(covered);
      return mix(signal, white(n, noise_sigma_for_snr(power, snr, sample_rate_hz), rng),
                 sample_rate_hz, Label::kNegative);
    }

    case NegativeKind::kDownsweepConfuser: {
      const double duration = spec.duration_s.value_or(1.0);
      const std::size_t covered =
          add_sweep(signal, spec.f_start_hz.value_or(200.0), spec.f_end_hz.value_or(90.0),
                    duration, spec.onset_s.value_or(0.5), SweepShape::kLinear, 0.0,
                    sample_rate_hz);
      const double power = band_energy(signal, sample_rate_hz, kCallBandLowHz, kCallBandHighHz) /
                           static_cast<double>(covered);
      return mix(signal, white(n, noise_sigma_for_snr(power, snr, sample_rate_hz), rng),
                 sample_rate_hz, Label::kNegative);
    }
  }
  fail(ErrorCode::kInvalidArgument, "unknown negative kind");
}

AudioClip synth_negative(NegativeKind kind, int sample_rate_hz, double clip_len_s, Rng& rng) {
  const NegativeSpec spec = draw_negative_spec(kind, clip_len_s, 5.0, 20.0, rng);
  return synth_negative(spec, sample_rate_hz, clip_len_s, rng);
}

UpcallSpec draw_upcall_spec(double clip_len_s, double snr_min_db, double snr_max_db, Rng& rng) {
  UpcallSpec spec;
  spec.f_start_hz = rng.uniform(70.0, 110.0);
  spec.f_end_hz = rng.uniform(160.0, 250.0);
  spec.duration_s = rng.uniform(0.5, std::min(1.5, clip_len_s - 0.2));
  spec.onset_s = rng.uniform(0.1, clip_len_s - spec.duration_s - 0.1);
  spec.snr_db = rng.uniform(snr_min_db, snr_max_db);
  spec.harmonic_level = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 0.5);
  spec.sweep_shape = rng.uniform() < 0.7 ? SweepShape::kLinear : SweepShape::kQuadratic;
  return spec;
}

CorpusManifest make_corpus(const CorpusOptions& options, const std::filesystem::path& out_dir) {
  if (!(options.snr_min_db <= options.snr_max_db)) {
    fail(ErrorCode::kInvalidArgument, "snr_min_db must not exceed snr_max_db");
  }
  if (options.clip_len_s < 0.7) {
    fail(ErrorCode::kInvalidArgument, "clip_len_s must be at least 0.7 s");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  static constexpr NegativeKind kKinds[] = {
      NegativeKind::kWhite, NegativeKind::kTonalVessel, NegativeKind::kBroadbandTransient,
      NegativeKind::kDownsweepConfuser};

  CorpusManifest manifest;
  const std::size_t total = options.n_pos + options.n_neg;
  std::size_t pos_done = 0;
  std::size_t neg_done = 0;
  for (std::size_t i = 0; i < total; ++i) {
    // Bresenham-style interleave keeps every prefix close to the target ratio.
    const bool positive = neg_done == options.n_neg ||
                          (pos_done < options.n_pos && pos_done * total <= i * options.n_pos);
    ManifestRow row;
    row.filename = [&] {
      char buf[32];
      std::snprintf(buf, sizeof buf, "clip_%05zu.wav", i);
      return std::string(buf);
    }();
    row.seed = derive_seed(options.seed, static_cast<std::uint64_t>(i));
    Rng rng(row.seed);

    AudioClip clip;
    if (positive) {
      const UpcallSpec spec =
          draw_upcall_spec(options.clip_len_s, options.snr_min_db, options.snr_max_db, rng);
      clip = synth_upcall(spec, options.sample_rate_hz, options.clip_len_s, rng);
      row.label = Label::kPositive;
      row.f_start = spec.f_start_hz;
      row.f_end = spec.f_end_hz;
      row.duration = spec.duration_s;
      row.onset = spec.onset_s;
      row.snr_db = spec.snr_db;
      row.kind = spec.sweep_shape == SweepShape::kLinear ? "upcall_linear" : "upcall_quadratic";
      ++pos_done;
    } else {
      const NegativeKind kind = kKinds[neg_done % std::size(kKinds)];
      const NegativeSpec spec = draw_negative_spec(kind, options.clip_len_s, options.snr_min_db,
                                                   options.snr_max_db, rng);
      clip = synth_negative(spec, options.sample_rate_hz, options.clip_len_s, rng);
      row.label = Label::kNegative;
      row.f_start = spec.f_start_hz;
      row.f_end = spec.f_end_hz;
      row.duration = spec.duration_s;
      row.onset = spec.onset_s;
      row.snr_db = spec.snr_db;
      row.kind = std::string(to_string(kind));
      ++neg_done;
    }
    write_wav(clip, out_dir / row.filename);
    manifest.rows.push_back(std::move(row));
  }
  write_manifest(manifest, out_dir / kManifestFileName);
  return manifest;
}

std::string manifest_to_csv(const CorpusManifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const ManifestRow& r : manifest.rows) {
    out += r.filename + ',' + std::string(to_string(r.label)) + ',' + format_field(r.f_start) +
           ',' + format_field(r.f_end) + ',' + format_field(r.duration) + ',' +
           format_field(r.onset) + ',' + format_field(r.snr_db) + ',' + r.kind + ',' +
           std::to_string(r.seed) + '\n';
  }
  return out;
}

CorpusManifest manifest_from_csv(std::string_view text) {
  CorpusManifest manifest;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header) {
      if (line != kManifestHeader) {
        fail(ErrorCode::kInvalidArgument, "manifest header mismatch");
      }
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 9) fail(ErrorCode::kInvalidArgument, "manifest row needs 9 fields");
    ManifestRow row;
    row.filename = fields[0];
    row.label = parse_label(fields[1]);
    row.f_start = parse_optional(fields[2]);
    row.f_end = parse_optional(fields[3]);
    row.duration = parse_optional(fields[4]);
    row.onset = parse_optional(fields[5]);
    row.snr_db = parse_optional(fields[6]);
    row.kind = fields[7];
    if (!fields[8].empty()) {
      const auto [ptr, ec] =
          std::from_chars(fields[8].data(), fields[8].data() + fields[8].size(), row.seed);
      if (ec != std::errc{}) fail(ErrorCode::kInvalidArgument, "bad seed in manifest");
    }
    manifest.rows.push_back(std::move(row));
  }
  if (header) fail(ErrorCode::kInvalidArgument, "manifest is empty");
  return manifest;
}

void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  out << manifest_to_csv(manifest);
  if (!out) fail(ErrorCode::kIoFailure, "write error on " + path.string());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoFailure, "cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return manifest_from_csv(text);
}

}  // namespace upcall
