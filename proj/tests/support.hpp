// Copyright 2026 The dopplive Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the unit tests.

#ifndef DOPPLIVE_TESTS_SUPPORT_HPP_
#define DOPPLIVE_TESTS_SUPPORT_HPP_

#include <stdlib.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dopplive/beamform.hpp"
#include "dopplive/features.hpp"
#include "dopplive/signal.hpp"

namespace testing {

inline constexpr double kPi = std::numbers::pi;

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "dopplive-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<double> sine(double fs, double f, std::size_t n, double amp = 1.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * kPi * f * i / fs + phase);
  return x;
}

// Amplitude of the component at f over x[first, first + count), by direct
// correlation with a complex exponential.
inline double tone_amplitude(std::span<const double> x, double fs, double f, std::size_t first,
                             std::size_t count) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = first; i < first + count; ++i) {
    acc += x[i] * std::polar(1.0, -2 * kPi * f * i / fs);
  }
  return 2.0 * std::abs(acc) / static_cast<double>(count);
}

// Direct O(n) evaluation of one DFT bin of an n-point sequence.
inline std::complex<double> dft_bin(std::span<const double> x, std::size_t n, std::size_t k) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i] * std::polar(1.0, -2 * kPi * static_cast<double>(k * i % n) / n);
  }
  return acc;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

// Probe-band slice of `audio` over [start_s, end_s), unnormalized.
inline dopplive::DopplerSlice probe_slice(const dopplive::AudioBuffer& audio, double f0,
                                          double start_s, double end_s,
                                          double carrier_exclusion_hz = 0.0,
                                          std::string label = "x") {
  dopplive::StftOptions opts;
  opts.min_freq_hz = f0 - dopplive::kProbeHalfBandHz;
  opts.max_freq_hz = f0 + dopplive::kProbeHalfBandHz;
  const dopplive::Spectrogram spec = dopplive::stft(audio, opts);
  dopplive::FeatureOptions fopts;
  fopts.carrier_exclusion_hz = carrier_exclusion_hz;
  const dopplive::SegmentedUtterance utt{{{std::move(label), start_s, end_s}},
                                         dopplive::SegmentSource::kExternalAlignment,
                                         audio.duration_seconds()};
  return dopplive::extract_doppler(spec, utt, f0, fopts).slices.at(0);
}

// Plane wave sampled at each microphone, with arrival delays computed from
// first principles: a mic displaced along the arrival direction hears the
// wavefront earlier by (u . p) / c.
inline dopplive::AudioBuffer plane_wave(const dopplive::ArrayGeometry& g, double azimuth_deg,
                                        double elevation_deg, double f, double amp,
                                        std::size_t n, double fs) {
  const double az = azimuth_deg * kPi / 180.0;
  const double el = elevation_deg * kPi / 180.0;
  const double u[3] = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
  std::vector<std::vector<double>> channels;
  for (const auto& p : g.mic_positions) {
    const double lead = (u[0] * (p[0] - g.mic_positions[0][0]) +
                         u[1] * (p[1] - g.mic_positions[0][1]) +
                         u[2] * (p[2] - g.mic_positions[0][2])) /
                        g.speed_of_sound;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * kPi * f * (i / fs + lead));
    channels.push_back(std::move(x));
  }
  return dopplive::AudioBuffer(fs, std::move(channels));
}

// Tone-to-residual power ratio in dB at f over the central 80% of x.
inline double tone_snr_db(std::span<const double> x, double fs, double f) {
  const std::size_t first = x.size() / 10;
  const std::size_t count = x.size() - 2 * first;
  const double a = tone_amplitude(x, fs, f, first, count);
  double total = 0.0;
  for (std::size_t i = first; i < first + count; ++i) total += x[i] * x[i];
  total /= static_cast<double>(count);
  const double tone = 0.5 * a * a;
  return 10.0 * std::log10(tone / (total - tone));
}

// Hand-built normalized slice with the given per-bin offsets.
inline dopplive::DopplerSlice manual_slice(std::size_t frames, double first_offset,
                                           std::size_t bins, double fill = 0.0) {
  dopplive::DopplerSlice s;
  s.frame_count = frames;
  s.bin_count = bins;
  s.magnitudes.assign(frames * bins, fill);
  s.first_offset_hz = first_offset;
  s.bin_width_hz = 1.0;
  s.carrier_exclusion_hz = 0.0;
  s.normalized_energy = true;
  return s;
}

}  // namespace testing

#endif  // DOPPLIVE_TESTS_SUPPORT_HPP_
