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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "dopplive/error.hpp"
#include "dopplive/features.hpp"
#include "dopplive/matching.hpp"
#include "dopplive/sim.hpp"
#include "support.hpp"

using namespace dopplive;
using Catch::Approx;

namespace {

constexpr double kF0 = 20000.0;

ReflectorSpec constant_reflector(double v, double angle_deg, double duration,
                                 double reflectivity = 1.0, double distance = 0.5) {
  ReflectorSpec r;
  r.angle_deg = angle_deg;
  r.distance_m = distance;
  r.reflectivity = reflectivity;
  r.speed_profile.segments.push_back({0.0, duration + 1.0, v, v});
  return r;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

DopplerSlice normalized_from(const AudioBuffer& audio, double start, double end,
                             double exclusion = 0.0) {
  return normalize_energy(testing::probe_slice(audio, kF0, start, end, exclusion));
}

}  // namespace

TEST_CASE("constant-speed reflector yields the analytic peak offset", "[features]") {
  const double duration = 1.0;
  const AudioBuffer echo =
      render_reflector(constant_reflector(0.1, 0.0, duration), kF0, duration, 48000.0);
  const DopplerSlice slice = testing::probe_slice(echo, kF0, 0.35, 0.65);
  const double expected = 0.1 * kF0 / kSpeedOfSound;
  CHECK(expected == Approx(5.83).margin(0.01));
  REQUIRE(slice.frame_count > 0);
  for (double got : dominant_offsets(slice)) CHECK(std::abs(got - expected) <= slice.bin_width_hz);
}

TEST_CASE("stationary scene peaks on the carrier", "[features]") {
  const AudioBuffer carrier = generate_probe(48000.0, kF0, 1.0, 0.5);
  const DopplerSlice slice = testing::probe_slice(carrier, kF0, 0.3, 0.7);
  for (double got : dominant_offsets(slice)) CHECK(std::abs(got) <= slice.bin_width_hz);
}

TEST_CASE("approach and recession give opposite signs, doubling speed doubles the shift",
          "[features]") {
  const double duration = 1.0;
  for (double v : {0.05, 0.1}) {
    const auto toward = render_reflector(constant_reflector(v, 0.0, duration), kF0, duration, 48000.0);
    const auto away = render_reflector(constant_reflector(-v, 0.0, duration), kF0, duration, 48000.0);
    const auto twice =
        render_reflector(constant_reflector(2 * v, 0.0, duration), kF0, duration, 48000.0);
    const double a = median(dominant_offsets(testing::probe_slice(toward, kF0, 0.3, 0.7)));
    const double b = median(dominant_offsets(testing::probe_slice(away, kF0, 0.3, 0.7)));
    const double c = median(dominant_offsets(testing::probe_slice(twice, kF0, 0.3, 0.7)));
    CHECK(a > 0.0);
    CHECK(b < 0.0);
    CHECK(std::abs(c - 2 * a) <= 1.0);
  }
}

TEST_CASE("frames are assigned by window centre", "[features]") {
  const AudioBuffer x = generate_probe(48000.0, kF0, 1.0, 0.5);
  StftOptions opts;
  opts.min_freq_hz = kF0 - 200;
  opts.max_freq_hz = kF0 + 200;
  const Spectrogram spec = stft(x, opts);
  const SegmentedUtterance utt{{{"a", 0.2, 0.45}, {"b", 0.45, 0.7}},
                               SegmentSource::kExternalAlignment, 1.0};
  const auto ex = extract_doppler(spec, utt, kF0);
  REQUIRE(ex.slices.size() == 2);
  CHECK(ex.dropped.empty());
  const auto a = static_cast<long>(ex.slices[0].frame_count);
  const auto b = static_cast<long>(ex.slices[1].frame_count);
  CHECK(std::abs(a - b) <= 1);
  // Enumerate the centres directly.
  long count_a = 0;
  for (std::size_t k = 0; k < spec.frame_count(); ++k) {
    const double c = 0.125 + 0.01 * k;
    if (c >= 0.2 && c < 0.45) ++count_a;
  }
  CHECK(a == count_a);
  CHECK(ex.slices[0].bin_count == 401);
  CHECK(ex.slices[0].offset_hz(200) == Approx(0.0).margin(1e-9));
}

TEST_CASE("phonemes without a frame centre are dropped with a record", "[features]") {
  const AudioBuffer x = generate_probe(48000.0, kF0, 1.0, 0.5);
  StftOptions opts;
  opts.min_freq_hz = kF0 - 200;
  opts.max_freq_hz = kF0 + 200;
  const Spectrogram spec = stft(x, opts);
  const SegmentedUtterance utt{{{"a", 0.2, 0.4}, {"t", 0.4005, 0.4045}},
                               SegmentSource::kExternalAlignment, 1.0};
  const auto ex = extract_doppler(spec, utt, kF0);
  CHECK(ex.slices.size() == 1);
  REQUIRE(ex.dropped.size() == 1);
  CHECK(ex.dropped[0].segment.label == "t");
}

TEST_CASE("normalize_energy affine map", "[features]") {
  DopplerSlice s = testing::manual_slice(1, 10.0, 3);
  s.normalized_energy = false;
  s.magnitudes = {2.0, 4.0, 6.0};
  const DopplerSlice n = normalize_energy(s);
  CHECK(n.normalized_energy);
  CHECK(n.magnitudes == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(normalize_energy(n).magnitudes == n.magnitudes);

  s.magnitudes = {3.0, 3.0, 3.0};
  try {
    normalize_energy(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateInput);
  }
}

TEST_CASE("normalize_energy ignores the carrier bins", "[features]") {
  DopplerSlice s = testing::manual_slice(1, -3.0, 7);
  s.normalized_energy = false;
  s.carrier_exclusion_hz = 2.0;
  s.magnitudes = {1.0, 50.0, 90.0, 100.0, 80.0, 3.0, 5.0};
  const DopplerSlice n = normalize_energy(s);
  CHECK(n.magnitudes == std::vector<double>{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
}

TEST_CASE("normalize_length identity and linear ramps", "[features]") {
  std::mt19937_64 rng(2);
  DopplerSlice s = testing::manual_slice(10, -2.0, 5);
  s.magnitudes = testing::random_vector(rng, 50, 0.0, 1.0);
  const DopplerSlice same = normalize_length(s, 10);
  CHECK(same.magnitudes == s.magnitudes);
  CHECK(same.normalized_length);

  DopplerSlice ramp = testing::manual_slice(4, 0.0, 3);
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t b = 0; b < 3; ++b) ramp.at(f, b) = 0.1 * f + 0.2 * b;
  }
  const DopplerSlice r = normalize_length(ramp, 7);
  REQUIRE(r.frame_count == 7);
  for (std::size_t f = 0; f < 7; ++f) {
    for (std::size_t b = 0; b < 3; ++b) {
      CHECK(r.at(f, b) == Approx(0.1 * 3.0 * f / 6.0 + 0.2 * b).margin(1e-9));
    }
  }
  CHECK_THROWS_AS(normalize_length(testing::manual_slice(1, 0.0, 3), 5), Error);
  CHECK_THROWS_AS(normalize_length(ramp, 1), Error);
}

TEST_CASE("halving the frame count barely changes the contours", "[features]") {
  // Broad peak sweeping slowly across the band gives smooth contours.
  DopplerSlice full = testing::manual_slice(30, -200.0, 401);
  for (std::size_t f = 0; f < 30; ++f) {
    const double centre = -120.0 + 8.0 * f;
    for (std::size_t b = 0; b < 401; ++b) {
      const double d = (full.offset_hz(b) - centre) / 25.0;
      full.at(f, b) = std::exp(-0.5 * d * d);
    }
  }
  const DopplerSlice half = normalize_length(full, 15);
  const ContourSet a = build_contour_set({full});
  const ContourSet b = build_contour_set({half}).resampled({30});
  std::size_t checked = 0;
  for (std::size_t c = 0; c < kContourCount; ++c) {
    try {
      CHECK(pearson(a.contour(c), b.contour(c)) >= 0.99);
      ++checked;
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUndefinedCorrelation);
    }
  }
  CHECK(checked >= 8);
}

TEST_CASE("energy-band centroid arithmetic", "[features]") {
  DopplerSlice s = testing::manual_slice(1, -50.0, 101);
  s.at(0, 80) = 0.8;  // +30 Hz
  const auto eb = energy_band_contours(s);
  CHECK(eb[2][0] == 30.0);
  for (std::size_t i : {0, 1, 3, 4, 5}) CHECK(eb[i][0] == 0.0);

  DopplerSlice t = testing::manual_slice(1, -50.0, 101);
  t.at(0, 70) = 0.96;  // +20 Hz
  t.at(0, 90) = 0.98;  // +40 Hz
  const auto eb2 = energy_band_contours(t);
  CHECK(eb2[4][0] == Approx((20 * 0.96 + 40 * 0.98) / (0.96 + 0.98)).epsilon(1e-12));
  CHECK(eb2[4][0] == Approx(30.1).margin(0.05));

  // Negative offsets feed the even bands; gaps between levels feed none.
  DopplerSlice u = testing::manual_slice(1, -50.0, 101);
  u.at(0, 10) = 0.5;   // -40 Hz
  u.at(0, 60) = 0.92;  // +10 Hz, in the 0.9..0.95 gap
  const auto eb3 = energy_band_contours(u);
  CHECK(eb3[1][0] == -40.0);
  for (std::size_t i : {0, 2, 3, 4, 5}) CHECK(eb3[i][0] == 0.0);
}

TEST_CASE("energy-band contours require normalized slices", "[features]") {
  DopplerSlice s = testing::manual_slice(1, 0.0, 3);
  s.normalized_energy = false;
  CHECK_THROWS_AS(energy_band_contours(s), Error);
  CHECK_THROWS_AS(freq_band_energy_contours(s), Error);
}

TEST_CASE("frequency-band energy means", "[features]") {
  const DopplerSlice uniform = testing::manual_slice(3, -200.0, 401, 0.5);
  for (const auto& contour : freq_band_energy_contours(uniform)) {
    for (double v : contour) CHECK(v == Approx(0.5).epsilon(1e-12));
  }
  DopplerSlice carrier = testing::manual_slice(1, -200.0, 401);
  carrier.at(0, 200) = 1.0;
  const auto fb = freq_band_energy_contours(carrier);
  CHECK(fb[2][0] > 0.0);
  for (std::size_t i : {0, 1, 3, 4}) CHECK(fb[i][0] == 0.0);

  // Edges: +50 Hz belongs to fb2 (lower-inclusive), -50 Hz to fb3.
  DopplerSlice edges = testing::manual_slice(1, -200.0, 401);
  edges.at(0, 250) = 1.0;
  edges.at(0, 150) = 1.0;
  const auto fe = freq_band_energy_contours(edges);
  CHECK(fe[1][0] == Approx(1.0 / 50));
  CHECK(fe[2][0] == Approx(1.0 / 100));
  CHECK(fe[3][0] == 0.0);
}

TEST_CASE("fast reflector lands in an outer frequency band", "[features]") {
  // k = 3 reaches a 150 Hz shift within the 1 m/s articulator limit.
  RenderOptions ropts;
  ropts.doppler_factor_k = 3.0;
  const double v = 150.0 * kSpeedOfSound / (3.0 * kF0);
  const AudioBuffer echo = render_reflector(constant_reflector(v, 0.0, 1.0), kF0, 1.0, 48000.0, ropts);
  const DopplerSlice slice = normalized_from(echo, 0.3, 0.6);
  const auto fb = freq_band_energy_contours(slice);
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    for (std::size_t i = 1; i < kFreqBandCount; ++i) CHECK(fb[0][f] > fb[i][f]);
  }
}

TEST_CASE("energy levels track reflectors of distinct strength", "[features]") {
  // Strong reflector approaching, weaker one receding: the top level follows
  // the strong one on the positive side, the middle level the weak one on the
  // negative side.
  const double duration = 1.0;
  const double fs = 48000.0;
  // Far away so that the path loss barely changes during the phoneme.
  const ReflectorSpec strong = constant_reflector(0.15, 0.0, duration, 1.0, 5.0);
  const ReflectorSpec weak = constant_reflector(-0.12, 0.0, duration, 0.8, 5.0);
  auto x = render_reflector(strong, kF0, duration, fs).channels()[0];
  const auto y = render_reflector(weak, kF0, duration, fs).samples();
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
  const DopplerSlice slice = normalized_from(AudioBuffer::mono(fs, x), 0.3, 0.6);
  const auto eb = energy_band_contours(slice);
  const double strong_hz = 0.15 * kF0 / kSpeedOfSound;
  const double weak_hz = -0.12 * kF0 / kSpeedOfSound;
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    CHECK(std::abs(eb[4][f] - strong_hz) <= 2.0);
    CHECK(std::abs(eb[3][f] - weak_hz) <= 2.0);
  }
}

TEST_CASE("contour set concatenation", "[features]") {
  std::mt19937_64 rng(8);
  DopplerSlice a = testing::manual_slice(10, -200.0, 401);
  DopplerSlice b = testing::manual_slice(15, -200.0, 401);
  a.magnitudes = testing::random_vector(rng, a.magnitudes.size(), 0.0, 1.0);
  b.magnitudes = testing::random_vector(rng, b.magnitudes.size(), 0.0, 1.0);
  const ContourSet ab = build_contour_set({a, b});
  CHECK(ab.frames_per_phoneme == std::vector<std::size_t>{10, 15});
  for (std::size_t c = 0; c < kContourCount; ++c) CHECK(ab.contour(c).size() == 25);
  ab.validate();

  const ContourSet only_a = build_contour_set({a});
  CHECK(ab.block(0).energy_band_freq == only_a.energy_band_freq);
  CHECK(ab.block(0).freq_band_energy == only_a.freq_band_energy);

  const ContourSet ba = build_contour_set({b, a});
  for (std::size_t c = 0; c < kContourCount; ++c) {
    std::vector<double> swapped(ba.contour(c).begin() + 15, ba.contour(c).end());
    swapped.insert(swapped.end(), ba.contour(c).begin(), ba.contour(c).begin() + 15);
    CHECK(swapped == ab.contour(c));
  }
  CHECK_THROWS_AS(build_contour_set({}), Error);
}

TEST_CASE("contour value ranges", "[features]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    DopplerSlice s = testing::manual_slice(8, -200.0, 401);
    s.magnitudes = testing::random_vector(rng, s.magnitudes.size(), 0.0, 1.0);
    const ContourSet cs = build_contour_set({s});
    for (std::size_t c = 0; c < kEnergyBandCount; ++c) {
      for (double v : cs.contour(c)) CHECK((v >= -200.0 && v <= 200.0));
    }
    for (std::size_t c = kEnergyBandCount; c < kContourCount; ++c) {
      for (double v : cs.contour(c)) CHECK((v >= 0.0 && v <= 1.0));
    }
  }
}

TEST_CASE("contour set json round trip", "[features]") {
  std::mt19937_64 rng(21);
  DopplerSlice s = testing::manual_slice(9, -200.0, 401);
  s.magnitudes = testing::random_vector(rng, s.magnitudes.size(), 0.0, 1.0);
  const ContourSet cs = build_contour_set({s, s});
  const std::string json = contour_set_to_json(cs);
  CHECK(json.find("\"eb1\"") != std::string::npos);
  CHECK(json.find("\"fb5\"") != std::string::npos);
  const ContourSet back = contour_set_from_json(json);
  CHECK(back.frames_per_phoneme == cs.frames_per_phoneme);
  for (std::size_t c = 0; c < kContourCount; ++c) CHECK(back.contour(c) == cs.contour(c));
  CHECK_THROWS_AS(contour_set_from_json("{\"version\": 99}"), Error);
  CHECK(std::string(ContourSet::contour_name(0)) == "eb1");
  CHECK(std::string(ContourSet::contour_name(10)) == "fb5");
}
