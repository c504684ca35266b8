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

#include <cmath>
#include <random>

#include "dopplive/beamform.hpp"
#include "dopplive/error.hpp"
#include "dopplive/sim.hpp"
#include "support.hpp"

using namespace dopplive;
using Catch::Approx;

namespace {

constexpr double kFs = 48000.0;

std::vector<std::vector<double>> noise_channels(std::size_t m, std::size_t n, double sigma,
                                                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<std::vector<double>> out(m, std::vector<double>(n));
  for (auto& ch : out) {
    for (double& v : ch) v = g(rng);
  }
  return out;
}

double mean_power(std::span<const double> x) { return testing::energy(x) / x.size(); }

}  // namespace

TEST_CASE("tdoa geometry", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular(0.043);
  REQUIRE(g.mic_positions.size() == 7);
  const auto d = tdoa(g, {0.0, 0.0});
  CHECK(d[0] == 0.0);
  CHECK(d[1] == Approx(-0.043 / 343.0).epsilon(1e-12));
  // Mic 1 sits on +x: a wave from +y is broadside to it.
  CHECK(tdoa(g, {90.0, 0.0})[1] == Approx(0.0).margin(1e-15));
  // Overhead arrival reaches the planar array all at once.
  for (double v : tdoa(g, {37.0, 90.0})) CHECK(v == Approx(0.0).margin(1e-15));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> az(0.0, 360.0), el(0.0, 90.0);
  for (int i = 0; i < 50; ++i) CHECK(tdoa(g, {az(rng), el(rng)})[0] == 0.0);
}

TEST_CASE("geometry validation", "[beamform]") {
  ArrayGeometry g;
  g.mic_positions = {{0, 0, 0}};
  CHECK_THROWS_AS(g.validate(), Error);
  g.mic_positions = {{0, 0, 0}, {0, 0, 0}};
  CHECK_THROWS_AS(g.validate(), Error);
  CHECK_THROWS_AS(ArrayGeometry::circular(-1.0), Error);
}

TEST_CASE("zero delays give the input back", "[beamform]") {
  std::mt19937_64 rng(2);
  const auto x = testing::random_vector(rng, 4801);
  const ArrayGeometry g = ArrayGeometry::circular();
  const AudioBuffer in(kFs, std::vector<std::vector<double>>(7, x));
  const AudioBuffer out = delay_and_sum(in, g, {0.0, 90.0});
  REQUIRE(out.channel_count() == 1);
  REQUIRE(out.length() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out.samples()[i] == Approx(x[i]).margin(1e-6));
}

TEST_CASE("plane wave steering", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const std::size_t n = 24000;
  for (double az : {0.0, 45.0, 130.0, 270.0}) {
    const AudioBuffer in = testing::plane_wave(g, az, 0.0, 20000.0, 0.8, n, kFs);
    const auto single = testing::tone_amplitude(in.channel(0), kFs, 20000.0, 2400, 19200);
    const AudioBuffer on = delay_and_sum(in, g, {az, 0.0});
    const AudioBuffer off = delay_and_sum(in, g, {std::fmod(az + 90.0, 360.0), 0.0});
    const double a_on = testing::tone_amplitude(on.samples(), kFs, 20000.0, 2400, 19200);
    const double a_off = testing::tone_amplitude(off.samples(), kFs, 20000.0, 2400, 19200);
    CHECK(a_on == Approx(single).epsilon(0.01));
    CHECK(a_off < 0.7 * a_on);
  }
}

TEST_CASE("incoherent noise averages down", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const auto ch = noise_channels(7, 48000, 1.0, 3);
  double single = 0.0;
  for (const auto& c : ch) single += mean_power(c);
  single /= 7.0;
  const AudioBuffer out = delay_and_sum(AudioBuffer(kFs, ch), g, {20.0, 10.0});
  CHECK(mean_power(out.samples()) == Approx(single / 7.0).epsilon(0.10));
}

TEST_CASE("coherent tone gains about 8.45 dB of SNR", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  for (std::uint64_t seed : {4u, 5u, 6u}) {
    const SteeringDirection dir{60.0, 20.0};
    const AudioBuffer in = render_plane_wave(g, dir, 20000.0, 0.1, 1.0, kFs, 0.3, seed);
    const double before = testing::tone_snr_db(in.channel(0), kFs, 20000.0);
    const double after = testing::tone_snr_db(delay_and_sum(in, g, dir).samples(), kFs, 20000.0);
    CHECK(after - before == Approx(10.0 * std::log10(7.0)).margin(1.0));
  }
}

TEST_CASE("rendered plane waves match the first-principles rendering", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const AudioBuffer a = render_plane_wave(g, {75.0, 30.0}, 20000.0, 0.5, 0.1, kFs, 0.0, 1);
  const AudioBuffer b = testing::plane_wave(g, 75.0, 30.0, 20000.0, 0.5, a.length(), kFs);
  for (std::size_t m = 0; m < 7; ++m) {
    for (std::size_t i = 0; i < a.length(); i += 17) {
      CHECK(a.channel(m)[i] == Approx(b.channel(m)[i]).margin(1e-9));
    }
  }
}

TEST_CASE("delay and sum is linear", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const auto x = noise_channels(7, 5000, 1.0, 7);
  const auto y = noise_channels(7, 5000, 2.0, 8);
  auto sum = x;
  for (std::size_t m = 0; m < 7; ++m) {
    for (std::size_t i = 0; i < 5000; ++i) sum[m][i] += y[m][i];
  }
  const SteeringDirection dir{123.0, 40.0};
  const auto a = delay_and_sum(AudioBuffer(kFs, x), g, dir);
  const auto b = delay_and_sum(AudioBuffer(kFs, y), g, dir);
  const auto s = delay_and_sum(AudioBuffer(kFs, sum), g, dir);
  for (std::size_t i = 0; i < 5000; ++i) {
    CHECK(s.samples()[i] == Approx(a.samples()[i] + b.samples()[i]).margin(1e-9));
  }
}

TEST_CASE("true direction maximizes steered power", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  for (const SteeringDirection truth :
       {SteeringDirection{0.0, 0.0}, SteeringDirection{35.0, 15.0}, SteeringDirection{210.0, 45.0},
        SteeringDirection{300.0, 70.0}}) {
    const AudioBuffer in = render_plane_wave(g, truth, 20000.0, 0.5, 0.1, kFs, 0.0, 1);
    const auto found = search_direction(in, g, 5.0);
    CHECK(found.direction.azimuth_deg == Approx(truth.azimuth_deg).margin(1e-9));
    CHECK(found.direction.elevation_deg == Approx(truth.elevation_deg).margin(1e-9));
    const auto p = steered_power(in, g, {truth});
    CHECK(p[0] == Approx(found.power).epsilon(1e-9));
  }
}

TEST_CASE("steered power matches the time-domain output", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const AudioBuffer in(kFs, noise_channels(7, 3000, 1.0, 9));
  const std::vector<SteeringDirection> dirs{{0, 0}, {100, 20}, {250, 80}};
  const auto p = steered_power(in, g, dirs);
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    CHECK(p[i] == Approx(mean_power(delay_and_sum(in, g, dirs[i]).samples())).epsilon(0.01));
  }
}

TEST_CASE("channel count must match the geometry", "[beamform]") {
  const ArrayGeometry g = ArrayGeometry::circular();
  const AudioBuffer in(kFs, noise_channels(4, 100, 1.0, 1));
  try {
    delay_and_sum(in, g, {0, 0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("geometry json round trip", "[beamform]") {
  testing::TempDir dir;
  const ArrayGeometry g = ArrayGeometry::circular(0.43, 4);
  save_geometry(dir / "g.json", g);
  const ArrayGeometry back = load_geometry(dir / "g.json");
  CHECK(back.speed_of_sound == g.speed_of_sound);
  REQUIRE(back.mic_positions.size() == 5);
  for (std::size_t m = 0; m < 5; ++m) CHECK(back.mic_positions[m] == g.mic_positions[m]);
  CHECK_THROWS_AS(load_geometry(dir / "missing.json"), Error);
}
