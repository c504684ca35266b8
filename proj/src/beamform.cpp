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

#include "dopplive/beamform.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dopplive/error.hpp"
#include "dopplive/fft.hpp"
#include "json.hpp"

namespace dopplive {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void check_channels(const AudioBuffer& channels, const ArrayGeometry& geometry) {
  geometry.validate();
  if (channels.channel_count() != geometry.mic_positions.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "buffer has " + std::to_string(channels.channel_count()) +
                    " channels but the geometry has " +
                    std::to_string(geometry.mic_positions.size()) + " microphones");
  }
}

// Channel spectra, zero-padded so that the largest possible shift does not
// wrap around.
struct ChannelSpectra {
  std::size_t fft_size = 0;
  std::vector<std::vector<std::complex<double>>> spectra;
};

ChannelSpectra transform_channels(const AudioBuffer& channels, const ArrayGeometry& geometry) {
  double aperture = 0.0;
  for (const auto& p : geometry.mic_positions) {
    for (const auto& q : geometry.mic_positions) {
      const Vec3 d{p[0] - q[0], p[1] - q[1], p[2] - q[2]};
      aperture = std::max(aperture, std::sqrt(dot(d, d)));
    }
  }
  const auto pad = static_cast<std::size_t>(
      std::ceil(aperture / geometry.speed_of_sound * channels.sample_rate())) + 16;
  ChannelSpectra out;
  out.fft_size = channels.length() + pad;
  out.fft_size += out.fft_size % 2;
  RealFft fft(out.fft_size);
  for (std::size_t c = 0; c < channels.channel_count(); ++c) {
    std::vector<std::complex<double>> spectrum(fft.spectrum_size());
    fft.forward(channels.channel(c), spectrum);
    out.spectra.push_back(std::move(spectrum));
  }
  return out;
}

// Sum of phase-advanced channel spectra.
std::vector<std::complex<double>> steer(const ChannelSpectra& in, const std::vector<double>& delays,
                                        double sample_rate) {
  const std::size_t bins = in.fft_size / 2 + 1;
  std::vector<std::complex<double>> sum(bins);
  for (std::size_t c = 0; c < in.spectra.size(); ++c) {
    const double step = 2.0 * std::numbers::pi * sample_rate / in.fft_size * delays[c];
    for (std::size_t k = 0; k < bins; ++k) {
      const double phase = step * static_cast<double>(k);
      if (k == in.fft_size / 2) {
        // The Nyquist bin must stay real.
        sum[k] += in.spectra[c][k] * std::cos(phase);
      } else {
        sum[k] += in.spectra[c][k] * std::polar(1.0, phase);
      }
    }
  }
  return sum;
}

}  // namespace

ArrayGeometry ArrayGeometry::circular(double radius, int ring_count) {
  if (!(radius > 0.0) || ring_count < 1) {
    throw Error(ErrorKind::kInvalidArgument, "circular array needs a positive radius and ring");
  }
  ArrayGeometry g;
  g.mic_positions.push_back({0.0, 0.0, 0.0});
  for (int m = 0; m < ring_count; ++m) {
    const double phi = 2.0 * std::numbers::pi * m / ring_count;
    g.mic_positions.push_back({radius * std::cos(phi), radius * std::sin(phi), 0.0});
  }
  return g;
}

void ArrayGeometry::validate() const {
  if (mic_positions.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "an array needs at least two microphones");
  }
  if (!(speed_of_sound > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "speed of sound must be positive");
  }
  for (std::size_t i = 0; i < mic_positions.size(); ++i) {
    for (std::size_t j = i + 1; j < mic_positions.size(); ++j) {
      if (mic_positions[i] == mic_positions[j]) {
        throw Error(ErrorKind::kInvalidArgument, "microphone positions must be distinct");
      }
    }
  }
}

void SteeringDirection::validate() const {
  if (!(azimuth_deg >= 0.0 && azimuth_deg < 360.0)) {
    throw Error(ErrorKind::kRange, "azimuth must lie in [0, 360)");
  }
  if (!(elevation_deg >= -90.0 && elevation_deg <= 90.0)) {
    throw Error(ErrorKind::kRange, "elevation must lie in [-90, 90]");
  }
}

Vec3 SteeringDirection::unit_vector() const {
  const double az = azimuth_deg * kDegToRad;
  const double el = elevation_deg * kDegToRad;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

std::vector<double> tdoa(const ArrayGeometry& geometry, const SteeringDirection& direction) {
  geometry.validate();
  direction.validate();
  const Vec3 u = direction.unit_vector();
  const Vec3& ref = geometry.mic_positions.front();
  std::vector<double> delays;
  delays.reserve(geometry.mic_positions.size());
  for (const auto& p : geometry.mic_positions) {
    const Vec3 rel{p[0] - ref[0], p[1] - ref[1], p[2] - ref[2]};
    delays.push_back(-dot(u, rel) / geometry.speed_of_sound);
  }
  delays.front() = 0.0;
  return delays;
}

AudioBuffer delay_and_sum(const AudioBuffer& channels, const ArrayGeometry& geometry,
                          const SteeringDirection& direction) {
  check_channels(channels, geometry);
  const auto delays = tdoa(geometry, direction);
  const ChannelSpectra spectra = transform_channels(channels, geometry);
  const auto sum = steer(spectra, delays, channels.sample_rate());

  RealFft fft(spectra.fft_size);
  std::vector<double> time(spectra.fft_size);
  fft.inverse(sum, time);
  const double scale =
      1.0 / (static_cast<double>(spectra.fft_size) * static_cast<double>(channels.channel_count()));
  std::vector<double> out(channels.length());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time[i] * scale;
  return AudioBuffer::mono(channels.sample_rate(), std::move(out));
}

std::vector<double> steered_power(const AudioBuffer& channels, const ArrayGeometry& geometry,
                                  const std::vector<SteeringDirection>& directions) {
  check_channels(channels, geometry);
  const ChannelSpectra spectra = transform_channels(channels, geometry);
  const double n = static_cast<double>(spectra.fft_size);
  const double m = static_cast<double>(channels.channel_count());
  std::vector<double> power;
  power.reserve(directions.size());
  for (const auto& dir : directions) {
    const auto sum = steer(spectra, tdoa(geometry, dir), channels.sample_rate());
    // Parseval over the one-sided spectrum.
    double energy = 0.0;
    for (std::size_t k = 0; k < sum.size(); ++k) {
      const bool edge = k == 0 || k == spectra.fft_size / 2;
      energy += (edge ? 1.0 : 2.0) * std::norm(sum[k]);
    }
    energy /= n * m * m;
    power.push_back(energy / static_cast<double>(std::max<std::size_t>(1, channels.length())));
  }
  return power;
}

DirectionSearchResult search_direction(const AudioBuffer& channels, const ArrayGeometry& geometry,
                                       double step_deg) {
  if (!(step_deg > 0.0)) throw Error(ErrorKind::kInvalidArgument, "grid step must be positive");
  std::vector<SteeringDirection> grid;
  for (double el = 0.0; el <= 90.0 + 1e-9; el += step_deg) {
    for (double az = 0.0; az < 360.0 - 1e-9; az += step_deg) grid.push_back({az, el});
  }
  const auto power = steered_power(channels, geometry, grid);
  std::size_t best = 0;
  for (std::size_t i = 1; i < power.size(); ++i) {
    if (power[i] > power[best]) best = i;
  }
  return {grid[best], power[best]};
}

ArrayGeometry load_geometry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open geometry " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    ArrayGeometry g;
    g.speed_of_sound = j.value("speed_of_sound", kSpeedOfSound);
    for (const auto& p : j.at("mic_positions")) {
      g.mic_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(),
                                 p.size() > 2 ? p.at(2).get<double>() : 0.0});
    }
    g.validate();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("geometry: ") + e.what());
  }
}

void save_geometry(const std::filesystem::path& path, const ArrayGeometry& geometry) {
  nlohmann::ordered_json j;
  j["speed_of_sound"] = geometry.speed_of_sound;
  j["mic_positions"] = geometry.mic_positions;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write geometry " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace dopplive
