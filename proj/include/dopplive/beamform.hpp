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

#ifndef DOPPLIVE_BEAMFORM_HPP_
#define DOPPLIVE_BEAMFORM_HPP_

#include <array>
#include <filesystem>
#include <vector>

#include "dopplive/audio.hpp"

namespace dopplive {

inline constexpr double kSpeedOfSound = 343.0;
// Ring radius of the default 7-microphone board, metres.
inline constexpr double kDefaultArrayRadius = 0.043;

using Vec3 = std::array<double, 3>;

struct ArrayGeometry {
  std::vector<Vec3> mic_positions;  // metres; index 0 is the reference mic
  double speed_of_sound = kSpeedOfSound;

  // One mic at the origin plus `ring_count` mics evenly spaced on a circle
  // in the z = 0 plane, the first on the +x axis.
  static ArrayGeometry circular(double radius = kDefaultArrayRadius, int ring_count = 6);

  // Throws kInvalidArgument with fewer than two or coincident microphones.
  void validate() const;
};

// Far-field arrival direction. Azimuth is measured from +x towards +y in the
// array plane, elevation towards +z.
struct SteeringDirection {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;

  void validate() const;
  Vec3 unit_vector() const;
};

// Arrival-time offsets relative to mic 0: -(u . (p_m - p_0)) / c. A negative
// value means the wavefront reaches that mic first.
std::vector<double> tdoa(const ArrayGeometry& geometry, const SteeringDirection& direction);

// Advances every channel by its TDoA with a frequency-domain phase ramp
// (fractional delays), sums and divides by the channel count.
AudioBuffer delay_and_sum(const AudioBuffer& channels, const ArrayGeometry& geometry,
                          const SteeringDirection& direction);

struct DirectionSearchResult {
  SteeringDirection direction;
  double power = 0.0;
};

// Output power over an azimuth x elevation grid (elevation 0..90: a planar
// array cannot tell the hemispheres apart). Ties keep the first direction.
DirectionSearchResult search_direction(const AudioBuffer& channels, const ArrayGeometry& geometry,
                                       double step_deg = 5.0);

// Steered output power (mean square) for each direction, sharing one FFT per
// channel. Energy shifted past the ends of the recording is still counted.
std::vector<double> steered_power(const AudioBuffer& channels, const ArrayGeometry& geometry,
                                  const std::vector<SteeringDirection>& directions);

// {"speed_of_sound": c, "mic_positions": [[x, y, z], ...]}
ArrayGeometry load_geometry(const std::filesystem::path& path);
void save_geometry(const std::filesystem::path& path, const ArrayGeometry& geometry);

}  // namespace dopplive

#endif  // DOPPLIVE_BEAMFORM_HPP_
