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

#ifndef DOPPLIVE_CONFIG_HPP_
#define DOPPLIVE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dopplive/matching.hpp"
#include "dopplive/pipeline.hpp"

namespace dopplive {

// Decision threshold used until a calibration writes one back.
inline constexpr double kDefaultThreshold = 0.85;

struct RunConfig {
  double sample_rate = 48000.0;
  double probe_f0 = kDefaultProbeHz;
  double stft_window_s = 0.25;
  double stft_hop_s = 0.01;
  double stft_bin_width_hz = 1.0;
  double carrier_exclusion_hz = 2.0;
  // Flattened [lower, upper) pairs: three energy levels, five offset bands.
  std::vector<double> energy_band_levels = {0.4, 0.7, 0.7, 0.9, 0.95, 0.99};
  std::vector<double> freq_band_edges = {100, 200, 50, 100, -50, 50, -100, -50, -200, -100};
  std::string wavelet = "db4";
  double wavelet_multiplier = 1.0;
  int wavelet_levels = 3;
  double doppler_factor_k = 1.0;
  FeatureMode feature_mode = FeatureMode::kCombined;
  double threshold = kDefaultThreshold;
  std::string profile_store_path = "profiles";
  std::uint64_t seed = 0;

  // Throws kInvalidArgument / kRange on inconsistent values.
  void validate() const;
  PipelineConfig pipeline() const;
};

// Sets one field from its textual value. Unknown keys throw kParse.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// key = value lines; '#' starts a comment; strings may be double-quoted and
// lists written as [a, b, ...]. Throws kParse with the line number.
std::map<std::string, std::string> parse_config_text(const std::string& text);

// Applies a parsed file on top of `config`.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

std::string format_config(const RunConfig& config);

}  // namespace dopplive

#endif  // DOPPLIVE_CONFIG_HPP_
