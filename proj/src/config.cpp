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

#include "dopplive/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dopplive/error.hpp"
#include "dopplive/wavelet.hpp"

namespace dopplive {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::kParse, key + ": '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw Error(ErrorKind::kParse, key + ": '" + text + "' is not an unsigned integer");
  }
  return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') {
    throw Error(ErrorKind::kParse, key + ": expected a [a, b, ...] list");
  }
  t = t.substr(1, t.size() - 2);
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sample_rate must be positive");
  if (!(probe_f0 > 0.0)) throw Error(ErrorKind::kInvalidArgument, "probe_f0 must be positive");
  if (probe_f0 + kProbeHalfBandHz >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing, "probe band must lie below the Nyquist frequency");
  }
  if (!(stft_window_s > 0.0) || !(stft_hop_s > 0.0) || !(stft_bin_width_hz > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "STFT window, hop and bin width must be positive");
  }
  if (energy_band_levels.size() != 6) {
    throw Error(ErrorKind::kInvalidArgument, "energy_band_levels needs 3 [lower, upper) pairs");
  }
  if (freq_band_edges.size() != 10) {
    throw Error(ErrorKind::kInvalidArgument, "freq_band_edges needs 5 [lower, upper) pairs");
  }
  for (std::size_t i = 0; i < energy_band_levels.size(); i += 2) {
    if (!(energy_band_levels[i] < energy_band_levels[i + 1])) {
      throw Error(ErrorKind::kInvalidArgument, "energy band lower edge must be below upper edge");
    }
  }
  for (std::size_t i = 0; i < freq_band_edges.size(); i += 2) {
    if (!(freq_band_edges[i] < freq_band_edges[i + 1])) {
      throw Error(ErrorKind::kInvalidArgument, "frequency band lower edge must be below upper edge");
    }
  }
  wavelet_by_name(wavelet);
  if (!(wavelet_multiplier >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "wavelet_multiplier must be non-negative");
  }
  if (wavelet_levels < 1) throw Error(ErrorKind::kInvalidArgument, "wavelet_levels must be >= 1");
  if (!(doppler_factor_k > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "doppler_factor_k must be positive");
  }
  if (!(threshold >= -1.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kRange, "threshold must lie in [-1, 1]");
  }
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.probe_f0 = probe_f0;
  p.stft.window_s = stft_window_s;
  p.stft.hop_s = stft_hop_s;
  p.stft.target_bin_width_hz = stft_bin_width_hz;
  p.features.carrier_exclusion_hz = carrier_exclusion_hz;
  for (std::size_t i = 0; i < 3; ++i) {
    p.features.energy_levels[i] = {energy_band_levels[2 * i], energy_band_levels[2 * i + 1]};
  }
  for (std::size_t i = 0; i < kFreqBandCount; ++i) {
    p.features.freq_bands[i] = {freq_band_edges[2 * i], freq_band_edges[2 * i + 1]};
  }
  p.denoise = wavelet_multiplier > 0.0;
  p.denoise_options.wavelet = wavelet;
  p.denoise_options.multiplier = wavelet_multiplier;
  p.denoise_options.levels = wavelet_levels;
  return p;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = unquote(trim(raw));
  if (key == "sample_rate") c.sample_rate = parse_double(key, value);
  else if (key == "probe_f0") c.probe_f0 = parse_double(key, value);
  else if (key == "stft_window_s") c.stft_window_s = parse_double(key, value);
  else if (key == "stft_hop_s") c.stft_hop_s = parse_double(key, value);
  else if (key == "stft_bin_width_hz") c.stft_bin_width_hz = parse_double(key, value);
  else if (key == "carrier_exclusion_hz") c.carrier_exclusion_hz = parse_double(key, value);
  else if (key == "energy_band_levels") c.energy_band_levels = parse_list(key, value);
  else if (key == "freq_band_edges") c.freq_band_edges = parse_list(key, value);
  else if (key == "wavelet") c.wavelet = value;
  else if (key == "wavelet_multiplier") c.wavelet_multiplier = parse_double(key, value);
  else if (key == "wavelet_levels") c.wavelet_levels = static_cast<int>(parse_u64(key, value));
  else if (key == "doppler_factor_k") c.doppler_factor_k = parse_double(key, value);
  else if (key == "feature_mode") c.feature_mode = parse_feature_mode(value);
  else if (key == "threshold") c.threshold = parse_double(key, value);
  else if (key == "profile_store_path") c.profile_store_path = value;
  else if (key == "seed") c.seed = parse_u64(key, value);
  else throw Error(ErrorKind::kParse, "unknown config key '" + key + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) continue;  // table header
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kParse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(ErrorKind::kParse, "config line " + std::to_string(line_no) + ": empty key");
    }
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  for (const auto& [key, value] : parse_config_text(ss.str())) apply_setting(config, key, value);
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os << "sample_rate = " << c.sample_rate << '\n'
     << "probe_f0 = " << c.probe_f0 << '\n'
     << "stft_window_s = " << c.stft_window_s << '\n'
     << "stft_hop_s = " << c.stft_hop_s << '\n'
     << "stft_bin_width_hz = " << c.stft_bin_width_hz << '\n'
     << "carrier_exclusion_hz = " << c.carrier_exclusion_hz << '\n'
     << "energy_band_levels = " << format_list(c.energy_band_levels) << '\n'
     << "freq_band_edges = " << format_list(c.freq_band_edges) << '\n'
     << "wavelet = \"" << c.wavelet << "\"\n"
     << "wavelet_multiplier = " << c.wavelet_multiplier << '\n'
     << "wavelet_levels = " << c.wavelet_levels << '\n'
     << "doppler_factor_k = " << c.doppler_factor_k << '\n'
     << "feature_mode = \"" << feature_mode_name(c.feature_mode) << "\"\n"
     << "threshold = " << c.threshold << '\n'
     << "profile_store_path = \"" << c.profile_store_path << "\"\n"
     << "seed = " << c.seed << '\n';
  return os.str();
}

}  // namespace dopplive
