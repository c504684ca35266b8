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

#include "dopplive/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dopplive/error.hpp"
#include "json_codec.hpp"

namespace dopplive {

namespace {

// Offsets are multiples of the bin width; this absorbs representation error
// at band edges.
constexpr double kEdgeEps = 1e-9;

constexpr const char* kContourNames[kContourCount] = {
    "eb1", "eb2", "eb3", "eb4", "eb5", "eb6", "fb1", "fb2", "fb3", "fb4", "fb5"};

}  // namespace

bool BandRange::contains(double v) const {
  return v >= lower - kEdgeEps && v < upper - kEdgeEps;
}

bool DopplerSlice::excluded(std::size_t bin) const {
  return carrier_exclusion_hz > 0.0 &&
         std::abs(offset_hz(bin)) <= carrier_exclusion_hz + kEdgeEps;
}

DopplerExtraction extract_doppler(const Spectrogram& spectrogram,
                                  const SegmentedUtterance& utterance, double f0_hz,
                                  const FeatureOptions& options) {
  if (utterance.segments.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "utterance has no phoneme segments");
  }
  const double bw = spectrogram.bin_width_hz();
  const double lo = f0_hz - options.half_band_hz;
  const double hi = f0_hz + options.half_band_hz;
  const double first_hz = spectrogram.freq_origin_hz();
  const double last_hz = spectrogram.bin_frequency(spectrogram.bin_count() - 1);
  if (spectrogram.bin_count() == 0 || first_hz > lo + 0.5 * bw || last_hz < hi - 0.5 * bw) {
    throw Error(ErrorKind::kRange, "spectrogram does not cover the probe band");
  }

  // Bins whose centre lies within the probe band.
  std::size_t first_bin = spectrogram.bin_count();
  std::size_t last_bin = 0;
  for (std::size_t b = 0; b < spectrogram.bin_count(); ++b) {
    const double f = spectrogram.bin_frequency(b);
    if (f >= lo - kEdgeEps && f <= hi + kEdgeEps) {
      first_bin = std::min(first_bin, b);
      last_bin = b;
    }
  }
  if (first_bin > last_bin) throw Error(ErrorKind::kRange, "probe band contains no bins");

  DopplerExtraction out;
  for (const auto& seg : utterance.segments) {
    std::vector<std::size_t> frames;
    for (std::size_t k = 0; k < spectrogram.frame_count(); ++k) {
      const double centre = spectrogram.frame_center_s(k);
      if (centre >= seg.start_s && centre < seg.end_s) frames.push_back(k);
    }
    if (frames.empty()) {
      out.dropped.push_back({seg, "no STFT frame centre falls inside the phoneme"});
      continue;
    }
    DopplerSlice slice;
    slice.frame_count = frames.size();
    slice.bin_count = last_bin - first_bin + 1;
    slice.magnitudes.resize(slice.frame_count * slice.bin_count);
    slice.f0_hz = f0_hz;
    slice.bin_width_hz = bw;
    slice.first_offset_hz = spectrogram.bin_frequency(first_bin) - f0_hz;
    slice.carrier_exclusion_hz = options.carrier_exclusion_hz;
    slice.phoneme_label = seg.label;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      for (std::size_t b = 0; b < slice.bin_count; ++b) {
        slice.at(i, b) = spectrogram.magnitude(frames[i], first_bin + b);
      }
    }
    out.slices.push_back(std::move(slice));
  }
  return out;
}

DopplerSlice normalize_energy(const DopplerSlice& slice) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      if (slice.excluded(b)) continue;
      lo = std::min(lo, slice.at(f, b));
      hi = std::max(hi, slice.at(f, b));
    }
  }
  if (!(hi > lo)) {
    throw Error(ErrorKind::kDegenerateInput,
                "slice '" + slice.phoneme_label + "' has no magnitude range to normalize");
  }
  DopplerSlice out = slice;
  const double span = hi - lo;
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      out.at(f, b) = slice.excluded(b) ? 0.0 : (slice.at(f, b) - lo) / span;
    }
  }
  out.normalized_energy = true;
  return out;
}

std::vector<double> resample_linear(std::span<const double> values, std::size_t target) {
  if (values.size() == target) return {values.begin(), values.end()};
  if (values.size() < 2 || target < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "linear resampling needs at least two input and two output points");
  }
  std::vector<double> out(target);
  const double step = static_cast<double>(values.size() - 1) / static_cast<double>(target - 1);
  for (std::size_t i = 0; i < target; ++i) {
    const double pos = i * step;
    const auto k = std::min(static_cast<std::size_t>(pos), values.size() - 2);
    const double frac = pos - static_cast<double>(k);
    out[i] = values[k] + frac * (values[k + 1] - values[k]);
  }
  out.back() = values.back();
  return out;
}

DopplerSlice normalize_length(const DopplerSlice& slice, std::size_t target_frames) {
  if (slice.frame_count < 2 || target_frames < 2) {
    throw Error(ErrorKind::kInvalidArgument,
                "length normalization needs at least two source and target frames");
  }
  DopplerSlice out = slice;
  out.normalized_length = true;
  if (target_frames == slice.frame_count) return out;

  out.frame_count = target_frames;
  out.magnitudes.assign(target_frames * slice.bin_count, 0.0);
  std::vector<double> column(slice.frame_count);
  for (std::size_t b = 0; b < slice.bin_count; ++b) {
    for (std::size_t f = 0; f < slice.frame_count; ++f) column[f] = slice.at(f, b);
    const auto resampled = resample_linear(column, target_frames);
    for (std::size_t f = 0; f < target_frames; ++f) out.at(f, b) = resampled[f];
  }
  return out;
}

namespace {

void require_energy_normalized(const DopplerSlice& slice, const char* what) {
  if (!slice.normalized_energy) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " needs an energy-normalized slice");
  }
}

}  // namespace

EnergyBandContours energy_band_contours(const DopplerSlice& slice,
                                        const FeatureOptions& options) {
  require_energy_normalized(slice, "energy_band_contours");
  EnergyBandContours out;
  for (auto& c : out) c.assign(slice.frame_count, 0.0);
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    std::array<double, kEnergyBandCount> weight{};
    std::array<double, kEnergyBandCount> moment{};
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      const double offset = slice.offset_hz(b);
      if (slice.excluded(b) || offset == 0.0) continue;
      const double m = slice.at(f, b);
      for (std::size_t level = 0; level < options.energy_levels.size(); ++level) {
        if (!options.energy_levels[level].contains(m)) continue;
        const std::size_t band = 2 * level + (offset > 0.0 ? 0 : 1);
        weight[band] += m;
        moment[band] += m * offset;
      }
    }
    for (std::size_t band = 0; band < kEnergyBandCount; ++band) {
      if (weight[band] > 0.0) out[band][f] = moment[band] / weight[band];
    }
  }
  return out;
}

FreqBandContours freq_band_energy_contours(const DopplerSlice& slice,
                                           const FeatureOptions& options) {
  require_energy_normalized(slice, "freq_band_energy_contours");
  FreqBandContours out;
  for (auto& c : out) c.assign(slice.frame_count, 0.0);
  // Bin membership does not change between frames.
  std::array<std::vector<std::size_t>, kFreqBandCount> members;
  for (std::size_t b = 0; b < slice.bin_count; ++b) {
    if (slice.excluded(b)) continue;
    for (std::size_t band = 0; band < kFreqBandCount; ++band) {
      if (options.freq_bands[band].contains(slice.offset_hz(b))) members[band].push_back(b);
    }
  }
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    for (std::size_t band = 0; band < kFreqBandCount; ++band) {
      if (members[band].empty()) continue;
      double sum = 0.0;
      for (std::size_t b : members[band]) sum += slice.at(f, b);
      out[band][f] = sum / static_cast<double>(members[band].size());
    }
  }
  return out;
}

const std::vector<double>& ContourSet::contour(std::size_t index) const {
  if (index < kEnergyBandCount) return energy_band_freq[index];
  if (index < kContourCount) return freq_band_energy[index - kEnergyBandCount];
  throw Error(ErrorKind::kInvalidArgument, "contour index out of range");
}

std::vector<double>& ContourSet::contour(std::size_t index) {
  return const_cast<std::vector<double>&>(std::as_const(*this).contour(index));
}

const char* ContourSet::contour_name(std::size_t index) {
  if (index >= kContourCount) throw Error(ErrorKind::kInvalidArgument, "contour index out of range");
  return kContourNames[index];
}

void ContourSet::validate() const {
  const std::size_t total =
      std::accumulate(frames_per_phoneme.begin(), frames_per_phoneme.end(), std::size_t{0});
  for (std::size_t i = 0; i < kContourCount; ++i) {
    if (contour(i).size() != total) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string("contour ") + contour_name(i) + " has " +
                      std::to_string(contour(i).size()) + " values, expected " +
                      std::to_string(total));
    }
  }
}

ContourSet ContourSet::block(std::size_t phoneme) const {
  if (phoneme >= frames_per_phoneme.size()) {
    throw Error(ErrorKind::kInvalidArgument, "phoneme index out of range");
  }
  const auto begin = std::accumulate(frames_per_phoneme.begin(),
                                     frames_per_phoneme.begin() + static_cast<std::ptrdiff_t>(phoneme),
                                     std::size_t{0});
  const std::size_t count = frames_per_phoneme[phoneme];
  ContourSet out;
  out.f0_hz = f0_hz;
  out.bin_width_hz = bin_width_hz;
  out.frames_per_phoneme = {count};
  for (std::size_t i = 0; i < kContourCount; ++i) {
    const auto& src = contour(i);
    out.contour(i).assign(src.begin() + static_cast<std::ptrdiff_t>(begin),
                          src.begin() + static_cast<std::ptrdiff_t>(begin + count));
  }
  return out;
}

ContourSet ContourSet::resampled(const std::vector<std::size_t>& frames) const {
  if (frames.size() != frames_per_phoneme.size()) {
    throw Error(ErrorKind::kInvalidArgument, "phoneme count mismatch while resampling contours");
  }
  std::vector<ContourSet> blocks;
  for (std::size_t p = 0; p < frames.size(); ++p) {
    ContourSet b = block(p);
    if (frames[p] != frames_per_phoneme[p]) {
      for (std::size_t i = 0; i < kContourCount; ++i) {
        b.contour(i) = resample_linear(b.contour(i), frames[p]);
      }
      b.frames_per_phoneme = {frames[p]};
    }
    blocks.push_back(std::move(b));
  }
  return concatenate_blocks(blocks);
}

ContourSet concatenate_blocks(const std::vector<ContourSet>& blocks) {
  if (blocks.empty()) throw Error(ErrorKind::kInvalidArgument, "no contour blocks to concatenate");
  ContourSet out;
  out.f0_hz = blocks.front().f0_hz;
  out.bin_width_hz = blocks.front().bin_width_hz;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < kContourCount; ++i) {
      out.contour(i).insert(out.contour(i).end(), b.contour(i).begin(), b.contour(i).end());
    }
    out.frames_per_phoneme.insert(out.frames_per_phoneme.end(), b.frames_per_phoneme.begin(),
                                  b.frames_per_phoneme.end());
  }
  return out;
}

ContourSet build_contour_set(const std::vector<DopplerSlice>& slices,
                             const FeatureOptions& options) {
  if (slices.empty()) throw Error(ErrorKind::kInvalidArgument, "no Doppler slices to combine");
  std::vector<ContourSet> blocks;
  blocks.reserve(slices.size());
  for (const auto& slice : slices) {
    ContourSet b;
    b.f0_hz = slice.f0_hz;
    b.bin_width_hz = slice.bin_width_hz;
    b.energy_band_freq = energy_band_contours(slice, options);
    b.freq_band_energy = freq_band_energy_contours(slice, options);
    b.frames_per_phoneme = {slice.frame_count};
    blocks.push_back(std::move(b));
  }
  return concatenate_blocks(blocks);
}

namespace detail {

Json contour_set_to_object(const ContourSet& contours) {
  Json contours_obj = Json::object();
  for (std::size_t i = 0; i < kContourCount; ++i) {
    contours_obj[ContourSet::contour_name(i)] = contours.contour(i);
  }
  return Json{{"version", kContourSetVersion},
              {"f0_hz", contours.f0_hz},
              {"bin_width_hz", contours.bin_width_hz},
              {"frames_per_phoneme", contours.frames_per_phoneme},
              {"contours", std::move(contours_obj)}};
}

ContourSet contour_set_from_object(const Json& object) {
  try {
    if (object.at("version").get<int>() != kContourSetVersion) {
      throw Error(ErrorKind::kParse, "unsupported contour set version");
    }
    ContourSet out;
    out.f0_hz = object.at("f0_hz").get<double>();
    out.bin_width_hz = object.at("bin_width_hz").get<double>();
    out.frames_per_phoneme = object.at("frames_per_phoneme").get<std::vector<std::size_t>>();
    const Json& c = object.at("contours");
    for (std::size_t i = 0; i < kContourCount; ++i) {
      out.contour(i) = c.at(ContourSet::contour_name(i)).get<std::vector<double>>();
    }
    out.validate();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("contour set: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidArgument) throw Error(ErrorKind::kParse, e.what());
    throw;
  }
}

}  // namespace detail

std::string contour_set_to_json(const ContourSet& contours) {
  return detail::contour_set_to_object(contours).dump(2) + "\n";
}

ContourSet contour_set_from_json(const std::string& text) {
  detail::Json object;
  try {
    object = detail::Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("contour set: ") + e.what());
  }
  return detail::contour_set_from_object(object);
}

std::vector<double> dominant_offsets(const DopplerSlice& slice) {
  std::vector<double> out(slice.frame_count, 0.0);
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    std::size_t peak = slice.bin_count;
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      if (slice.excluded(b)) continue;
      if (peak == slice.bin_count || slice.at(f, b) > slice.at(f, peak)) peak = b;
    }
    if (peak == slice.bin_count || !(slice.at(f, peak) > 0.0)) continue;
    const double half = 0.5 * slice.at(f, peak);
    std::size_t lo = peak;
    while (lo > 0 && !slice.excluded(lo - 1) && slice.at(f, lo - 1) >= half) --lo;
    std::size_t hi = peak;
    while (hi + 1 < slice.bin_count && !slice.excluded(hi + 1) && slice.at(f, hi + 1) >= half) ++hi;
    double weight = 0.0;
    double moment = 0.0;
    for (std::size_t b = lo; b <= hi; ++b) {
      weight += slice.at(f, b);
      moment += slice.at(f, b) * slice.offset_hz(b);
    }
    out[f] = moment / weight;
  }
  return out;
}

double band_occupancy(const DopplerSlice& slice, double fraction) {
  if (slice.frame_count == 0) return 0.0;
  double total = 0.0;
  for (std::size_t f = 0; f < slice.frame_count; ++f) {
    double peak = 0.0;
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      if (!slice.excluded(b)) peak = std::max(peak, slice.at(f, b));
    }
    std::size_t count = 0;
    for (std::size_t b = 0; b < slice.bin_count; ++b) {
      if (!slice.excluded(b) && slice.at(f, b) > fraction * peak) ++count;
    }
    total += static_cast<double>(count);
  }
  return total / static_cast<double>(slice.frame_count);
}

}  // namespace dopplive
