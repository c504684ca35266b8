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

#ifndef DOPPLIVE_FEATURES_HPP_
#define DOPPLIVE_FEATURES_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dopplive/segmentation.hpp"
#include "dopplive/signal.hpp"

namespace dopplive {

inline constexpr std::size_t kEnergyBandCount = 6;
inline constexpr std::size_t kFreqBandCount = 5;
inline constexpr std::size_t kContourCount = kEnergyBandCount + kFreqBandCount;

// Half-open [lower, upper) range.
struct BandRange {
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v) const;
};

struct FeatureOptions {
  double half_band_hz = kProbeHalfBandHz;
  // Bins with |offset| <= this are the direct-path carrier and are ignored by
  // normalization and both feature families. 0 disables the exclusion.
  double carrier_exclusion_hz = 2.0;
  // Normalized-magnitude levels, lowest first. Values falling between levels
  // belong to no band.
  std::array<BandRange, 3> energy_levels = {{{0.4, 0.7}, {0.7, 0.9}, {0.95, 0.99}}};
  // Offset bands in Hz, fb1..fb5: +high, +mid, centre, -mid, -high.
  std::array<BandRange, kFreqBandCount> freq_bands = {
      {{100.0, 200.0}, {50.0, 100.0}, {-50.0, 50.0}, {-100.0, -50.0}, {-200.0, -100.0}}};
};

// Spectrogram magnitudes of one phoneme around the probe, [frame][bin]
// row-major. Bin b sits at offset first_offset_hz + b * bin_width_hz from f0.
struct DopplerSlice {
  std::size_t frame_count = 0;
  std::size_t bin_count = 0;
  std::vector<double> magnitudes;
  double f0_hz = kDefaultProbeHz;
  double bin_width_hz = 1.0;
  double first_offset_hz = 0.0;
  double carrier_exclusion_hz = 0.0;
  std::string phoneme_label;
  bool normalized_energy = false;
  bool normalized_length = false;

  double& at(std::size_t frame, std::size_t bin) { return magnitudes[frame * bin_count + bin]; }
  double at(std::size_t frame, std::size_t bin) const {
    return magnitudes[frame * bin_count + bin];
  }
  double offset_hz(std::size_t bin) const { return first_offset_hz + bin * bin_width_hz; }
  bool excluded(std::size_t bin) const;
};

struct DroppedPhoneme {
  PhonemeSegment segment;
  std::string reason;
};

struct DopplerExtraction {
  std::vector<DopplerSlice> slices;
  std::vector<DroppedPhoneme> dropped;
};

// One slice per phoneme. A frame belongs to a phoneme when its window centre
// lies in [start, end). Phonemes that own no frame are reported in
// `dropped`. Throws kRange when the spectrogram misses part of
// [f0 - half_band, f0 + half_band] and kInvalidArgument on an empty utterance.
DopplerExtraction extract_doppler(const Spectrogram& spectrogram,
                                  const SegmentedUtterance& utterance, double f0_hz,
                                  const FeatureOptions& options = {});

// Affine map of the non-excluded bins onto [0, 1]; excluded bins become 0.
// Throws kDegenerateInput when min == max.
DopplerSlice normalize_energy(const DopplerSlice& slice);

// Per-bin linear interpolation along time to `target_frames`.
DopplerSlice normalize_length(const DopplerSlice& slice, std::size_t target_frames);

// Linear resampling of a sequence onto `target` points with both endpoints
// kept. Same-length input is copied; otherwise at least two input and two
// output points are required.
std::vector<double> resample_linear(std::span<const double> values, std::size_t target);

using EnergyBandContours = std::array<std::vector<double>, kEnergyBandCount>;
using FreqBandContours = std::array<std::vector<double>, kFreqBandCount>;

// Band 2l is level l with positive offsets, 2l+1 the same level with negative
// offsets. Each value is the magnitude-weighted centroid offset (Hz) of the
// qualifying bins in that frame, 0 when none qualify.
EnergyBandContours energy_band_contours(const DopplerSlice& slice,
                                        const FeatureOptions& options = {});

// Mean normalized magnitude over each offset band, per frame.
FreqBandContours freq_band_energy_contours(const DopplerSlice& slice,
                                           const FeatureOptions& options = {});

// The 11 contours of an utterance, phoneme blocks concatenated in order.
// Contour index i < 6 is eb(i+1); i >= 6 is fb(i-5).
struct ContourSet {
  EnergyBandContours energy_band_freq;
  FreqBandContours freq_band_energy;
  std::vector<std::size_t> frames_per_phoneme;
  double f0_hz = kDefaultProbeHz;
  double bin_width_hz = 1.0;

  std::size_t length() const { return energy_band_freq[0].size(); }
  std::size_t phoneme_count() const { return frames_per_phoneme.size(); }
  const std::vector<double>& contour(std::size_t index) const;
  std::vector<double>& contour(std::size_t index);
  static const char* contour_name(std::size_t index);

  // Contours restricted to one phoneme.
  ContourSet block(std::size_t phoneme) const;
  // Every phoneme block resampled to `frames` (one entry per phoneme).
  ContourSet resampled(const std::vector<std::size_t>& frames) const;

  // Throws kInvalidArgument when contour lengths disagree with
  // frames_per_phoneme.
  void validate() const;
};

ContourSet build_contour_set(const std::vector<DopplerSlice>& slices,
                             const FeatureOptions& options = {});

// Concatenates per-phoneme blocks in order.
ContourSet concatenate_blocks(const std::vector<ContourSet>& blocks);

// Versioned JSON with fields version, f0_hz, bin_width_hz,
// frames_per_phoneme and contours {eb1..eb6, fb1..fb5}.
std::string contour_set_to_json(const ContourSet& contours);
ContourSet contour_set_from_json(const std::string& text);

// Per frame: centroid offset of the main lobe around the frame's strongest
// non-excluded bin (contiguous bins at or above half that peak).
std::vector<double> dominant_offsets(const DopplerSlice& slice);

// Mean over frames of the number of non-excluded bins above `fraction` of
// that frame's peak.
double band_occupancy(const DopplerSlice& slice, double fraction = 0.1);

}  // namespace dopplive

#endif  // DOPPLIVE_FEATURES_HPP_
