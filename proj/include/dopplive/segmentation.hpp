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

#ifndef DOPPLIVE_SEGMENTATION_HPP_
#define DOPPLIVE_SEGMENTATION_HPP_

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dopplive/audio.hpp"

namespace dopplive {

struct PhonemeSegment {
  std::string label;
  double start_s = 0.0;
  double end_s = 0.0;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const PhonemeSegment&) const = default;
};

enum class SegmentSource { kExternalAlignment, kEnergyFallback };

struct SegmentedUtterance {
  std::vector<PhonemeSegment> segments;
  SegmentSource source = SegmentSource::kExternalAlignment;
  double total_duration_s = 0.0;

  // Throws kParse on unordered/overlapping/empty intervals and kRange on
  // intervals outside [0, total_duration_s].
  void validate() const;
};

struct AlignmentOptions {
  std::set<std::string> pause_labels = {"sil", "sp", "pau", ""};
  // Tab-separated rows preceded by a single header row.
  bool tsv_with_header = false;
};

// Parses `label,start_seconds,end_seconds` rows (no header, '.' decimal
// point) and drops pause labels.
SegmentedUtterance parse_alignment(std::string_view text, double utterance_duration_s,
                                   const AlignmentOptions& options = {});
SegmentedUtterance load_alignment(const std::filesystem::path& path,
                                  double utterance_duration_s,
                                  const AlignmentOptions& options = {});

// Shortest round-trip decimal formatting, so parse(format(x)) == x.
std::string format_alignment(const std::vector<PhonemeSegment>& segments);
void save_alignment(const std::filesystem::path& path,
                    const std::vector<PhonemeSegment>& segments);

struct EnergySegmenterOptions {
  double frame_ms = 20.0;
  double threshold_ratio = 0.25;
  // Frames above this fraction of the loudest frame form the voiced portion
  // whose median energy sets the threshold.
  double voiced_floor = 0.01;
};

// Contiguous above-threshold frames become "seg_<k>" segments (k from 0).
SegmentedUtterance segment_by_energy(const AudioBuffer& voice,
                                     const EnergySegmenterOptions& options = {});

// Keeps only labelled phoneme intervals; gaps are not represented.
SegmentedUtterance remove_pauses(const SegmentedUtterance& utterance,
                                 const std::set<std::string>& pause_labels =
                                     AlignmentOptions{}.pause_labels);

}  // namespace dopplive

#endif  // DOPPLIVE_SEGMENTATION_HPP_
