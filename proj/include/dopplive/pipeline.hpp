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

#ifndef DOPPLIVE_PIPELINE_HPP_
#define DOPPLIVE_PIPELINE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dopplive/audio.hpp"
#include "dopplive/features.hpp"
#include "dopplive/matching.hpp"
#include "dopplive/segmentation.hpp"
#include "dopplive/signal.hpp"
#include "dopplive/wavelet.hpp"

namespace dopplive {

struct PipelineConfig {
  double probe_f0 = kDefaultProbeHz;
  StftOptions stft;
  FeatureOptions features;
  bool denoise = true;
  DenoiseOptions denoise_options;
  EnergySegmenterOptions segmenter;
};

struct UtteranceFeatures {
  // Phonemes that produced a slice, in order.
  SegmentedUtterance utterance;
  std::vector<DopplerSlice> slices;
  std::vector<DroppedPhoneme> dropped;
  ContourSet contours;

  std::vector<std::string> labels() const;
};

// Band split, segmentation (alignment if given, energy fallback otherwise),
// probe-band STFT, per-phoneme slices, normalization, contours, denoising.
// A non-empty `target_frames` length-normalizes slice i to target_frames[i]
// and requires the phoneme count to match (kNoMatch otherwise).
UtteranceFeatures analyze_utterance(const AudioBuffer& audio,
                                    const std::optional<SegmentedUtterance>& alignment,
                                    const PipelineConfig& config,
                                    const std::vector<std::size_t>& target_frames = {});

struct Recording {
  AudioBuffer audio;
  std::optional<SegmentedUtterance> alignment;
};

// Reads a WAV and, when `alignment_path` is non-empty, its alignment.
Recording load_recording(const std::filesystem::path& wav_path,
                         const std::filesystem::path& alignment_path = {});

// Later trials are length-normalized to the first one. A phoneme-count or
// label mismatch throws kEnrollment.
PassphraseTemplate enroll_passphrase(const std::vector<Recording>& trials,
                                     const PipelineConfig& config);

PhonemeTemplateSet enroll_phonemes(const std::vector<Recording>& utterances,
                                   const PipelineConfig& config);

SimilarityResult verify_passphrase(const Recording& trial, const PassphraseTemplate& tmpl,
                                   const PipelineConfig& config,
                                   FeatureMode mode = FeatureMode::kCombined);

SimilarityResult verify_phonemes(const Recording& trial, const PhonemeTemplateSet& templates,
                                 const PipelineConfig& config,
                                 FeatureMode mode = FeatureMode::kCombined);

}  // namespace dopplive

#endif  // DOPPLIVE_PIPELINE_HPP_
