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

#include "dopplive/pipeline.hpp"

#include <algorithm>

#include "dopplive/error.hpp"

namespace dopplive {

std::vector<std::string> UtteranceFeatures::labels() const {
  std::vector<std::string> out;
  for (const auto& s : utterance.segments) out.push_back(s.label);
  return out;
}

UtteranceFeatures analyze_utterance(const AudioBuffer& audio,
                                    const std::optional<SegmentedUtterance>& alignment,
                                    const PipelineConfig& config,
                                    const std::vector<std::size_t>& target_frames) {
  audio.require_mono("analysis");
  const BandSplit bands = split_bands(audio, config.probe_f0);

  UtteranceFeatures out;
  if (alignment) {
    out.utterance = remove_pauses(*alignment);
  } else {
    out.utterance = segment_by_energy(bands.voice, config.segmenter);
  }
  out.utterance.validate();
  if (out.utterance.segments.empty()) {
    throw Error(ErrorKind::kInsufficientSignal, "no speech segments to analyze");
  }

  StftOptions stft_opts = config.stft;
  stft_opts.min_freq_hz = config.probe_f0 - config.features.half_band_hz;
  stft_opts.max_freq_hz = config.probe_f0 + config.features.half_band_hz;
  const Spectrogram spec = stft(bands.probe, stft_opts);

  DopplerExtraction extraction =
      extract_doppler(spec, out.utterance, config.probe_f0, config.features);
  out.dropped = std::move(extraction.dropped);
  // Slices come out in segment order, minus the dropped segments.
  std::vector<PhonemeSegment> kept;
  for (const auto& seg : out.utterance.segments) {
    if (std::none_of(out.dropped.begin(), out.dropped.end(),
                     [&](const DroppedPhoneme& d) { return d.segment == seg; })) {
      kept.push_back(seg);
    }
  }
  out.utterance.segments = std::move(kept);

  if (!target_frames.empty() && target_frames.size() != extraction.slices.size()) {
    throw Error(ErrorKind::kNoMatch, "utterance has " + std::to_string(extraction.slices.size()) +
                                         " usable phonemes, template expects " +
                                         std::to_string(target_frames.size()));
  }
  for (std::size_t i = 0; i < extraction.slices.size(); ++i) {
    DopplerSlice slice = normalize_energy(extraction.slices[i]);
    if (!target_frames.empty()) slice = normalize_length(slice, target_frames[i]);
    out.slices.push_back(std::move(slice));
  }
  if (out.slices.empty()) throw Error(ErrorKind::kInsufficientSignal, "no usable phoneme");

  out.contours = build_contour_set(out.slices, config.features);
  if (config.denoise) out.contours = denoise_contour_set(out.contours, config.denoise_options);
  return out;
}

Recording load_recording(const std::filesystem::path& wav_path,
                         const std::filesystem::path& alignment_path) {
  Recording rec;
  rec.audio = read_wav(wav_path);
  if (!alignment_path.empty()) {
    rec.alignment = load_alignment(alignment_path, rec.audio.duration_seconds());
  }
  return rec;
}

PassphraseTemplate enroll_passphrase(const std::vector<Recording>& trials,
                                     const PipelineConfig& config) {
  if (trials.empty()) throw Error(ErrorKind::kEnrollment, "no enrollment trials");
  std::vector<ContourSet> contours;
  std::vector<std::string> labels;
  std::vector<std::size_t> frames;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    UtteranceFeatures f;
    try {
      f = analyze_utterance(trials[i].audio, trials[i].alignment, config, frames);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNoMatch) throw;
      throw Error(ErrorKind::kEnrollment, "trial " + std::to_string(i + 1) + ": " + e.what());
    }
    if (i == 0) {
      labels = f.labels();
      frames = f.contours.frames_per_phoneme;
    } else if (f.labels() != labels) {
      throw Error(ErrorKind::kEnrollment,
                  "trial " + std::to_string(i + 1) + " has a different phoneme sequence");
    }
    contours.push_back(std::move(f.contours));
  }
  return build_passphrase_template(contours, labels);
}

PhonemeTemplateSet enroll_phonemes(const std::vector<Recording>& utterances,
                                   const PipelineConfig& config) {
  std::vector<LabelledContours> corpus;
  for (const auto& rec : utterances) {
    UtteranceFeatures f = analyze_utterance(rec.audio, rec.alignment, config);
    corpus.push_back({std::move(f.utterance), std::move(f.contours)});
  }
  return build_phoneme_templates(corpus);
}

SimilarityResult verify_passphrase(const Recording& trial, const PassphraseTemplate& tmpl,
                                   const PipelineConfig& config, FeatureMode mode) {
  const UtteranceFeatures f =
      analyze_utterance(trial.audio, trial.alignment, config, tmpl.contours.frames_per_phoneme);
  return score_text_dependent(f.contours, tmpl, mode);
}

SimilarityResult verify_phonemes(const Recording& trial, const PhonemeTemplateSet& templates,
                                 const PipelineConfig& config, FeatureMode mode) {
  const UtteranceFeatures f = analyze_utterance(trial.audio, trial.alignment, config);
  std::vector<LabelledBlock> blocks;
  const auto labels = f.labels();
  for (std::size_t p = 0; p < labels.size(); ++p) {
    blocks.push_back({labels[p], f.contours.block(p)});
  }
  return weighted_similarity(blocks, templates.templates, mode);
}

}  // namespace dopplive
