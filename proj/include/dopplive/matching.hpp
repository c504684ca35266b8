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

#ifndef DOPPLIVE_MATCHING_HPP_
#define DOPPLIVE_MATCHING_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dopplive/features.hpp"
#include "dopplive/segmentation.hpp"

namespace dopplive {

enum class FeatureMode { kEnergyOnly, kFrequencyOnly, kCombined };

// "energy" | "frequency" | "combined"
const char* feature_mode_name(FeatureMode mode);
FeatureMode parse_feature_mode(const std::string& text);
bool contour_selected(FeatureMode mode, std::size_t contour_index);

enum class Verdict { kLive, kAttack };
const char* verdict_name(Verdict verdict);

inline constexpr double kWeightEpsilon = 1e-6;
inline constexpr double kMaxWeight = 1e6;

// Sample Pearson correlation. Throws kInvalidArgument on length mismatch or
// n < 2, kUndefinedCorrelation when either sequence is constant.
double pearson(std::span<const double> a, std::span<const double> b);

struct PassphraseTemplate {
  ContourSet contours;
  std::size_t trial_count = 0;
  std::vector<std::string> phoneme_labels;
};

struct PhonemeTemplate {
  std::string label;
  ContourSet contours;  // single block
  double weight = 0.0;
  std::size_t trial_count = 0;
};

// Pointwise mean after resampling every trial's phoneme blocks to the first
// trial's frame counts. Throws kEnrollment for fewer than two trials or
// mismatched phoneme counts.
PassphraseTemplate build_passphrase_template(const std::vector<ContourSet>& trials,
                                             std::vector<std::string> phoneme_labels = {});

// Consistency weight of one phoneme over n >= 2 trials (single-block
// ContourSets aligned at their first frame):
//   w = sum(L_i) / (eps + sum_{i<j} sum_contours sum_t |A_i(t) - A_j(t)|)
// summed over the frames both trials share, capped at kMaxWeight.
double phoneme_weight(const std::vector<ContourSet>& trials);

struct PhonemeTemplateSet {
  std::map<std::string, PhonemeTemplate> templates;
  // Labels seen fewer than twice.
  std::vector<std::string> excluded_labels;
};

struct LabelledContours {
  SegmentedUtterance utterance;
  ContourSet contours;
};

// Groups blocks by label; each template is the mean block after resampling
// to the label's median length, weighted by phoneme_weight.
PhonemeTemplateSet build_phoneme_templates(const std::vector<LabelledContours>& corpus);

struct LabelledBlock {
  std::string label;
  ContourSet block;
};

struct SimilarityResult {
  double score = 0.0;
  std::array<double, kContourCount> per_contour{};
  std::array<bool, kContourCount> contour_used{};
  std::size_t matched_phonemes = 0;
  std::size_t total_phonemes = 0;
  double coverage() const {
    return total_phonemes == 0 ? 0.0 : static_cast<double>(matched_phonemes) / total_phonemes;
  }
};

// Weighted correlation per contour with the weight applied to every point of
// both sequences and per-phoneme centring:
//   rho = sum_i sum_t w_i^2 a_i(t) b_i(t)
//         / sqrt(sum_i sum_t (w_i a_i(t))^2 * sum_i sum_t (w_i b_i(t))^2)
// where a_i, b_i are the mean-centred test and template blocks, the test
// block first resampled to the template length. Test phonemes without a
// template (or shorter than two frames) are skipped. The score is the mean
// over selected contours with a non-zero denominator. Throws kNoMatch when no
// phoneme matches.
SimilarityResult weighted_similarity(const std::vector<LabelledBlock>& test,
                                     const std::map<std::string, PhonemeTemplate>& templates,
                                     FeatureMode mode = FeatureMode::kCombined);

// Per-contour Pearson against the template (test already length-normalized).
// Constant contour pairs are left out of the mean; kUndefinedCorrelation if
// every selected contour is left out.
SimilarityResult score_text_dependent(const ContourSet& test, const PassphraseTemplate& tmpl,
                                      FeatureMode mode = FeatureMode::kCombined);

// Mean of the selected per-contour scores of an existing result.
double mode_score(const SimilarityResult& result, FeatureMode mode);

struct LivenessDecision {
  double score = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::kAttack;
  std::array<double, kContourCount> per_contour_scores{};
  FeatureMode feature_mode = FeatureMode::kCombined;
};

// Live iff score > threshold; ties fail closed.
LivenessDecision decide(double score, double threshold);

struct Calibration {
  double threshold = 0.0;
  double eer = 0.0;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;  // attacks with score > threshold
  double frr = 0.0;  // genuine with score <= threshold
};

// FAR/FRR at every distinct score.
std::vector<RocPoint> roc_curve(std::span<const double> genuine, std::span<const double> attack);

// Threshold where FAR == FRR, interpolating linearly between adjacent score
// candidates. When FAR == FRR over an interval, its midpoint is returned.
Calibration calibrate_threshold(std::span<const double> genuine, std::span<const double> attack);

}  // namespace dopplive

#endif  // DOPPLIVE_MATCHING_HPP_
