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

#ifndef DOPPLIVE_EVALUATION_HPP_
#define DOPPLIVE_EVALUATION_HPP_

#include <array>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "dopplive/matching.hpp"
#include "dopplive/pipeline.hpp"
#include "dopplive/sim.hpp"

namespace dopplive {

inline constexpr std::array<FeatureMode, 3> kAllFeatureModes = {
    FeatureMode::kEnergyOnly, FeatureMode::kFrequencyOnly, FeatureMode::kCombined};

// Score given to a trial that cannot be scored at all (wrong phoneme count,
// no usable contour). It is below any correlation.
inline constexpr double kUnscorable = -2.0;

struct TrialScore {
  std::string user;
  TrialKind kind = TrialKind::kGenuine;
  bool live = false;
  std::string path;
  // Indexed like kAllFeatureModes.
  std::array<double, 3> scores{};

  double score(FeatureMode mode) const;
};

struct EvaluationItem {
  std::string user;
  TrialKind kind = TrialKind::kGenuine;
  std::string path;
  std::function<Recording()> load;
};

struct CorpusEvaluation {
  std::vector<TrialScore> trials;

  std::vector<double> genuine_scores(FeatureMode mode) const;
  std::vector<double> attack_scores(FeatureMode mode) const;
  Calibration calibration(FeatureMode mode) const;
  // True when every playback trial scores strictly below every genuine trial
  // of the same user.
  bool playback_separated(FeatureMode mode) const;
};

// Enrolls each user from their kEnroll items (text-dependent), then scores
// every other item against that user's template in all three modes.
CorpusEvaluation evaluate_items(const std::vector<EvaluationItem>& items,
                                const PipelineConfig& config);

// Renders the plan in memory at `sample_rate` and evaluates it.
CorpusEvaluation evaluate_plan(const CorpusPlan& plan, double sample_rate,
                               const PipelineConfig& config);

// Evaluates a corpus on disk; alignments are read from the .align.csv files
// next to each WAV.
CorpusEvaluation evaluate_manifest(const std::filesystem::path& manifest_path,
                                   const PipelineConfig& config);

}  // namespace dopplive

#endif  // DOPPLIVE_EVALUATION_HPP_
