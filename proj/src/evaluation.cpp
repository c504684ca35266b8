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

#include "dopplive/evaluation.hpp"

#include <algorithm>
#include <map>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {

std::size_t mode_index(FeatureMode mode) {
  for (std::size_t i = 0; i < kAllFeatureModes.size(); ++i) {
    if (kAllFeatureModes[i] == mode) return i;
  }
  return 0;
}

double safe_mode_score(const SimilarityResult& result, FeatureMode mode) {
  try {
    return mode_score(result, mode);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kUndefinedCorrelation) throw;
    return kUnscorable;
  }
}

}  // namespace

double TrialScore::score(FeatureMode mode) const { return scores[mode_index(mode)]; }

std::vector<double> CorpusEvaluation::genuine_scores(FeatureMode mode) const {
  std::vector<double> out;
  for (const auto& t : trials) {
    if (t.live) out.push_back(t.score(mode));
  }
  return out;
}

std::vector<double> CorpusEvaluation::attack_scores(FeatureMode mode) const {
  std::vector<double> out;
  for (const auto& t : trials) {
    if (!t.live) out.push_back(t.score(mode));
  }
  return out;
}

Calibration CorpusEvaluation::calibration(FeatureMode mode) const {
  return calibrate_threshold(genuine_scores(mode), attack_scores(mode));
}

bool CorpusEvaluation::playback_separated(FeatureMode mode) const {
  std::map<std::string, double> lowest_genuine;
  std::map<std::string, double> highest_playback;
  for (const auto& t : trials) {
    if (t.kind == TrialKind::kGenuine) {
      auto [it, fresh] = lowest_genuine.try_emplace(t.user, t.score(mode));
      if (!fresh) it->second = std::min(it->second, t.score(mode));
    } else if (t.kind == TrialKind::kPlayback) {
      auto [it, fresh] = highest_playback.try_emplace(t.user, t.score(mode));
      if (!fresh) it->second = std::max(it->second, t.score(mode));
    }
  }
  for (const auto& [user, high] : highest_playback) {
    const auto it = lowest_genuine.find(user);
    if (it != lowest_genuine.end() && !(high < it->second)) return false;
  }
  return true;
}

CorpusEvaluation evaluate_items(const std::vector<EvaluationItem>& items,
                                const PipelineConfig& config) {
  std::map<std::string, std::vector<Recording>> enrollment;
  std::vector<std::string> users;
  for (const auto& item : items) {
    if (item.kind != TrialKind::kEnroll) continue;
    if (!enrollment.count(item.user)) users.push_back(item.user);
    enrollment[item.user].push_back(item.load());
  }
  std::map<std::string, PassphraseTemplate> templates;
  for (const auto& user : users) {
    templates.emplace(user, enroll_passphrase(enrollment[user], config));
  }
  enrollment.clear();

  CorpusEvaluation out;
  for (const auto& item : items) {
    if (item.kind == TrialKind::kEnroll) continue;
    const auto tmpl = templates.find(item.user);
    if (tmpl == templates.end()) {
      throw Error(ErrorKind::kEnrollment, "user " + item.user + " has no enrollment trials");
    }
    TrialScore ts;
    ts.user = item.user;
    ts.kind = item.kind;
    ts.live = item.kind == TrialKind::kGenuine;
    ts.path = item.path;
    ts.scores.fill(kUnscorable);
    try {
      const SimilarityResult r =
          verify_passphrase(item.load(), tmpl->second, config, FeatureMode::kCombined);
      for (std::size_t m = 0; m < kAllFeatureModes.size(); ++m) {
        ts.scores[m] = safe_mode_score(r, kAllFeatureModes[m]);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kNoMatch && e.kind() != ErrorKind::kUndefinedCorrelation) throw;
    }
    out.trials.push_back(std::move(ts));
  }
  return out;
}

CorpusEvaluation evaluate_plan(const CorpusPlan& plan, double sample_rate,
                               const PipelineConfig& config) {
  std::vector<EvaluationItem> items;
  for (const auto& item : plan.items) {
    const SceneSpec* scene = &item.scene;
    items.push_back({item.user, item.kind, item.stem(), [scene, sample_rate] {
                       RenderedScene r = render_scene(*scene, sample_rate);
                       return Recording{std::move(r.audio), std::move(r.utterance)};
                     }});
  }
  return evaluate_items(items, config);
}

CorpusEvaluation evaluate_manifest(const std::filesystem::path& manifest_path,
                                   const PipelineConfig& config) {
  const auto root = manifest_path.parent_path();
  std::vector<EvaluationItem> items;
  for (const auto& entry : read_manifest(manifest_path)) {
    const auto wav = root / entry.path;
    auto align = wav;
    align.replace_extension(".align.csv");
    items.push_back({entry.user, entry.kind, entry.path, [wav, align] {
                       return load_recording(wav, std::filesystem::exists(align) ? align
                                                                                 : std::filesystem::path{});
                     }});
  }
  return evaluate_items(items, config);
}

}  // namespace dopplive
