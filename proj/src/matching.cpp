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

#include "dopplive/matching.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {

// A sequence whose spread is below this fraction of its magnitude is treated
// as constant; wavelet reconstruction leaves ~1e-15 ripple on flat contours.
constexpr double kFlatTolerance = 1e-10;

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool is_flat(std::span<const double> v) {
  if (v.empty()) return true;
  double max_abs = 0.0;
  for (double x : v) max_abs = std::max(max_abs, std::abs(x));
  if (max_abs == 0.0) return true;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size())) <= kFlatTolerance * max_abs;
}

// Mean-centred copy; flat sequences centre to exact zeros.
std::vector<double> centred(std::span<const double> v) {
  std::vector<double> out(v.size(), 0.0);
  if (is_flat(v)) return out;
  const double m = mean_of(v);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - m;
  return out;
}

}  // namespace

const char* feature_mode_name(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kEnergyOnly: return "energy";
    case FeatureMode::kFrequencyOnly: return "frequency";
    case FeatureMode::kCombined: return "combined";
  }
  return "combined";
}

FeatureMode parse_feature_mode(const std::string& text) {
  if (text == "energy") return FeatureMode::kEnergyOnly;
  if (text == "frequency") return FeatureMode::kFrequencyOnly;
  if (text == "combined") return FeatureMode::kCombined;
  throw Error(ErrorKind::kInvalidArgument, "unknown feature mode '" + text + "'");
}

bool contour_selected(FeatureMode mode, std::size_t contour_index) {
  switch (mode) {
    case FeatureMode::kEnergyOnly: return contour_index < kEnergyBandCount;
    case FeatureMode::kFrequencyOnly:
      return contour_index >= kEnergyBandCount && contour_index < kContourCount;
    case FeatureMode::kCombined: return contour_index < kContourCount;
  }
  return false;
}

const char* verdict_name(Verdict verdict) {
  return verdict == Verdict::kLive ? "Live" : "Attack";
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kInvalidArgument, "pearson needs equal-length sequences");
  }
  const std::size_t n = a.size();
  if (n < 2) throw Error(ErrorKind::kInvalidArgument, "pearson needs at least two values");
  if (is_flat(a) || is_flat(b)) {
    throw Error(ErrorKind::kUndefinedCorrelation, "correlation with a constant sequence");
  }
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  const double dof = static_cast<double>(n - 1);
  const double sd_a = std::sqrt(saa / dof);
  const double sd_b = std::sqrt(sbb / dof);
  return std::clamp(sab / (dof * sd_a * sd_b), -1.0, 1.0);
}

PassphraseTemplate build_passphrase_template(const std::vector<ContourSet>& trials,
                                             std::vector<std::string> phoneme_labels) {
  if (trials.size() < 2) {
    throw Error(ErrorKind::kEnrollment, "a passphrase template needs at least two trials");
  }
  const ContourSet& first = trials.front();
  for (const auto& t : trials) {
    t.validate();
    if (t.phoneme_count() != first.phoneme_count()) {
      throw Error(ErrorKind::kEnrollment,
                  "enrollment trials disagree on phoneme count (" +
                      std::to_string(first.phoneme_count()) + " vs " +
                      std::to_string(t.phoneme_count()) + ")");
    }
  }
  if (!phoneme_labels.empty() && phoneme_labels.size() != first.phoneme_count()) {
    throw Error(ErrorKind::kEnrollment, "label count does not match phoneme count");
  }

  PassphraseTemplate out;
  out.trial_count = trials.size();
  out.phoneme_labels = std::move(phoneme_labels);
  out.contours = first;
  for (std::size_t i = 0; i < kContourCount; ++i) out.contours.contour(i).assign(first.length(), 0.0);
  for (const auto& t : trials) {
    const ContourSet aligned = t.resampled(first.frames_per_phoneme);
    for (std::size_t i = 0; i < kContourCount; ++i) {
      auto& dst = out.contours.contour(i);
      const auto& src = aligned.contour(i);
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
  const double n = static_cast<double>(trials.size());
  for (std::size_t i = 0; i < kContourCount; ++i) {
    for (double& v : out.contours.contour(i)) v /= n;
  }
  return out;
}

double phoneme_weight(const std::vector<ContourSet>& trials) {
  if (trials.size() < 2) {
    throw Error(ErrorKind::kEnrollment, "a phoneme weight needs at least two trials");
  }
  double total_length = 0.0;
  for (const auto& t : trials) total_length += static_cast<double>(t.length());
  double area = 0.0;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (std::size_t j = i + 1; j < trials.size(); ++j) {
      const std::size_t shared = std::min(trials[i].length(), trials[j].length());
      for (std::size_t c = 0; c < kContourCount; ++c) {
        const auto& a = trials[i].contour(c);
        const auto& b = trials[j].contour(c);
        for (std::size_t t = 0; t < shared; ++t) area += std::abs(a[t] - b[t]);
      }
    }
  }
  return std::min(kMaxWeight, total_length / (kWeightEpsilon + area));
}

PhonemeTemplateSet build_phoneme_templates(const std::vector<LabelledContours>& corpus) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<ContourSet>> blocks;
  for (const auto& item : corpus) {
    item.contours.validate();
    if (item.contours.phoneme_count() != item.utterance.segments.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "contour set and segmentation disagree on phoneme count");
    }
    for (std::size_t p = 0; p < item.utterance.segments.size(); ++p) {
      const std::string& label = item.utterance.segments[p].label;
      if (!blocks.contains(label)) order.push_back(label);
      blocks[label].push_back(item.contours.block(p));
    }
  }

  PhonemeTemplateSet out;
  for (const auto& label : order) {
    const auto& group = blocks[label];
    if (group.size() < 2) {
      out.excluded_labels.push_back(label);
      continue;
    }
    std::vector<std::size_t> lengths;
    for (const auto& b : group) lengths.push_back(b.length());
    std::sort(lengths.begin(), lengths.end());
    const std::size_t n = lengths.size();
    const std::size_t target =
        n % 2 == 1 ? lengths[n / 2]
                   : static_cast<std::size_t>(std::llround(0.5 * (lengths[n / 2 - 1] + lengths[n / 2])));

    PhonemeTemplate tmpl;
    tmpl.label = label;
    tmpl.trial_count = group.size();
    tmpl.contours = group.front();
    tmpl.contours.frames_per_phoneme = {target};
    for (std::size_t c = 0; c < kContourCount; ++c) tmpl.contours.contour(c).assign(target, 0.0);
    for (const auto& b : group) {
      if (b.length() != target && (b.length() < 2 || target < 2)) {
        throw Error(ErrorKind::kEnrollment,
                    "phoneme '" + label + "' has a block too short to length-normalize");
      }
      for (std::size_t c = 0; c < kContourCount; ++c) {
        const auto resampled = resample_linear(b.contour(c), target);
        auto& dst = tmpl.contours.contour(c);
        for (std::size_t t = 0; t < target; ++t) dst[t] += resampled[t];
      }
    }
    for (std::size_t c = 0; c < kContourCount; ++c) {
      for (double& v : tmpl.contours.contour(c)) v /= static_cast<double>(group.size());
    }
    tmpl.weight = phoneme_weight(group);
    out.templates.emplace(label, std::move(tmpl));
  }
  return out;
}

double mode_score(const SimilarityResult& result, FeatureMode mode) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < kContourCount; ++c) {
    if (result.contour_used[c] && contour_selected(mode, c)) {
      sum += result.per_contour[c];
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorKind::kUndefinedCorrelation,
                std::string("no usable contour for feature mode ") + feature_mode_name(mode));
  }
  return sum / static_cast<double>(count);
}

SimilarityResult weighted_similarity(const std::vector<LabelledBlock>& test,
                                     const std::map<std::string, PhonemeTemplate>& templates,
                                     FeatureMode mode) {
  struct Pair {
    const ContourSet* test;
    const PhonemeTemplate* tmpl;
  };
  std::vector<Pair> matched;
  for (const auto& item : test) {
    const auto it = templates.find(item.label);
    if (it == templates.end()) continue;
    const std::size_t have = item.block.length();
    const std::size_t want = it->second.contours.length();
    if (have != want && (have < 2 || want < 2)) continue;
    matched.push_back({&item.block, &it->second});
  }
  if (matched.empty()) {
    throw Error(ErrorKind::kNoMatch, "no test phoneme has a matching template");
  }

  SimilarityResult out;
  out.matched_phonemes = matched.size();
  out.total_phonemes = test.size();
  for (std::size_t c = 0; c < kContourCount; ++c) {
    double num = 0.0, den_a = 0.0, den_b = 0.0;
    for (const auto& [block, tmpl] : matched) {
      const auto& b_raw = tmpl->contours.contour(c);
      const auto a = centred(resample_linear(block->contour(c), b_raw.size()));
      const auto b = centred(b_raw);
      const double w = tmpl->weight;
      for (std::size_t t = 0; t < a.size(); ++t) {
        const double wa = w * a[t];
        const double wb = w * b[t];
        num += wa * wb;
        den_a += wa * wa;
        den_b += wb * wb;
      }
    }
    if (den_a > 0.0 && den_b > 0.0) {
      out.per_contour[c] = std::clamp(num / std::sqrt(den_a * den_b), -1.0, 1.0);
      out.contour_used[c] = true;
    }
  }
  out.score = mode_score(out, mode);
  return out;
}

SimilarityResult score_text_dependent(const ContourSet& test, const PassphraseTemplate& tmpl,
                                      FeatureMode mode) {
  if (test.length() != tmpl.contours.length()) {
    throw Error(ErrorKind::kInvalidArgument,
                "test contours must be length-normalized to the template (" +
                    std::to_string(test.length()) + " vs " +
                    std::to_string(tmpl.contours.length()) + " frames)");
  }
  SimilarityResult out;
  out.matched_phonemes = test.phoneme_count();
  out.total_phonemes = test.phoneme_count();
  for (std::size_t c = 0; c < kContourCount; ++c) {
    try {
      out.per_contour[c] = pearson(test.contour(c), tmpl.contours.contour(c));
      out.contour_used[c] = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kUndefinedCorrelation) throw;
    }
  }
  out.score = mode_score(out, mode);
  return out;
}

LivenessDecision decide(double score, double threshold) {
  LivenessDecision d;
  d.score = score;
  d.threshold = threshold;
  d.verdict = score > threshold ? Verdict::kLive : Verdict::kAttack;
  return d;
}

std::vector<RocPoint> roc_curve(std::span<const double> genuine, std::span<const double> attack) {
  std::vector<double> candidates(genuine.begin(), genuine.end());
  candidates.insert(candidates.end(), attack.begin(), attack.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<double> g(genuine.begin(), genuine.end());
  std::vector<double> a(attack.begin(), attack.end());
  std::sort(g.begin(), g.end());
  std::sort(a.begin(), a.end());
  std::vector<RocPoint> out;
  out.reserve(candidates.size());
  for (double t : candidates) {
    const auto accepted_attacks = a.end() - std::upper_bound(a.begin(), a.end(), t);
    const auto rejected_genuine = std::upper_bound(g.begin(), g.end(), t) - g.begin();
    out.push_back({t, static_cast<double>(accepted_attacks) / static_cast<double>(a.size()),
                   static_cast<double>(rejected_genuine) / static_cast<double>(g.size())});
  }
  return out;
}

Calibration calibrate_threshold(std::span<const double> genuine, std::span<const double> attack) {
  if (genuine.empty() || attack.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "calibration needs genuine and attack scores");
  }
  std::vector<RocPoint> points = roc_curve(genuine, attack);
  // Everything is accepted below the lowest score.
  points.insert(points.begin(), RocPoint{points.front().threshold - 1.0, 1.0, 0.0});

  auto gap = [](const RocPoint& p) { return p.far - p.frr; };
  std::size_t j = 0;
  while (gap(points[j]) > 0.0) ++j;  // terminates: the top candidate has FAR 0, FRR 1

  if (gap(points[j]) == 0.0) {
    std::size_t k = j;
    while (k + 1 < points.size() && gap(points[k + 1]) == 0.0) ++k;
    const double upper = k + 1 < points.size() ? points[k + 1].threshold : points[k].threshold;
    return {0.5 * (points[j].threshold + upper), points[j].far};
  }
  const RocPoint& lo = points[j - 1];
  const RocPoint& hi = points[j];
  const double alpha = gap(lo) / (gap(lo) - gap(hi));
  return {lo.threshold + alpha * (hi.threshold - lo.threshold),
          lo.far + alpha * (hi.far - lo.far)};
}

}  // namespace dopplive
