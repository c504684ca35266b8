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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dopplive/beamform.hpp"
#include "dopplive/config.hpp"
#include "dopplive/error.hpp"
#include "dopplive/evaluation.hpp"
#include "dopplive/features.hpp"
#include "dopplive/matching.hpp"
#include "dopplive/sim.hpp"
#include "dopplive/wavelet.hpp"
#include "support.hpp"

using namespace dopplive;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Constant-speed reflector measured through the feature extractor.
Outcome doppler_physics() {
  constexpr double f0 = 20000.0;
  double worst = 0.0;
  std::size_t frames = 0;
  auto measure = [&](double v, double angle, double fs) {
    ReflectorSpec r;
    r.angle_deg = angle;
    r.distance_m = 1.0;
    r.speed_profile.segments.push_back({0.0, 2.0, v, v});
    const double truth = v * std::cos(angle * testing::kPi / 180.0) * f0 / kSpeedOfSound;
    const auto slice = testing::probe_slice(render_reflector(r, f0, 1.0, fs), f0, 0.3, 0.7);
    for (double got : dominant_offsets(slice)) {
      worst = std::max(worst, std::abs(got - truth) / slice.bin_width_hz);
      ++frames;
    }
    return truth;
  };
  for (double fs : {48000.0, 96000.0, 192000.0}) {
    for (double v : {0.02, 0.05, 0.1, 0.2}) {
      for (double angle : {0.0, 30.0, 60.0}) measure(v, angle, fs);
    }
  }
  const double anchor = measure(0.017, 0.0, 48000.0);
  const bool anchor_ok = std::abs(anchor - 1.0) < 0.01;
  return {worst <= 1.0 && anchor_ok,
          "worst error " + fmt("%.3f", worst) + " bins over " + std::to_string(frames) +
              " frames; 0.017 m/s -> " + fmt("%.4f", anchor) + " Hz"};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome formula_oracles() {
  std::mt19937_64 rng(2026);
  std::uniform_int_distribution<std::size_t> len(2, 200);
  std::uniform_real_distribution<double> weight(0.01, 10.0);
  double worst_pearson = 0.0;
  double worst_weighted = 0.0;
  for (int pair = 0; pair < 1000; ++pair) {
    const std::size_t n = len(rng);
    const auto a = testing::random_vector(rng, n, -5.0, 5.0);
    const auto b = testing::random_vector(rng, n, -5.0, 5.0);
    // Sample-statistics form of the correlation coefficient.
    const double ma = mean_of(a), mb = mean_of(b);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cov += (a[i] - ma) * (b[i] - mb);
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
    }
    const double sa = std::sqrt(va / (n - 1.0)), sb = std::sqrt(vb / (n - 1.0));
    worst_pearson = std::max(worst_pearson, std::abs(pearson(a, b) - cov / ((n - 1.0) * sa * sb)));

    // Split the pair into two phonemes with independent weights.
    const std::size_t cut = n >= 4 ? 2 + rng() % (n - 3) : n;
    std::vector<std::pair<std::size_t, std::size_t>> parts{{0, cut}};
    if (cut < n) parts.push_back({cut, n});
    std::map<std::string, PhonemeTemplate> templates;
    std::vector<LabelledBlock> test;
    std::vector<double> w;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto [lo, hi] = parts[p];
      ContourSet ta, tb;
      ta.frames_per_phoneme = tb.frames_per_phoneme = {hi - lo};
      for (std::size_t c = 0; c < kContourCount; ++c) {
        ta.contour(c).assign(a.begin() + lo, a.begin() + hi);
        tb.contour(c).assign(b.begin() + lo, b.begin() + hi);
      }
      const std::string label = "p" + std::to_string(p);
      w.push_back(weight(rng));
      templates.emplace(label, PhonemeTemplate{label, tb, w.back(), 2});
      test.push_back({label, ta});
    }
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto [lo, hi] = parts[p];
      std::vector<double> pa(a.begin() + lo, a.begin() + hi), pb(b.begin() + lo, b.begin() + hi);
      const double ca = mean_of(pa), cb = mean_of(pb);
      for (std::size_t t = 0; t < pa.size(); ++t) {
        num += (w[p] * (pa[t] - ca)) * (w[p] * (pb[t] - cb));
        da += (w[p] * (pa[t] - ca)) * (w[p] * (pa[t] - ca));
        db += (w[p] * (pb[t] - cb)) * (w[p] * (pb[t] - cb));
      }
    }
    const double expected = num / std::sqrt(da * db);
    const auto got = weighted_similarity(test, templates);
    worst_weighted = std::max(worst_weighted, std::abs(got.score - expected));
  }

  // Hand-enumerated weights.
  auto constant = [](std::size_t n, double v) {
    ContourSet cs;
    cs.frames_per_phoneme = {n};
    for (std::size_t c = 0; c < kContourCount; ++c) cs.contour(c).assign(n, v);
    return cs;
  };
  double worst_weight = 0.0;
  // Two trials of 10 frames, 0.1 apart on all 11 contours: area 11, w = 20/(eps + 11).
  worst_weight = std::max(worst_weight,
                          std::abs(phoneme_weight({constant(10, 0.0), constant(10, 0.1)}) - 20.0 / (kWeightEpsilon + 11.0)));
  // Identical trials hit the cap.
  worst_weight = std::max(worst_weight,
                          std::abs(phoneme_weight({constant(6, 0.4), constant(6, 0.4)}) - kMaxWeight));
  // Three trials at 0, 0.1, 0.3 over 5 frames: pair areas 5.5, 16.5, 11; w = 15/(eps + 33).
  worst_weight = std::max(
      worst_weight,
      std::abs(phoneme_weight({constant(5, 0.0), constant(5, 0.1), constant(5, 0.3)}) - 15.0 / (kWeightEpsilon + 33.0)));

  const bool ok = worst_pearson <= 1e-12 && worst_weighted <= 1e-12 && worst_weight <= 1e-9;
  return {ok, "pearson " + fmt("%.1e", worst_pearson) + ", weighted " +
                  fmt("%.1e", worst_weighted) + ", weight " + fmt("%.1e", worst_weight)};
}

Outcome dwt_round_trip() {
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (std::size_t n = 8; n <= 512; ++n) {
    const auto x = testing::random_vector(rng, n, -100.0, 100.0);
    const auto y = dwt_reconstruct(dwt_decompose(x));
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale = std::max(scale, std::abs(x[i]));
      err = std::max(err, std::abs(x[i] - y[i]));
    }
    worst = std::max(worst, y.size() == n ? err / scale : 1.0);
  }
  ContourSet cs;
  cs.frames_per_phoneme = {30, 20};
  for (std::size_t c = 0; c < kContourCount; ++c) cs.contour(c) = testing::random_vector(rng, 50);
  DenoiseOptions zero;
  zero.multiplier = 0.0;
  const ContourSet out = denoise_contour_set(cs, zero);
  double worst_denoise = 0.0;
  for (std::size_t c = 0; c < kContourCount; ++c) {
    for (std::size_t i = 0; i < 50; ++i) {
      worst_denoise = std::max(worst_denoise, std::abs(out.contour(c)[i] - cs.contour(c)[i]));
    }
  }
  return {worst < 1e-9 && worst_denoise < 1e-9,
          "relative error " + fmt("%.1e", worst) + " (lengths 8-512), zero-multiplier denoise " +
              fmt("%.1e", worst_denoise)};
}

CorpusOptions acceptance_corpus() {
  CorpusOptions o;
  o.n_users = 10;
  o.n_enroll = 3;
  o.n_genuine = 10;
  o.n_playback = 10;
  o.n_mimicry = 10;
  o.mimicry_jitter = 0.04;
  o.seed = 1;
  return o;
}

std::string eer_summary(const CorpusEvaluation& ev) {
  return "combined " + fmt("%.3f", ev.calibration(FeatureMode::kCombined).eer) + ", energy " +
         fmt("%.3f", ev.calibration(FeatureMode::kEnergyOnly).eer) + ", frequency " +
         fmt("%.3f", ev.calibration(FeatureMode::kFrequencyOnly).eer);
}

Outcome end_to_end_eer(const CorpusEvaluation& ev) {
  const double c = ev.calibration(FeatureMode::kCombined).eer;
  const double e = ev.calibration(FeatureMode::kEnergyOnly).eer;
  const double f = ev.calibration(FeatureMode::kFrequencyOnly).eer;
  return {c <= 0.05 && c <= std::min(e, f),
          "EER " + eer_summary(ev) + " over " +
              std::to_string(ev.genuine_scores(FeatureMode::kCombined).size()) + " genuine / " +
              std::to_string(ev.attack_scores(FeatureMode::kCombined).size()) + " attack trials"};
}

Outcome playback_separation(const CorpusEvaluation& ev) {
  std::map<std::string, double> lowest_genuine, highest_playback;
  for (const auto& t : ev.trials) {
    const double s = t.score(FeatureMode::kCombined);
    if (t.kind == TrialKind::kGenuine) {
      auto [it, fresh] = lowest_genuine.emplace(t.user, s);
      if (!fresh) it->second = std::min(it->second, s);
    } else if (t.kind == TrialKind::kPlayback) {
      auto [it, fresh] = highest_playback.emplace(t.user, s);
      if (!fresh) it->second = std::max(it->second, s);
    }
  }
  double margin = 1e9;
  for (const auto& [user, hi] : highest_playback) margin = std::min(margin, lowest_genuine[user] - hi);
  return {ev.playback_separated(FeatureMode::kCombined) && margin > 0.0,
          "smallest per-user margin " + fmt("%.3f", margin) + " across " +
              std::to_string(highest_playback.size()) + " users"};
}

Outcome beamforming() {
  const ArrayGeometry g = ArrayGeometry::circular();
  std::vector<double> gains;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SteeringDirection d{72.0 * (seed - 1), 15.0};
    const AudioBuffer in = render_plane_wave(g, d, 20000.0, 0.1, 1.0, 48000.0, 0.3, seed);
    gains.push_back(testing::tone_snr_db(delay_and_sum(in, g, d).samples(), 48000.0, 20000.0) -
                    testing::tone_snr_db(in.channel(0), 48000.0, 20000.0));
  }
  const double gain = mean_of(gains);
  const double lo = *std::min_element(gains.begin(), gains.end());
  const double hi = *std::max_element(gains.begin(), gains.end());
  const double target = 10.0 * std::log10(7.0);

  std::size_t hits = 0, total = 0;
  for (const SteeringDirection truth :
       {SteeringDirection{0, 0}, SteeringDirection{45, 10}, SteeringDirection{125, 30},
        SteeringDirection{200, 55}, SteeringDirection{315, 75}}) {
    const AudioBuffer in = render_plane_wave(g, truth, 20000.0, 0.5, 0.1, 48000.0, 0.0, 1);
    const auto found = search_direction(in, g, 5.0);
    hits += found.direction.azimuth_deg == truth.azimuth_deg &&
            found.direction.elevation_deg == truth.elevation_deg;
    ++total;
  }
  return {std::abs(lo - target) <= 1.0 && std::abs(hi - target) <= 1.0 && hits == total,
          "SNR gain " + fmt("%.2f", gain) + " dB (range " + fmt("%.2f", lo) + ".." +
              fmt("%.2f", hi) + ", target " + fmt("%.2f", target) + "), grid maximum at truth " +
              std::to_string(hits) + "/" + std::to_string(total)};
}

Outcome sample_rate_robustness(const CorpusEvaluation& at48) {
  const CorpusPlan plan = plan_corpus(acceptance_corpus());
  const CorpusEvaluation at192 = evaluate_plan(plan, 192000.0, RunConfig{}.pipeline());
  const double e48 = at48.calibration(FeatureMode::kCombined).eer;
  const double e192 = at192.calibration(FeatureMode::kCombined).eer;
  return {e48 - e192 <= 0.03, "combined EER " + fmt("%.3f", e48) + " at 48 kHz, " +
                                  fmt("%.3f", e192) + " at 192 kHz"};
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

Outcome determinism() {
  testing::TempDir dir;
  for (const char* name : {"a", "b"}) {
    if (cli({"simulate", "-o", (dir / name).string(), "--users", "2", "--trials", "3", "--seed",
             "7"}) != 0) {
      return {false, "simulate failed"};
    }
  }
  std::size_t files = 0, identical = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    ++files;
    identical += slurp(entry.path()) == slurp(dir / "b" / fs::relative(entry.path(), dir / "a"));
  }
  const fs::path corpus = dir / "a";
  const fs::path profiles = dir / "profiles";
  if (cli({"--profiles", profiles.string(), "enroll", "--user", "user00",
           (corpus / "user00/enroll_0.wav").string(), (corpus / "user00/enroll_1.wav").string(),
           (corpus / "user00/enroll_2.wav").string()}) != 0) {
    return {false, "enroll failed"};
  }
  std::string combined;
  for (const char* stem : {"genuine_0", "genuine_1", "playback_0", "mimicry_0"}) {
    std::string out;
    cli({"--profiles", profiles.string(), "verify", "--user", "user00",
         (corpus / "user00" / (std::string(stem) + ".wav")).string()},
        &out);
    combined += out;
  }
  const bool golden = combined == slurp(fs::path(DOPPLIVE_GOLDEN_DIR) / "verify_seed7.txt");
  return {files > 0 && identical == files && golden,
          std::to_string(identical) + "/" + std::to_string(files) +
              " corpus files byte-identical; verify output " +
              (golden ? "matches" : "differs from") + " golden file"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](const char* name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  };

  report("doppler-physics-oracle", doppler_physics);
  report("formula-oracles", formula_oracles);
  report("dwt-round-trip", dwt_round_trip);

  CorpusEvaluation at48;
  report("synthetic-end-to-end-eer", [&] {
    at48 = evaluate_plan(plan_corpus(acceptance_corpus()), 48000.0, RunConfig{}.pipeline());
    return end_to_end_eer(at48);
  });
  report("playback-separability", [&] { return playback_separation(at48); });
  report("beamforming-gain", beamforming);
  report("sampling-rate-robustness", [&] { return sample_rate_robustness(at48); });
  report("determinism", determinism);

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
