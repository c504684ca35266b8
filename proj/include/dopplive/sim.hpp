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

#ifndef DOPPLIVE_SIM_HPP_
#define DOPPLIVE_SIM_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dopplive/audio.hpp"
#include "dopplive/beamform.hpp"
#include "dopplive/segmentation.hpp"
#include "dopplive/signal.hpp"

namespace dopplive {

// Articulator-scale speed limit, m/s.
inline constexpr double kMaxReflectorSpeed = 1.0;

// Linear speed ramp over [t0_s, t1_s). Overlapping segments add.
struct SpeedSegment {
  double t0_s = 0.0;
  double t1_s = 0.0;
  double v_start = 0.0;
  double v_end = 0.0;
};

// Piecewise-linear speed in m/s, positive towards the microphone, zero
// outside every segment.
struct SpeedProfile {
  std::vector<SpeedSegment> segments;

  double speed(double t) const;
  // Integral of speed from 0 to t, closed form.
  double displacement(double t) const;
  double max_abs_speed() const;
};

struct ReflectorSpec {
  SpeedProfile speed_profile;
  double angle_deg = 0.0;
  double distance_m = 0.05;
  double reflectivity = 1.0;

  void validate() const;
};

struct RenderOptions {
  double doppler_factor_k = 1.0;
  double speed_of_sound = kSpeedOfSound;
};

// reflectivity / d(t) * sin(2 pi f0 (t - k * r(t) / c)) with
// r(t) = -cos(alpha) * displacement(t) and d(t) = max(distance + r(t), 1 cm).
AudioBuffer render_reflector(const ReflectorSpec& spec, double f0_hz, double duration_s,
                             double sample_rate, const RenderOptions& options = {});

// k * v(t) * cos(alpha) * f0 / c.
double analytic_offset_hz(const ReflectorSpec& spec, double t, double f0_hz,
                          const RenderOptions& options = {});

struct MotionPattern {
  double v_start = 0.0;
  double v_end = 0.0;
};

struct ScriptEntry {
  std::string label;
  double duration_s = 0.0;
  std::vector<MotionPattern> motions;  // one per reflector
};

enum class SceneKind { kLive, kPlayback };
const char* scene_kind_name(SceneKind kind);

struct SceneSpec {
  // Script motions are added to whatever each profile already holds.
  std::vector<ReflectorSpec> reflectors;
  std::vector<ScriptEntry> phoneme_script;
  double probe_f0 = kDefaultProbeHz;
  double doppler_factor_k = 1.0;
  double speed_of_sound = kSpeedOfSound;
  std::optional<double> noise_snr_db;
  SceneKind kind = SceneKind::kLive;
  // Direct-path probe.
  double carrier_amplitude = 1.0;
  // Voice-band tone bursts; 0 disables.
  double voice_amplitude = 0.3;
  double lead_silence_s = 0.15;
  double tail_silence_s = 0.15;
  std::uint64_t noise_seed = 0;

  double duration_s() const;
  void validate() const;
};

// Reflectors with the phoneme script folded into their speed profiles.
std::vector<ReflectorSpec> scene_reflectors(const SceneSpec& scene);

struct TruthRecord {
  double frame_hop_s = 0.01;
  double f0_hz = kDefaultProbeHz;
  double doppler_factor_k = 1.0;
  SceneKind kind = SceneKind::kLive;
  // offsets_hz[r][i] is reflector r's analytic offset at t = i * frame_hop_s.
  std::vector<std::vector<double>> offsets_hz;
  std::vector<ReflectorSpec> reflectors;
};

std::string truth_to_json(const TruthRecord& truth);

struct RenderedScene {
  AudioBuffer audio;
  // Includes the lead and tail "sil" rows.
  std::vector<PhonemeSegment> alignment;
  // Alignment without pauses, ready for feature extraction.
  SegmentedUtterance utterance;
  TruthRecord truth;
};

RenderedScene render_scene(const SceneSpec& scene, double sample_rate);

// Adds +jitter or -jitter (seeded coin flip) to every reflector's speeds for
// every phoneme, clamped to the articulator speed limit.
SceneSpec perturb_scene(const SceneSpec& scene, double speed_jitter, std::uint64_t seed);

// Surrogate voice frequency for a phoneme label, 300..3000 Hz.
double voice_frequency_hz(const std::string& label);

// Plane wave of frequency f arriving from `direction`, plus independent
// Gaussian noise (standard deviation noise_std) per channel.
AudioBuffer render_plane_wave(const ArrayGeometry& geometry, const SteeringDirection& direction,
                              double frequency_hz, double amplitude, double duration_s,
                              double sample_rate, double noise_std, std::uint64_t seed);

struct CorpusOptions {
  std::size_t n_users = 2;
  std::size_t n_enroll = 3;
  std::size_t n_genuine = 3;
  std::size_t n_playback = 1;
  std::size_t n_mimicry = 1;
  double enroll_jitter = 0.01;
  double mimicry_jitter = 0.04;
  std::optional<double> noise_snr_db = 30.0;
  double probe_f0 = kDefaultProbeHz;
  double doppler_factor_k = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class TrialKind { kEnroll, kGenuine, kPlayback, kMimicry };
const char* trial_kind_name(TrialKind kind);

struct CorpusItem {
  std::string user;
  TrialKind kind = TrialKind::kEnroll;
  std::size_t index = 0;
  SceneSpec scene;

  bool live() const { return kind == TrialKind::kEnroll || kind == TrialKind::kGenuine; }
  // "<user>/<kind>_<index>"
  std::string stem() const;
};

struct CorpusPlan {
  CorpusOptions options;
  std::vector<std::string> users;
  std::vector<SceneSpec> base_scenes;  // parallel to users
  std::vector<CorpusItem> items;
};

// Random live scene: 3-4 reflectors, 5-7 phoneme passphrase.
SceneSpec random_live_scene(std::uint64_t seed, double probe_f0 = kDefaultProbeHz);

// Single reflector moving at the reflectivity-weighted mean of the live
// scene's radial speeds.
SceneSpec playback_scene(const SceneSpec& live);

CorpusPlan plan_corpus(const CorpusOptions& options);

// Writes <root>/<user>/<kind>_<index>.{wav,align.csv,truth.json} and
// <root>/manifest.csv. Returns the number of scene files written.
std::size_t write_corpus(const CorpusPlan& plan, const std::filesystem::path& root,
                         double sample_rate);

std::size_t generate_corpus(const std::filesystem::path& root, std::size_t n_users,
                            std::size_t n_trials, std::uint64_t seed, double sample_rate = 48000.0);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string user;
  TrialKind kind = TrialKind::kEnroll;
  bool live = false;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);

}  // namespace dopplive

#endif  // DOPPLIVE_SIM_HPP_
