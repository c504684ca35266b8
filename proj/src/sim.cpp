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

#include "dopplive/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "dopplive/error.hpp"
#include "json.hpp"

namespace dopplive {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinDistance = 0.01;
constexpr double kVoiceRampS = 0.01;

const std::vector<std::string> kPhonemeInventory = {
    "aa", "ae", "ah", "ao", "aw", "ay", "b",  "ch", "d",  "eh", "er", "ey", "f",  "g",
    "hh", "ih", "iy", "jh", "k",  "l",  "m",  "n",  "ow", "oy", "p",  "r",  "s",  "sh",
    "t",  "th", "uh", "uw", "v",  "w",  "y",  "z"};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(seed ^ a) ^ b) ^ c);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double random_sign(std::mt19937_64& rng) { return (rng() & 1U) != 0 ? 1.0 : -1.0; }

double cos_deg(double deg) { return std::cos(deg * std::numbers::pi / 180.0); }

}  // namespace

double SpeedProfile::speed(double t) const {
  double v = 0.0;
  for (const auto& s : segments) {
    if (t >= s.t0_s && t < s.t1_s) {
      v += s.v_start + (s.v_end - s.v_start) * (t - s.t0_s) / (s.t1_s - s.t0_s);
    }
  }
  return v;
}

double SpeedProfile::displacement(double t) const {
  double d = 0.0;
  for (const auto& s : segments) {
    if (t <= s.t0_s) continue;
    const double tau = std::min(t, s.t1_s) - s.t0_s;
    const double slope = (s.v_end - s.v_start) / (s.t1_s - s.t0_s);
    d += s.v_start * tau + 0.5 * slope * tau * tau;
  }
  return d;
}

double SpeedProfile::max_abs_speed() const {
  // Overlaps add, so check every breakpoint from both sides.
  std::vector<double> points;
  for (const auto& s : segments) {
    points.push_back(s.t0_s);
    points.push_back(s.t1_s);
  }
  double peak = 0.0;
  for (double p : points) {
    peak = std::max(peak, std::abs(speed(p)));
    peak = std::max(peak, std::abs(speed(std::nextafter(p, -1e300))));
  }
  return peak;
}

void ReflectorSpec::validate() const {
  if (!(distance_m > 0.0)) throw Error(ErrorKind::kInvalidArgument, "reflector distance must be positive");
  if (!(reflectivity > 0.0 && reflectivity <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "reflectivity must lie in (0, 1]");
  }
  for (const auto& s : speed_profile.segments) {
    if (!(s.t1_s > s.t0_s)) throw Error(ErrorKind::kInvalidArgument, "speed segment has no duration");
  }
  if (speed_profile.max_abs_speed() > kMaxReflectorSpeed + 1e-12) {
    throw Error(ErrorKind::kRange, "reflector speed exceeds 1 m/s");
  }
}

AudioBuffer render_reflector(const ReflectorSpec& spec, double f0_hz, double duration_s,
                             double sample_rate, const RenderOptions& options) {
  spec.validate();
  if (!(sample_rate > 0.0) || !(f0_hz > 0.0) || f0_hz >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing, "reflector frequency must lie below Nyquist");
  }
  if (!(duration_s > 0.0)) throw Error(ErrorKind::kInvalidArgument, "duration must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(duration_s * sample_rate - 1e-9));
  const double cos_a = cos_deg(spec.angle_deg);
  const double k_over_c = options.doppler_factor_k / options.speed_of_sound;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double range_delta = -cos_a * spec.speed_profile.displacement(t);
    const double distance = std::max(spec.distance_m + range_delta, kMinDistance);
    out[i] = spec.reflectivity / distance *
             std::sin(kTwoPi * f0_hz * (t - k_over_c * range_delta));
  }
  return AudioBuffer::mono(sample_rate, std::move(out));
}

double analytic_offset_hz(const ReflectorSpec& spec, double t, double f0_hz,
                          const RenderOptions& options) {
  return options.doppler_factor_k * spec.speed_profile.speed(t) * cos_deg(spec.angle_deg) * f0_hz /
         options.speed_of_sound;
}

const char* scene_kind_name(SceneKind kind) {
  return kind == SceneKind::kLive ? "live" : "playback";
}

double SceneSpec::duration_s() const {
  double total = lead_silence_s + tail_silence_s;
  for (const auto& e : phoneme_script) total += e.duration_s;
  return total;
}

void SceneSpec::validate() const {
  if (kind == SceneKind::kLive && reflectors.size() < 3) {
    throw Error(ErrorKind::kInvalidArgument, "live scenes need at least 3 reflectors");
  }
  if (kind == SceneKind::kPlayback && reflectors.size() != 1) {
    throw Error(ErrorKind::kInvalidArgument, "playback scenes have exactly 1 reflector");
  }
  if (phoneme_script.empty()) throw Error(ErrorKind::kInvalidArgument, "empty phoneme script");
  for (const auto& e : phoneme_script) {
    if (!(e.duration_s > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, "phoneme '" + e.label + "' has no duration");
    }
    if (e.motions.size() != reflectors.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "phoneme '" + e.label + "' needs one motion per reflector");
    }
  }
  if (lead_silence_s < 0.0 || tail_silence_s < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "silence padding must be non-negative");
  }
  if (!(doppler_factor_k > 0.0) || !(speed_of_sound > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "doppler factor and speed of sound must be positive");
  }
  for (const auto& r : scene_reflectors(*this)) r.validate();
}

std::vector<ReflectorSpec> scene_reflectors(const SceneSpec& scene) {
  std::vector<ReflectorSpec> out = scene.reflectors;
  double t = scene.lead_silence_s;
  for (const auto& e : scene.phoneme_script) {
    for (std::size_t r = 0; r < out.size() && r < e.motions.size(); ++r) {
      out[r].speed_profile.segments.push_back(
          {t, t + e.duration_s, e.motions[r].v_start, e.motions[r].v_end});
    }
    t += e.duration_s;
  }
  return out;
}

double voice_frequency_hz(const std::string& label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return 300.0 + static_cast<double>(h % 2701U);
}

std::string truth_to_json(const TruthRecord& truth) {
  nlohmann::ordered_json j;
  j["kind"] = scene_kind_name(truth.kind);
  j["f0_hz"] = truth.f0_hz;
  j["doppler_factor_k"] = truth.doppler_factor_k;
  j["frame_hop_s"] = truth.frame_hop_s;
  j["reflectors"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < truth.reflectors.size(); ++r) {
    const auto& spec = truth.reflectors[r];
    nlohmann::ordered_json jr;
    jr["angle_deg"] = spec.angle_deg;
    jr["distance_m"] = spec.distance_m;
    jr["reflectivity"] = spec.reflectivity;
    jr["offsets_hz"] = truth.offsets_hz[r];
    j["reflectors"].push_back(std::move(jr));
  }
  return j.dump(2) + "\n";
}

RenderedScene render_scene(const SceneSpec& scene, double sample_rate) {
  scene.validate();
  if (!(sample_rate > 0.0) || scene.probe_f0 >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing, "probe frequency must lie below Nyquist");
  }
  const double duration = scene.duration_s();
  const auto n = static_cast<std::size_t>(std::ceil(duration * sample_rate - 1e-9));
  const double audio_duration = static_cast<double>(n) / sample_rate;
  const RenderOptions ropts{scene.doppler_factor_k, scene.speed_of_sound};
  const auto reflectors = scene_reflectors(scene);

  std::vector<double> x(n, 0.0);
  for (const auto& r : reflectors) {
    const auto part = render_reflector(r, scene.probe_f0, duration, sample_rate, ropts);
    const auto s = part.samples();
    for (std::size_t i = 0; i < n; ++i) x[i] += s[i];
  }
  if (scene.carrier_amplitude != 0.0) {
    const auto carrier =
        generate_probe(sample_rate, scene.probe_f0, audio_duration, scene.carrier_amplitude);
    const auto s = carrier.samples();
    for (std::size_t i = 0; i < n && i < s.size(); ++i) x[i] += s[i];
  }

  RenderedScene out;
  double t = scene.lead_silence_s;
  if (scene.lead_silence_s > 0.0) out.alignment.push_back({"sil", 0.0, t});
  for (const auto& e : scene.phoneme_script) {
    const double t1 = t + e.duration_s;
    out.alignment.push_back({e.label, t, t1});
    if (scene.voice_amplitude != 0.0) {
      const double f = voice_frequency_hz(e.label);
      const auto i0 = static_cast<std::size_t>(std::ceil(t * sample_rate));
      const auto i1 = std::min(n, static_cast<std::size_t>(std::ceil(t1 * sample_rate)));
      const double ramp = std::min(kVoiceRampS, e.duration_s / 2.0);
      for (std::size_t i = i0; i < i1; ++i) {
        const double ti = static_cast<double>(i) / sample_rate;
        const double edge = std::min(ti - t, t1 - ti);
        const double gain =
            edge >= ramp ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(edge, 0.0) / ramp);
        x[i] += scene.voice_amplitude * gain * std::sin(kTwoPi * f * (ti - t));
      }
    }
    t = t1;
  }
  if (scene.tail_silence_s > 0.0) out.alignment.push_back({"sil", t, duration});
  out.alignment.back().end_s = std::min(out.alignment.back().end_s, audio_duration);

  if (scene.noise_snr_db) {
    double power = 0.0;
    for (double v : x) power += v * v;
    power /= static_cast<double>(std::max<std::size_t>(n, 1));
    const double sigma = std::sqrt(power / std::pow(10.0, *scene.noise_snr_db / 10.0));
    std::mt19937_64 rng(scene.noise_seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : x) v += noise(rng);
  }

  out.audio = AudioBuffer::mono(sample_rate, std::move(x));
  out.utterance = remove_pauses(
      SegmentedUtterance{out.alignment, SegmentSource::kExternalAlignment, audio_duration});
  out.truth.f0_hz = scene.probe_f0;
  out.truth.doppler_factor_k = scene.doppler_factor_k;
  out.truth.kind = scene.kind;
  out.truth.reflectors = reflectors;
  const auto frames = static_cast<std::size_t>(std::floor(duration / out.truth.frame_hop_s)) + 1;
  for (const auto& r : reflectors) {
    std::vector<double> offsets(frames);
    for (std::size_t i = 0; i < frames; ++i) {
      offsets[i] = analytic_offset_hz(r, i * out.truth.frame_hop_s, scene.probe_f0, ropts);
    }
    out.truth.offsets_hz.push_back(std::move(offsets));
  }
  return out;
}

SceneSpec perturb_scene(const SceneSpec& scene, double speed_jitter, std::uint64_t seed) {
  if (!(speed_jitter >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "jitter must be non-negative");
  SceneSpec out = scene;
  if (speed_jitter == 0.0) return out;
  std::mt19937_64 rng(seed);
  for (auto& e : out.phoneme_script) {
    for (auto& m : e.motions) {
      const double d = random_sign(rng) * speed_jitter;
      m.v_start = std::clamp(m.v_start + d, -kMaxReflectorSpeed, kMaxReflectorSpeed);
      m.v_end = std::clamp(m.v_end - d, -kMaxReflectorSpeed, kMaxReflectorSpeed);
    }
  }
  return out;
}

AudioBuffer render_plane_wave(const ArrayGeometry& geometry, const SteeringDirection& direction,
                              double frequency_hz, double amplitude, double duration_s,
                              double sample_rate, double noise_std, std::uint64_t seed) {
  const auto delays = tdoa(geometry, direction);
  const auto n = static_cast<std::size_t>(std::ceil(duration_s * sample_rate - 1e-9));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  std::vector<std::vector<double>> channels(delays.size(), std::vector<double>(n));
  for (std::size_t m = 0; m < delays.size(); ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      channels[m][i] = amplitude * std::sin(kTwoPi * frequency_hz * (t - delays[m]));
      if (noise_std > 0.0) channels[m][i] += noise(rng);
    }
  }
  return AudioBuffer(sample_rate, std::move(channels));
}

void CorpusOptions::validate() const {
  if (n_users < 2) throw Error(ErrorKind::kInvalidArgument, "a corpus needs at least 2 users");
  if (n_enroll < 3 || n_genuine < 1) {
    throw Error(ErrorKind::kInvalidArgument, "a corpus needs at least 3 enrollment trials");
  }
  if (enroll_jitter < 0.0 || mimicry_jitter < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "jitter must be non-negative");
  }
}

const char* trial_kind_name(TrialKind kind) {
  switch (kind) {
    case TrialKind::kEnroll: return "enroll";
    case TrialKind::kGenuine: return "genuine";
    case TrialKind::kPlayback: return "playback";
    case TrialKind::kMimicry: return "mimicry";
  }
  return "?";
}

namespace {

TrialKind parse_trial_kind(const std::string& text) {
  for (auto k : {TrialKind::kEnroll, TrialKind::kGenuine, TrialKind::kPlayback, TrialKind::kMimicry}) {
    if (text == trial_kind_name(k)) return k;
  }
  throw Error(ErrorKind::kParse, "unknown trial kind '" + text + "'");
}

}  // namespace

std::string CorpusItem::stem() const {
  return user + "/" + trial_kind_name(kind) + "_" + std::to_string(index);
}

SceneSpec random_live_scene(std::uint64_t seed, double probe_f0) {
  std::mt19937_64 rng(seed);
  SceneSpec scene;
  scene.probe_f0 = probe_f0;
  const std::size_t n_reflectors = 3 + rng() % 2;
  for (std::size_t r = 0; r < n_reflectors; ++r) {
    ReflectorSpec spec;
    spec.angle_deg = uniform(rng, 0.0, 70.0);
    spec.distance_m = uniform(rng, 0.03, 0.12);
    spec.reflectivity = uniform(rng, 0.3, 1.0);
    scene.reflectors.push_back(spec);
  }
  const std::size_t n_phonemes = 5 + rng() % 3;
  for (std::size_t p = 0; p < n_phonemes; ++p) {
    ScriptEntry e;
    e.label = kPhonemeInventory[rng() % kPhonemeInventory.size()];
    e.duration_s = uniform(rng, 0.12, 0.25);
    for (std::size_t r = 0; r < n_reflectors; ++r) {
      const double v0 = random_sign(rng) * uniform(rng, 0.02, 0.2);
      const double v1 = random_sign(rng) * uniform(rng, 0.02, 0.2);
      e.motions.push_back({v0, v1});
    }
    scene.phoneme_script.push_back(std::move(e));
  }
  return scene;
}

SceneSpec playback_scene(const SceneSpec& live) {
  SceneSpec out = live;
  out.kind = SceneKind::kPlayback;
  double gain_sum = 0.0;
  double distance = 0.0;
  double reflectivity = 0.0;
  std::vector<double> gains;
  for (const auto& r : live.reflectors) {
    gains.push_back(r.reflectivity / r.distance_m);
    gain_sum += gains.back();
    distance += gains.back() * r.distance_m;
    reflectivity = std::max(reflectivity, r.reflectivity);
  }
  ReflectorSpec diaphragm;
  diaphragm.angle_deg = 0.0;
  diaphragm.distance_m = distance / gain_sum;
  diaphragm.reflectivity = reflectivity;
  out.reflectors = {diaphragm};
  for (auto& e : out.phoneme_script) {
    MotionPattern mean;
    for (std::size_t r = 0; r < live.reflectors.size(); ++r) {
      const double w = gains[r] * cos_deg(live.reflectors[r].angle_deg) / gain_sum;
      mean.v_start += w * e.motions[r].v_start;
      mean.v_end += w * e.motions[r].v_end;
    }
    e.motions = {mean};
  }
  return out;
}

CorpusPlan plan_corpus(const CorpusOptions& options) {
  options.validate();
  CorpusPlan plan;
  plan.options = options;
  const std::uint64_t seed = options.seed;
  for (std::size_t u = 0; u < options.n_users; ++u) {
    char name[32];
    std::snprintf(name, sizeof name, "user%02zu", u);
    plan.users.emplace_back(name);
    plan.base_scenes.push_back(random_live_scene(derive_seed(seed, 0, u, 0), options.probe_f0));
    plan.base_scenes.back().doppler_factor_k = options.doppler_factor_k;
    plan.base_scenes.back().noise_snr_db = options.noise_snr_db;
  }
  const std::size_t n = options.n_users;
  for (std::size_t u = 0; u < n; ++u) {
    const SceneSpec& base = plan.base_scenes[u];
    auto add = [&](TrialKind kind, std::size_t index, SceneSpec scene) {
      scene.noise_seed = derive_seed(seed, 100 + static_cast<std::uint64_t>(kind), u, index);
      plan.items.push_back({plan.users[u], kind, index, std::move(scene)});
    };
    auto jitter_seed = [&](TrialKind kind, std::size_t index) {
      return derive_seed(seed, 1 + static_cast<std::uint64_t>(kind), u, index);
    };
    for (std::size_t i = 0; i < options.n_enroll; ++i) {
      add(TrialKind::kEnroll, i,
          perturb_scene(base, options.enroll_jitter, jitter_seed(TrialKind::kEnroll, i)));
    }
    for (std::size_t i = 0; i < options.n_genuine; ++i) {
      add(TrialKind::kGenuine, i,
          perturb_scene(base, options.enroll_jitter, jitter_seed(TrialKind::kGenuine, i)));
    }
    for (std::size_t i = 0; i < options.n_playback; ++i) {
      add(TrialKind::kPlayback, i,
          playback_scene(
              perturb_scene(base, options.enroll_jitter, jitter_seed(TrialKind::kPlayback, i))));
    }
    for (std::size_t i = 0; i < options.n_mimicry; ++i) {
      // The impostor's own articulators imitate the victim's script.
      const std::size_t attacker = (u + 1 + i % (n - 1)) % n;
      SceneSpec scene = base;
      scene.reflectors = plan.base_scenes[attacker].reflectors;
      for (auto& e : scene.phoneme_script) {
        std::vector<MotionPattern> motions;
        for (std::size_t r = 0; r < scene.reflectors.size(); ++r) {
          motions.push_back(e.motions[r % e.motions.size()]);
        }
        e.motions = std::move(motions);
      }
      add(TrialKind::kMimicry, i,
          perturb_scene(scene, options.mimicry_jitter, jitter_seed(TrialKind::kMimicry, i)));
    }
  }
  return plan;
}

std::size_t write_corpus(const CorpusPlan& plan, const std::filesystem::path& root,
                         double sample_rate) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + root.string() + ": " + ec.message());
  std::ostringstream manifest;
  manifest << "path,user,kind,label\n";
  std::size_t written = 0;
  for (const auto& item : plan.items) {
    fs::create_directories(root / item.user, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create " + (root / item.user).string());
    const RenderedScene rendered = render_scene(item.scene, sample_rate);
    const fs::path stem = root / item.stem();
    write_wav(fs::path(stem.string() + ".wav"), rendered.audio, WavEncoding::kFloat32);
    save_alignment(fs::path(stem.string() + ".align.csv"), rendered.alignment);
    std::ofstream truth(stem.string() + ".truth.json", std::ios::trunc);
    if (!truth) throw Error(ErrorKind::kIo, "cannot write " + stem.string() + ".truth.json");
    truth << truth_to_json(rendered.truth);
    manifest << item.stem() << ".wav," << item.user << ',' << trial_kind_name(item.kind) << ','
             << (item.live() ? "live" : "attack") << '\n';
    ++written;
  }
  std::ofstream out(root / "manifest.csv", std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest in " + root.string());
  out << manifest.str();
  return written;
}

std::size_t generate_corpus(const std::filesystem::path& root, std::size_t n_users,
                            std::size_t n_trials, std::uint64_t seed, double sample_rate) {
  CorpusOptions options;
  options.n_users = n_users;
  options.n_enroll = n_trials;
  options.n_genuine = n_trials;
  options.seed = seed;
  return write_corpus(plan_corpus(options), root, sample_rate);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + manifest_path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line_no == 1) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 4) {
      throw Error(ErrorKind::kParse,
                  "manifest line " + std::to_string(line_no) + ": expected 4 fields");
    }
    if (fields[3] != "live" && fields[3] != "attack") {
      throw Error(ErrorKind::kParse, "manifest line " + std::to_string(line_no) +
                                         ": label must be live or attack");
    }
    entries.push_back({fields[0], fields[1], parse_trial_kind(fields[2]), fields[3] == "live"});
  }
  return entries;
}

}  // namespace dopplive
