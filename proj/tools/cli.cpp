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

#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "dopplive/audio.hpp"
#include "dopplive/beamform.hpp"
#include "dopplive/error.hpp"
#include "dopplive/evaluation.hpp"
#include "dopplive/pipeline.hpp"
#include "dopplive/profile.hpp"
#include "dopplive/sim.hpp"

namespace dopplive::cli {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::filesystem::path sibling_alignment(const std::filesystem::path& wav) {
  auto p = wav;
  p.replace_extension(".align.csv");
  return p;
}

// Explicit alignments pair with inputs by position; otherwise a sibling
// <stem>.align.csv is used when present.
std::vector<Recording> load_inputs(const std::vector<std::string>& wavs,
                                   const std::vector<std::string>& alignments, std::ostream& err) {
  if (!alignments.empty() && alignments.size() != wavs.size()) {
    throw Error(ErrorKind::kInvalidArgument, "give one --alignment per input or none");
  }
  std::vector<Recording> out;
  for (std::size_t i = 0; i < wavs.size(); ++i) {
    std::filesystem::path align;
    if (!alignments.empty()) {
      align = alignments[i];
    } else if (std::filesystem::exists(sibling_alignment(wavs[i]))) {
      align = sibling_alignment(wavs[i]);
    }
    Recording rec = load_recording(wavs[i], align);
    if (!is_standard_sample_rate(rec.audio.sample_rate())) {
      err << "warning: " << wavs[i] << " uses a non-standard sample rate of "
          << rec.audio.sample_rate() << " Hz\n";
    }
    if (!rec.alignment) {
      err << "warning: no alignment for " << wavs[i] << ", using energy segmentation\n";
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> recording_labels(const Recording& rec) {
  std::vector<std::string> labels;
  if (rec.alignment) {
    for (const auto& s : remove_pauses(*rec.alignment).segments) labels.push_back(s.label);
  }
  return labels;
}

int cmd_probe(const RunConfig& cfg, double duration, double amplitude, const std::string& output,
              std::ostream& out) {
  const AudioBuffer probe = generate_probe(cfg.sample_rate, cfg.probe_f0, duration, amplitude);
  write_wav(output, probe, WavEncoding::kFloat32);
  out << "wrote " << output << " (" << probe.length() << " samples at " << cfg.sample_rate
      << " Hz)\n";
  return 0;
}

int cmd_enroll(const RunConfig& cfg, const std::string& user, const std::string& mode_text,
               std::size_t min_trials, const std::vector<std::string>& wavs,
               const std::vector<std::string>& alignments, std::ostream& out, std::ostream& err) {
  const ProfileMode mode = parse_profile_mode(mode_text);
  if (mode == ProfileMode::kTextDependent && wavs.size() < min_trials) {
    err << "error: text-dependent enrollment needs at least " << min_trials << " trials, got "
        << wavs.size() << "\n";
    return kExitEnrollment;
  }
  const auto recordings = load_inputs(wavs, alignments, err);
  const ProfileStore store(cfg.profile_store_path);
  UserProfile profile;
  if (store.exists(user)) {
    profile = store.load(user);
    if (profile.mode != mode) {
      err << "error: profile for " << user << " is " << profile_mode_name(profile.mode) << "\n";
      return kExitEnrollment;
    }
  } else {
    profile.user_id = user;
    profile.mode = mode;
    profile.threshold = cfg.threshold;
  }
  profile.created_at = current_timestamp();

  try {
    if (mode == ProfileMode::kTextDependent) {
      PassphraseTemplate tmpl = enroll_passphrase(recordings, cfg.pipeline());
      const std::string key = passphrase_key(tmpl.phoneme_labels);
      out << "enrolled user=" << user << " mode=" << profile_mode_name(mode)
          << " trials=" << tmpl.trial_count << " phonemes=" << tmpl.contours.phoneme_count()
          << " frames=" << tmpl.contours.length() << "\n";
      for (std::size_t p = 0; p < tmpl.phoneme_labels.size(); ++p) {
        out << "  phoneme " << tmpl.phoneme_labels[p]
            << " frames=" << tmpl.contours.frames_per_phoneme[p] << "\n";
      }
      profile.passphrase_templates[key] = std::move(tmpl);
    } else {
      PhonemeTemplateSet set = enroll_phonemes(recordings, cfg.pipeline());
      for (const auto& label : set.excluded_labels) {
        err << "warning: phoneme '" << label << "' occurs once and was not enrolled\n";
      }
      if (set.templates.empty()) {
        err << "error: no phoneme occurs in at least two utterances\n";
        return kExitEnrollment;
      }
      out << "enrolled user=" << user << " mode=" << profile_mode_name(mode)
          << " utterances=" << recordings.size() << " phonemes=" << set.templates.size() << "\n";
      for (const auto& [label, t] : set.templates) {
        out << "  phoneme " << label << " weight=" << fmt("%.6g", t.weight)
            << " trials=" << t.trial_count << "\n";
        profile.phoneme_templates[label] = t;
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kEnrollment) throw;
    err << "error: " << e.what() << "\n";
    return kExitEnrollment;
  }
  store.save(profile);
  out << "profile " << store.path_for(user).string() << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& user, const std::string& wav,
               const std::string& alignment, std::optional<double> threshold_flag,
               std::ostream& out, std::ostream& err) {
  const ProfileStore store(cfg.profile_store_path);
  if (!store.exists(user)) {
    err << "error: no profile for user '" << user << "' in " << cfg.profile_store_path << "\n";
    return kExitError;
  }
  const UserProfile profile = store.load(user);
  const auto recs =
      load_inputs({wav}, alignment.empty() ? std::vector<std::string>{}
                                           : std::vector<std::string>{alignment},
                  err);
  const Recording& rec = recs.front();
  SimilarityResult result;
  if (profile.mode == ProfileMode::kTextDependent) {
    const PassphraseTemplate* tmpl = nullptr;
    const auto it = profile.passphrase_templates.find(passphrase_key(recording_labels(rec)));
    if (it != profile.passphrase_templates.end()) {
      tmpl = &it->second;
    } else if (profile.passphrase_templates.size() == 1) {
      tmpl = &profile.passphrase_templates.begin()->second;
    } else {
      err << "error: the utterance matches none of the enrolled passphrases\n";
      return kExitError;
    }
    result = verify_passphrase(rec, *tmpl, cfg.pipeline(), cfg.feature_mode);
  } else {
    PhonemeTemplateSet set;
    set.templates = profile.phoneme_templates;
    result = verify_phonemes(rec, set, cfg.pipeline(), cfg.feature_mode);
  }
  const double threshold = threshold_flag.value_or(profile.threshold);
  const LivenessDecision d = decide(result.score, threshold);
  out << "score=" << fmt("%.6f", d.score) << " threshold=" << fmt("%.6f", d.threshold)
      << " verdict=" << verdict_name(d.verdict) << " mode=" << feature_mode_name(cfg.feature_mode)
      << " coverage=" << fmt("%.3f", result.coverage()) << "\n";
  return d.verdict == Verdict::kLive ? kExitLive : kExitAttack;
}

int cmd_simulate(const RunConfig& cfg, const std::string& dir, std::size_t users,
                 std::size_t trials, std::size_t playback, std::size_t mimicry,
                 std::optional<double> snr_db, std::ostream& out) {
  CorpusOptions options;
  options.n_users = users;
  options.n_enroll = trials;
  options.n_genuine = trials;
  options.n_playback = playback;
  options.n_mimicry = mimicry;
  options.probe_f0 = cfg.probe_f0;
  options.doppler_factor_k = cfg.doppler_factor_k;
  options.seed = cfg.seed;
  if (snr_db) options.noise_snr_db = *snr_db;
  const std::size_t n = write_corpus(plan_corpus(options), dir, cfg.sample_rate);
  out << "wrote " << n << " scene files and manifest.csv to " << dir << "\n";
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, const std::string& manifest, const std::string& roc_path,
                  bool write_back, std::ostream& out, std::ostream& err) {
  const CorpusEvaluation ev = evaluate_manifest(manifest, cfg.pipeline());
  const auto genuine = ev.genuine_scores(cfg.feature_mode);
  const auto attack = ev.attack_scores(cfg.feature_mode);
  if (genuine.empty() || attack.empty()) {
    err << "error: calibration needs both genuine and attack trials\n";
    return kExitError;
  }
  const Calibration cal = calibrate_threshold(genuine, attack);
  if (!roc_path.empty()) {
    std::ofstream roc(roc_path, std::ios::trunc);
    if (!roc) throw Error(ErrorKind::kIo, "cannot write " + roc_path);
    roc << "threshold,far,frr\n";
    for (const auto& p : roc_curve(genuine, attack)) {
      roc << fmt("%.9g", p.threshold) << ',' << fmt("%.6f", p.far) << ',' << fmt("%.6f", p.frr)
          << '\n';
    }
  }
  for (auto mode : kAllFeatureModes) {
    if (mode == cfg.feature_mode) continue;
    const Calibration c = ev.calibration(mode);
    out << "mode=" << feature_mode_name(mode) << " eer=" << fmt("%.3f", c.eer) << "\n";
  }
  out << "eer=" << fmt("%.3f", cal.eer) << " threshold=" << fmt("%.6f", cal.threshold)
      << " mode=" << feature_mode_name(cfg.feature_mode) << " genuine=" << genuine.size()
      << " attack=" << attack.size() << "\n";
  if (write_back) {
    const ProfileStore store(cfg.profile_store_path);
    for (const auto& user : store.users()) {
      UserProfile p = store.load(user);
      p.threshold = std::clamp(cal.threshold, -1.0, 1.0);
      store.save(p);
      out << "updated " << user << "\n";
    }
  }
  return 0;
}

int cmd_beamform(const std::string& input, const std::string& geometry_path, double radius,
                 std::optional<double> azimuth, std::optional<double> elevation,
                 const std::string& output, std::ostream& out) {
  const AudioBuffer channels = read_wav(input);
  const ArrayGeometry geometry =
      geometry_path.empty() ? ArrayGeometry::circular(radius) : load_geometry(geometry_path);
  SteeringDirection dir;
  if (azimuth || elevation) {
    dir = {azimuth.value_or(0.0), elevation.value_or(0.0)};
  } else {
    const auto found = search_direction(channels, geometry);
    dir = found.direction;
  }
  const AudioBuffer mono = delay_and_sum(channels, geometry, dir);
  write_wav(output, mono, WavEncoding::kFloat32);
  out << "azimuth=" << fmt("%.1f", dir.azimuth_deg) << " elevation=" << fmt("%.1f", dir.elevation_deg)
      << " channels=" << channels.channel_count() << " output=" << output << "\n";
  return 0;
}

int cmd_export(const RunConfig& cfg, const std::string& wav, const std::string& alignment,
               const std::string& output, std::ostream& out, std::ostream& err) {
  const auto recs = load_inputs({wav}, alignment.empty() ? std::vector<std::string>{}
                                                         : std::vector<std::string>{alignment},
                                err);
  const UtteranceFeatures f =
      analyze_utterance(recs.front().audio, recs.front().alignment, cfg.pipeline());
  for (const auto& d : f.dropped) {
    err << "warning: dropped phoneme '" << d.segment.label << "': " << d.reason << "\n";
  }
  const std::string json = contour_set_to_json(f.contours);
  if (output.empty() || output == "-") {
    out << json;
  } else {
    std::ofstream file(output, std::ios::trunc);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + output);
    file << json;
    out << "wrote " << output << " (" << f.contours.phoneme_count() << " phonemes, "
        << f.contours.length() << " frames)\n";
  }
  return 0;
}

}  // namespace

RunConfig resolve_config(const GlobalOptions& o) {
  RunConfig cfg;
  if (o.config_path) apply_config_file(cfg, *o.config_path);
  for (const auto& kv : o.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kParse, "--set expects key=value");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.sample_rate) cfg.sample_rate = *o.sample_rate;
  if (o.f0) cfg.probe_f0 = *o.f0;
  if (o.feature_mode) cfg.feature_mode = parse_feature_mode(*o.feature_mode);
  if (o.profiles) cfg.profile_store_path = *o.profiles;
  cfg.validate();
  return cfg;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Doppler-based voice liveness detection"};
  app.name("dopplive");
  app.require_subcommand(0, 1);
  // Global flags may also follow the subcommand.
  app.fallthrough();

  GlobalOptions g;
  bool print_config = false;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--sample-rate", g.sample_rate, "Sample rate in Hz for generated audio");
  app.add_option("--f0", g.f0, "Probe frequency in Hz");
  app.add_option("--feature-mode", g.feature_mode, "energy, frequency or combined")
      ->check(CLI::IsMember({"energy", "frequency", "combined"}));
  app.add_option("--profiles", g.profiles, "Profile store directory");
  app.add_option("--set", g.settings, "Override one config key (key=value)")
      ->allow_extra_args(false);
  app.add_flag("--print-config", print_config, "Print the resolved configuration");

  auto* probe = app.add_subcommand("probe", "Write a probe tone WAV");
  double probe_duration = 1.0, probe_amplitude = 0.5;
  std::string probe_out;
  probe->add_option("--duration", probe_duration, "Seconds")->check(CLI::PositiveNumber);
  probe->add_option("--amplitude", probe_amplitude, "Peak amplitude")->check(CLI::Range(0.0, 1.0));
  probe->add_option("-o,--output", probe_out, "Output WAV")->required();

  auto* enroll = app.add_subcommand("enroll", "Build or extend a user profile");
  std::string enroll_user, enroll_mode = "TextDependent";
  std::size_t min_trials = 3;
  std::vector<std::string> enroll_wavs, enroll_aligns;
  enroll->add_option("--user", enroll_user, "User id")->required();
  enroll->add_option("--mode", enroll_mode, "TextDependent or TextIndependent");
  enroll->add_option("--min-trials", min_trials, "Minimum text-dependent trials");
  enroll->add_option("--alignment", enroll_aligns, "Alignment per input, in order");
  enroll->add_option("inputs", enroll_wavs, "Enrollment WAVs")->required();

  auto* verify = app.add_subcommand("verify", "Score one utterance against a profile");
  std::string verify_user, verify_wav, verify_align;
  std::optional<double> verify_threshold;
  verify->add_option("--user", verify_user, "User id")->required();
  verify->add_option("--alignment", verify_align, "Alignment file");
  verify->add_option("--threshold", verify_threshold, "Override the profile threshold");
  verify->add_option("input", verify_wav, "WAV to verify")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  std::string sim_dir;
  std::size_t sim_users = 2, sim_trials = 3, sim_playback = 1, sim_mimicry = 1;
  std::optional<double> sim_snr;
  simulate->add_option("-o,--output", sim_dir, "Corpus directory")->required();
  simulate->add_option("--users", sim_users, "Number of users")->check(CLI::Range(2, 1000));
  simulate->add_option("--trials", sim_trials, "Enrollment and genuine trials per user")
      ->check(CLI::Range(3, 1000));
  simulate->add_option("--playback", sim_playback, "Playback attacks per user");
  simulate->add_option("--mimicry", sim_mimicry, "Mimicry attacks per user");
  simulate->add_option("--snr-db", sim_snr, "Noise level relative to the scene");

  auto* calibrate = app.add_subcommand("calibrate", "ROC and EER over a corpus manifest");
  std::string cal_manifest, cal_roc;
  bool cal_write = false;
  calibrate->add_option("manifest", cal_manifest, "manifest.csv")->required();
  calibrate->add_option("--roc", cal_roc, "Write threshold,far,frr CSV");
  calibrate->add_flag("--write-profiles", cal_write, "Store the threshold in every profile");

  auto* beamform = app.add_subcommand("beamform", "Delay-and-sum a multichannel WAV");
  std::string bf_in, bf_geometry, bf_out;
  double bf_radius = kDefaultArrayRadius;
  std::optional<double> bf_az, bf_el;
  beamform->add_option("input", bf_in, "Multichannel WAV, channel 0 = reference mic")->required();
  beamform->add_option("--geometry", bf_geometry, "Geometry JSON");
  beamform->add_option("--radius", bf_radius, "Ring radius of the default array (m)");
  beamform->add_option("--azimuth", bf_az, "Degrees; searched when omitted")->check(CLI::Range(0.0, 359.999999));
  beamform->add_option("--elevation", bf_el, "Degrees")->check(CLI::Range(-90.0, 90.0));
  beamform->add_option("-o,--output", bf_out, "Mono output WAV")->required();

  auto* exporter = app.add_subcommand("export-contours", "Write the contour set as JSON");
  std::string ex_wav, ex_align, ex_out;
  exporter->add_option("input", ex_wav, "WAV")->required();
  exporter->add_option("--alignment", ex_align, "Alignment file");
  exporter->add_option("-o,--output", ex_out, "Output JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  }

  try {
    const RunConfig cfg = resolve_config(g);
    if (print_config) out << format_config(cfg);
    if (app.get_subcommands().empty()) {
      if (print_config) return 0;
      err << "A subcommand is required\n" << app.help();
      return kExitError;
    }
    if (probe->parsed()) return cmd_probe(cfg, probe_duration, probe_amplitude, probe_out, out);
    if (enroll->parsed()) {
      return cmd_enroll(cfg, enroll_user, enroll_mode, min_trials, enroll_wavs, enroll_aligns, out,
                        err);
    }
    if (verify->parsed()) {
      return cmd_verify(cfg, verify_user, verify_wav, verify_align, verify_threshold, out, err);
    }
    if (simulate->parsed()) {
      return cmd_simulate(cfg, sim_dir, sim_users, sim_trials, sim_playback, sim_mimicry, sim_snr,
                          out);
    }
    if (calibrate->parsed()) return cmd_calibrate(cfg, cal_manifest, cal_roc, cal_write, out, err);
    if (beamform->parsed()) return cmd_beamform(bf_in, bf_geometry, bf_radius, bf_az, bf_el, bf_out, out);
    if (exporter->parsed()) return cmd_export(cfg, ex_wav, ex_align, ex_out, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << error_kind_name(e.kind()) << "]\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("dopplive");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace dopplive::cli
