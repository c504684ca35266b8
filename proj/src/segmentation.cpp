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

#include "dopplive/segmentation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {

// Slack for decimal round-off when comparing against the utterance length.
constexpr double kDurationSlackS = 1e-9;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_seconds(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::kParse, "line " + std::to_string(line) + ": bad time value '" +
                                       std::string(field) + "'");
  }
  return value;
}

std::string format_seconds(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

}  // namespace

void SegmentedUtterance::validate() const {
  double previous_end = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.start_s >= 0.0) || !(s.end_s > s.start_s)) {
      throw Error(ErrorKind::kParse, "segment '" + s.label + "' needs 0 <= start < end");
    }
    if (i > 0 && s.start_s < previous_end) {
      throw Error(ErrorKind::kParse, "segment '" + s.label + "' overlaps or precedes '" +
                                         segments[i - 1].label + "'");
    }
    if (s.end_s > total_duration_s + kDurationSlackS) {
      throw Error(ErrorKind::kRange, "segment '" + s.label + "' ends at " +
                                         format_seconds(s.end_s) + " s, beyond the " +
                                         format_seconds(total_duration_s) + " s utterance");
    }
    previous_end = s.end_s;
  }
}

SegmentedUtterance parse_alignment(std::string_view text, double utterance_duration_s,
                                   const AlignmentOptions& options) {
  const char separator = options.tsv_with_header ? '\t' : ',';
  SegmentedUtterance all;
  all.source = SegmentSource::kExternalAlignment;
  all.total_duration_s = utterance_duration_s;

  std::size_t line_no = 0;
  bool header_skipped = !options.tsv_with_header;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;
    if (!header_skipped) {
      header_skipped = true;
      continue;
    }
    // Split from the right: labels may in principle contain the separator.
    const auto second = line.rfind(separator);
    const auto first = second == std::string_view::npos || second == 0
                           ? std::string_view::npos
                           : line.rfind(separator, second - 1);
    if (first == std::string_view::npos) {
      throw Error(ErrorKind::kParse, "line " + std::to_string(line_no) +
                                         ": expected label,start,end");
    }
    PhonemeSegment seg;
    seg.label = std::string(trim(line.substr(0, first)));
    seg.start_s = parse_seconds(line.substr(first + 1, second - first - 1), line_no);
    seg.end_s = parse_seconds(line.substr(second + 1), line_no);
    all.segments.push_back(std::move(seg));
  }
  // Overlap and range checks include pause rows: they are part of the file's
  // timeline even though they are dropped below.
  all.validate();
  return remove_pauses(all, options.pause_labels);
}

SegmentedUtterance load_alignment(const std::filesystem::path& path,
                                  double utterance_duration_s,
                                  const AlignmentOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open alignment " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_alignment(ss.str(), utterance_duration_s, options);
}

std::string format_alignment(const std::vector<PhonemeSegment>& segments) {
  std::string out;
  for (const auto& s : segments) {
    out += s.label;
    out += ',';
    out += format_seconds(s.start_s);
    out += ',';
    out += format_seconds(s.end_s);
    out += '\n';
  }
  return out;
}

void save_alignment(const std::filesystem::path& path,
                    const std::vector<PhonemeSegment>& segments) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write alignment " + path.string());
  out << format_alignment(segments);
}

SegmentedUtterance segment_by_energy(const AudioBuffer& voice,
                                     const EnergySegmenterOptions& options) {
  voice.require_mono("segment_by_energy");
  SegmentedUtterance out;
  out.source = SegmentSource::kEnergyFallback;
  out.total_duration_s = voice.duration_seconds();

  const auto frame = static_cast<std::size_t>(
      std::max(1.0, std::round(options.frame_ms * 1e-3 * voice.sample_rate())));
  const auto x = voice.samples();
  const std::size_t frames = (x.size() + frame - 1) / frame;
  std::vector<double> energy(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t begin = f * frame;
    const std::size_t end = std::min(x.size(), begin + frame);
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += x[i] * x[i];
    energy[f] = sum / static_cast<double>(end - begin);
  }
  const double peak = frames == 0 ? 0.0 : *std::max_element(energy.begin(), energy.end());
  if (!(peak > 0.0)) return out;

  std::vector<double> voiced;
  for (double e : energy) {
    if (e > options.voiced_floor * peak) voiced.push_back(e);
  }
  auto mid = voiced.begin() + static_cast<std::ptrdiff_t>(voiced.size() / 2);
  std::nth_element(voiced.begin(), mid, voiced.end());
  double median = *mid;
  if (voiced.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(voiced.begin(), mid));
  }
  const double threshold = options.threshold_ratio * median;

  const double frame_s = static_cast<double>(frame) / voice.sample_rate();
  std::size_t f = 0;
  while (f < frames) {
    if (energy[f] <= threshold) {
      ++f;
      continue;
    }
    const std::size_t begin = f;
    while (f < frames && energy[f] > threshold) ++f;
    PhonemeSegment seg;
    seg.label = "seg_" + std::to_string(out.segments.size());
    seg.start_s = begin * frame_s;
    seg.end_s = std::min(out.total_duration_s, f * frame_s);
    out.segments.push_back(std::move(seg));
  }
  return out;
}

SegmentedUtterance remove_pauses(const SegmentedUtterance& utterance,
                                 const std::set<std::string>& pause_labels) {
  SegmentedUtterance out;
  out.source = utterance.source;
  out.total_duration_s = utterance.total_duration_s;
  for (const auto& s : utterance.segments) {
    if (!pause_labels.contains(s.label)) out.segments.push_back(s);
  }
  return out;
}

}  // namespace dopplive
