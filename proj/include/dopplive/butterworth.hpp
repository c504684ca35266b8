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

#ifndef DOPPLIVE_BUTTERWORTH_HPP_
#define DOPPLIVE_BUTTERWORTH_HPP_

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace dopplive {

// One second-order section, a0 normalized to 1:
//   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Cascade of biquads (transposed direct form II).
class SosFilter {
 public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  // Butterworth designs via the bilinear transform with prewarping.
  //
  // When `zero_phase_edges` is set the analog prototype is widened so that
  // the *forward-backward* response (|H|^2) is -3 dB at the given edges,
  // i.e. each single pass is -1.5 dB there.
  static SosFilter butterworth_lowpass(int order, double cutoff_hz, double sample_rate,
                                       bool zero_phase_edges = true);
  // `order` is the lowpass prototype order; the band-pass has 2*order poles.
  static SosFilter butterworth_bandpass(int order, double low_hz, double high_hz,
                                        double sample_rate, bool zero_phase_edges = true);

  const std::vector<Biquad>& sections() const { return sections_; }

  // Single causal pass from rest.
  std::vector<double> filter(std::span<const double> x) const;

  // Forward-backward (zero-phase) filtering. Odd extension at both ends and
  // step-response initial conditions scaled to the edge sample, following
  // the usual sosfiltfilt convention.
  std::vector<double> filtfilt(std::span<const double> x) const;

  // Complex response of one pass at `freq_hz`.
  std::complex<double> response(double freq_hz, double sample_rate) const;

  // Steady-state section states for a unit step input; one (z1, z2) pair per
  // section.
  std::vector<std::array<double, 2>> step_initial_conditions() const;

 private:
  std::vector<double> run(std::span<const double> x,
                          const std::vector<std::array<double, 2>>& zi, double scale) const;

  std::vector<Biquad> sections_;
};

}  // namespace dopplive

#endif  // DOPPLIVE_BUTTERWORTH_HPP_
