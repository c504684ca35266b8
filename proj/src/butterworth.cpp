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

#include "dopplive/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {

using cplx = std::complex<double>;

// Left-half-plane Butterworth prototype poles scaled by `radius`.
std::vector<cplx> prototype_poles(int order, double radius) {
  std::vector<cplx> poles;
  poles.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    poles.push_back(radius * std::polar(1.0, theta));
  }
  return poles;
}

// Prototype radius such that the forward-backward magnitude at the band
// edge is 1/sqrt(2): 1 / (1 + r^-2N)^2 = 1/2.
double prototype_radius(int order, bool zero_phase_edges) {
  if (!zero_phase_edges) return 1.0;
  return std::pow(std::numbers::sqrt2 - 1.0, -1.0 / (2.0 * order));
}

cplx bilinear(cplx s, double sample_rate) {
  const double k = 2.0 * sample_rate;
  return (k + s) / (k - s);
}

double prewarp(double freq_hz, double sample_rate) {
  return 2.0 * sample_rate * std::tan(std::numbers::pi * freq_hz / sample_rate);
}

// Pairs digital poles into second-order denominators. Complex poles go with
// their conjugates; leftover real poles are paired with each other.
std::vector<std::array<double, 2>> pole_pairs(const std::vector<cplx>& poles) {
  std::vector<std::array<double, 2>> out;
  std::vector<double> reals;
  for (const cplx& p : poles) {
    if (std::abs(p.imag()) <= 1e-12 * std::max(1.0, std::abs(p))) {
      reals.push_back(p.real());
    } else if (p.imag() > 0.0) {
      out.push_back({-2.0 * p.real(), std::norm(p)});
    }
  }
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) {
    out.push_back({-(reals[i] + reals[i + 1]), reals[i] * reals[i + 1]});
  }
  if (reals.size() % 2 == 1) out.push_back({-reals.back(), 0.0});
  return out;
}

cplx section_response(const Biquad& s, double omega) {
  const cplx z1 = std::polar(1.0, -omega);
  const cplx z2 = z1 * z1;
  return (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
}

void scale_to_unit_gain(Biquad& s, double omega) {
  const double g = std::abs(section_response(s, omega));
  s.b0 /= g;
  s.b1 /= g;
  s.b2 /= g;
}

}  // namespace

SosFilter SosFilter::butterworth_lowpass(int order, double cutoff_hz, double sample_rate,
                                         bool zero_phase_edges) {
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "filter order must be >= 1");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing, "lowpass cutoff must lie in (0, Nyquist)");
  }
  const double warped = prewarp(cutoff_hz, sample_rate);
  std::vector<cplx> digital;
  for (const cplx& p : prototype_poles(order, prototype_radius(order, zero_phase_edges))) {
    digital.push_back(bilinear(warped * p, sample_rate));
  }
  std::vector<Biquad> sections;
  for (const auto& [a1, a2] : pole_pairs(digital)) {
    Biquad s;
    if (a2 == 0.0) {
      s = {1.0, 1.0, 0.0, a1, 0.0};  // first-order section, zero at z = -1
    } else {
      s = {1.0, 2.0, 1.0, a1, a2};
    }
    scale_to_unit_gain(s, 0.0);
    sections.push_back(s);
  }
  return SosFilter(std::move(sections));
}

SosFilter SosFilter::butterworth_bandpass(int order, double low_hz, double high_hz,
                                          double sample_rate, bool zero_phase_edges) {
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "filter order must be >= 1");
  if (!(low_hz > 0.0) || !(high_hz > low_hz)) {
    throw Error(ErrorKind::kInvalidArgument, "band-pass edges must satisfy 0 < low < high");
  }
  if (high_hz >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing,
                "band-pass upper edge must lie below Nyquist");
  }
  const double w1 = prewarp(low_hz, sample_rate);
  const double w2 = prewarp(high_hz, sample_rate);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  std::vector<cplx> digital;
  for (const cplx& p : prototype_poles(order, prototype_radius(order, zero_phase_edges))) {
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0 * w0);
    digital.push_back(bilinear(half + root, sample_rate));
    digital.push_back(bilinear(half - root, sample_rate));
  }
  const double center = 2.0 * std::atan(w0 / (2.0 * sample_rate));
  std::vector<Biquad> sections;
  for (const auto& [a1, a2] : pole_pairs(digital)) {
    Biquad s{1.0, 0.0, -1.0, a1, a2};  // one zero at z = 1 and one at z = -1
    scale_to_unit_gain(s, center);
    sections.push_back(s);
  }
  return SosFilter(std::move(sections));
}

std::complex<double> SosFilter::response(double freq_hz, double sample_rate) const {
  const double omega = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  cplx h = 1.0;
  for (const Biquad& s : sections_) h *= section_response(s, omega);
  return h;
}

std::vector<std::array<double, 2>> SosFilter::step_initial_conditions() const {
  std::vector<std::array<double, 2>> zi;
  double level = 1.0;
  for (const Biquad& s : sections_) {
    const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double z2 = (s.b2 - s.a2 * gain) * level;
    const double z1 = (s.b1 - s.a1 * gain) * level + z2;
    zi.push_back({z1, z2});
    level *= gain;
  }
  return zi;
}

std::vector<double> SosFilter::run(std::span<const double> x,
                                   const std::vector<std::array<double, 2>>& zi,
                                   double scale) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < sections_.size(); ++k) {
    const Biquad& s = sections_[k];
    double z1 = zi.empty() ? 0.0 : zi[k][0] * scale;
    double z2 = zi.empty() ? 0.0 : zi[k][1] * scale;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> SosFilter::filter(std::span<const double> x) const {
  return run(x, {}, 0.0);
}

std::vector<double> SosFilter::filtfilt(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n < 2) return run(run(x, {}, 0.0), {}, 0.0);

  const std::size_t pad = std::min<std::size_t>(3 * (2 * sections_.size() + 1), n - 1);
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = step_initial_conditions();
  std::vector<double> y = run(ext, zi, ext.front());
  std::reverse(y.begin(), y.end());
  y = run(y, zi, y.front());
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(pad),
          y.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace dopplive
