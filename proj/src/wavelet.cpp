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

#include "dopplive/wavelet.hpp"

#include <algorithm>
#include <cmath>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {

Wavelet from_scaling_filter(std::string name, std::vector<double> h) {
  Wavelet w;
  w.name = std::move(name);
  const std::size_t f = h.size();
  w.rec_lo = h;
  w.rec_hi.resize(f);
  for (std::size_t k = 0; k < f; ++k) {
    w.rec_hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[f - 1 - k];
  }
  w.dec_lo.assign(w.rec_lo.rbegin(), w.rec_lo.rend());
  w.dec_hi.assign(w.rec_hi.rbegin(), w.rec_hi.rend());
  return w;
}

// Half-sample symmetric extension: x[-1] = x[0], x[n] = x[n-1].
double symmetric_at(std::span<const double> x, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const std::ptrdiff_t period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? x[static_cast<std::size_t>(i)] : x[static_cast<std::size_t>(period - 1 - i)];
}

double median_abs(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> a(values.size());
  std::transform(values.begin(), values.end(), a.begin(), [](double v) { return std::abs(v); });
  const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
  std::nth_element(a.begin(), mid, a.end());
  if (a.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(a.begin(), mid));
}

}  // namespace

Wavelet wavelet_by_name(const std::string& name) {
  if (name == "haar" || name == "db1") {
    return from_scaling_filter(name, {0.7071067811865476, 0.7071067811865476});
  }
  if (name == "db2") {
    return from_scaling_filter(name, {0.48296291314469025, 0.836516303737469,
                                      0.22414386804185735, -0.12940952255092145});
  }
  if (name == "db4") {
    return from_scaling_filter(
        name, {0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
               -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
               0.032883011666982945, -0.010597401784997278});
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown wavelet '" + name + "'");
}

std::size_t dwt_output_length(std::size_t n, std::size_t filter_length) {
  return (n + filter_length - 1) / 2;
}

void dwt_step(std::span<const double> x, const Wavelet& w, std::vector<double>& approx,
              std::vector<double>& detail) {
  const std::size_t f = w.filter_length();
  const std::size_t out = dwt_output_length(x.size(), f);
  approx.assign(out, 0.0);
  detail.assign(out, 0.0);
  for (std::size_t o = 0; o < out; ++o) {
    const auto centre = static_cast<std::ptrdiff_t>(2 * o + 1);
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      const double v = symmetric_at(x, centre - static_cast<std::ptrdiff_t>(j));
      a += w.dec_lo[j] * v;
      d += w.dec_hi[j] * v;
    }
    approx[o] = a;
    detail[o] = d;
  }
}

std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              const Wavelet& w) {
  if (approx.size() != detail.size()) {
    throw Error(ErrorKind::kInvalidArgument, "approximation/detail length mismatch");
  }
  const std::size_t f = w.filter_length();
  const std::size_t m = approx.size();
  if (2 * m + 2 <= f) throw Error(ErrorKind::kInvalidArgument, "too few coefficients to invert");
  // Full upsampled convolution restricted to its valid part [f - 2, 2m).
  const std::size_t out_len = 2 * m + 2 - f;
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < out_len; ++i) {
    const std::size_t pos = i + f - 2;
    double acc = 0.0;
    for (std::size_t j = pos % 2; j < f; j += 2) {
      if (j > pos) break;
      const std::size_t n = (pos - j) / 2;
      if (n >= m) continue;
      acc += w.rec_lo[j] * approx[n] + w.rec_hi[j] * detail[n];
    }
    out[i] = acc;
  }
  return out;
}

WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels,
                                   const std::string& wavelet) {
  if (levels < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one DWT level");
  const std::size_t minimum = std::size_t{1} << levels;
  if (signal.size() < minimum) {
    throw Error(ErrorKind::kInvalidArgument,
                "contour of length " + std::to_string(signal.size()) +
                    " is too short; " + std::to_string(levels) +
                    "-level decomposition needs at least " + std::to_string(minimum));
  }
  const Wavelet w = wavelet_by_name(wavelet);
  WaveletDecomposition out;
  out.wavelet_name = w.name;
  out.original_length = signal.size();
  std::vector<double> current(signal.begin(), signal.end());
  for (int level = 0; level < levels; ++level) {
    std::vector<double> approx, detail;
    dwt_step(current, w, approx, detail);
    out.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

WaveletDecomposition threshold_details(const WaveletDecomposition& decomposition,
                                       double multiplier) {
  WaveletDecomposition out = decomposition;
  for (auto& d : out.details) {
    if (d.empty()) continue;
    const double sigma = median_abs(d) / 0.6745;
    const double t = multiplier * sigma * std::sqrt(2.0 * std::log(static_cast<double>(d.size())));
    for (double& v : d) {
      const double mag = std::abs(v);
      v = mag <= t ? 0.0 : std::copysign(mag - t, v);
    }
  }
  return out;
}

std::vector<double> dwt_reconstruct(const WaveletDecomposition& decomposition) {
  const Wavelet w = wavelet_by_name(decomposition.wavelet_name);
  std::vector<double> current = decomposition.approx;
  for (auto it = decomposition.details.rbegin(); it != decomposition.details.rend(); ++it) {
    // Odd-length inputs produce one extra sample on the way back up.
    if (current.size() == it->size() + 1) current.pop_back();
    current = idwt_step(current, *it, w);
  }
  if (current.size() > decomposition.original_length) current.resize(decomposition.original_length);
  return current;
}

ContourSet denoise_contour_set(const ContourSet& contours, const DenoiseOptions& options) {
  ContourSet out = contours;
  for (std::size_t i = 0; i < kContourCount; ++i) {
    const auto decomposition = dwt_decompose(contours.contour(i), options.levels, options.wavelet);
    out.contour(i) = dwt_reconstruct(threshold_details(decomposition, options.multiplier));
  }
  return out;
}

}  // namespace dopplive
