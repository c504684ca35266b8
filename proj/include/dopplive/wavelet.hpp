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

#ifndef DOPPLIVE_WAVELET_HPP_
#define DOPPLIVE_WAVELET_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dopplive/features.hpp"

namespace dopplive {

// Orthogonal wavelet filter bank. `rec_lo` is the scaling filter; the other
// three filters follow from the quadrature-mirror relations.
struct Wavelet {
  std::string name;
  std::vector<double> dec_lo, dec_hi, rec_lo, rec_hi;

  std::size_t filter_length() const { return rec_lo.size(); }
};

// "haar" (= "db1"), "db2", "db4". Throws kInvalidArgument otherwise.
Wavelet wavelet_by_name(const std::string& name);

inline constexpr const char* kDefaultWavelet = "db4";
inline constexpr int kDefaultLevels = 3;

// Coefficient count of one analysis step on `n` samples with symmetric
// extension: floor((n + F - 1) / 2).
std::size_t dwt_output_length(std::size_t n, std::size_t filter_length);

struct WaveletDecomposition {
  std::vector<double> approx;                // coarsest level
  std::vector<std::vector<double>> details;  // details[0] is level 1 (finest)
  std::string wavelet_name;
  std::size_t original_length = 0;
};

// Requires at least 2^levels samples (kInvalidArgument otherwise).
WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels = kDefaultLevels,
                                   const std::string& wavelet = kDefaultWavelet);

// Soft thresholding of each detail level k with
//   t_k = multiplier * sigma_k * sqrt(2 ln n_k),  sigma_k = median|d_k| / 0.6745.
WaveletDecomposition threshold_details(const WaveletDecomposition& decomposition,
                                       double multiplier);

// Inverse cascade, trimmed to the original length.
std::vector<double> dwt_reconstruct(const WaveletDecomposition& decomposition);

// Single-level transforms (exposed for tests).
void dwt_step(std::span<const double> x, const Wavelet& w, std::vector<double>& approx,
              std::vector<double>& detail);
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              const Wavelet& w);

struct DenoiseOptions {
  double multiplier = 1.0;
  std::string wavelet = kDefaultWavelet;
  int levels = kDefaultLevels;
};

// Denoises each of the 11 contours independently.
ContourSet denoise_contour_set(const ContourSet& contours, const DenoiseOptions& options = {});

}  // namespace dopplive

#endif  // DOPPLIVE_WAVELET_HPP_
