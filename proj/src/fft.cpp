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

#include "dopplive/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "dopplive/error.hpp"

namespace dopplive {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* complex = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    fftw_free(real);
    fftw_free(complex);
  }
};

RealFft::RealFft(std::size_t size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (size == 0) throw Error(ErrorKind::kInvalidArgument, "FFT size must be positive");
  plans_->real = fftw_alloc_real(size);
  plans_->complex = fftw_alloc_complex(size / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  // FFTW_ESTIMATE keeps plans (and therefore rounding) reproducible run to run.
  plans_->forward = fftw_plan_dft_r2c_1d(static_cast<int>(size), plans_->real,
                                         plans_->complex, FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_c2r_1d(static_cast<int>(size), plans_->complex,
                                         plans_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> input,
                      std::span<std::complex<double>> spectrum) {
  if (input.size() > size_ || spectrum.size() < spectrum_size()) {
    throw Error(ErrorKind::kInvalidArgument, "FFT buffer size mismatch");
  }
  std::copy(input.begin(), input.end(), plans_->real);
  std::fill(plans_->real + input.size(), plans_->real + size_, 0.0);
  fftw_execute(plans_->forward);
  for (std::size_t k = 0; k < spectrum_size(); ++k) {
    spectrum[k] = {plans_->complex[k][0], plans_->complex[k][1]};
  }
}

void RealFft::inverse(std::span<const std::complex<double>> spectrum,
                      std::span<double> output) {
  if (spectrum.size() < spectrum_size() || output.size() < size_) {
    throw Error(ErrorKind::kInvalidArgument, "FFT buffer size mismatch");
  }
  for (std::size_t k = 0; k < spectrum_size(); ++k) {
    plans_->complex[k][0] = spectrum[k].real();
    plans_->complex[k][1] = spectrum[k].imag();
  }
  // c2r destroys its input; it is rewritten on every call anyway.
  fftw_execute(plans_->inverse);
  std::copy(plans_->real, plans_->real + size_, output.begin());
}

}  // namespace dopplive
