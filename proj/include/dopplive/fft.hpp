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

#ifndef DOPPLIVE_FFT_HPP_
#define DOPPLIVE_FFT_HPP_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace dopplive {

// Real-to-complex / complex-to-real transform of a fixed size, backed by
// FFTW. Unnormalized in both directions (inverse(forward(x)) == n * x).
// An instance is not shareable across threads; create one per thread.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t spectrum_size() const { return size_ / 2 + 1; }

  // `input` may be shorter than size(); the remainder is zero-padded.
  void forward(std::span<const double> input, std::span<std::complex<double>> spectrum);
  void inverse(std::span<const std::complex<double>> spectrum, std::span<double> output);

 private:
  struct Plans;
  std::size_t size_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace dopplive

#endif  // DOPPLIVE_FFT_HPP_
