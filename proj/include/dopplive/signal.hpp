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

#ifndef DOPPLIVE_SIGNAL_HPP_
#define DOPPLIVE_SIGNAL_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "dopplive/audio.hpp"

namespace dopplive {

inline constexpr double kDefaultProbeHz = 20000.0;
inline constexpr double kVoiceCutoffHz = 10000.0;
inline constexpr double kProbeHalfBandHz = 200.0;

// Single-channel sinusoid amplitude * sin(2*pi*f0*k/fs), phase 0 at k = 0.
// Throws kFrequencyAliasing if f0 >= fs/2.
AudioBuffer generate_probe(double sample_rate, double f0, double duration_s,
                           double amplitude);

struct StftOptions {
  double window_s = 0.25;
  double hop_s = 0.01;
  // FFT length is the smallest n >= window with fs/n <= target (zero padding).
  // The padding interpolates the spectrum; it does not add resolution.
  double target_bin_width_hz = 1.0;
  // Optional crop; only bins whose centre lies in [min, max] are kept.
  std::optional<double> min_freq_hz;
  std::optional<double> max_freq_hz;
};

// Hann-windowed STFT frames, stored [frame][bin] row-major. Frame k covers
// samples [k*hop, k*hop + window).
class Spectrogram {
 public:
  Spectrogram() = default;
  Spectrogram(std::size_t frame_count, std::size_t bin_count, std::size_t first_bin,
              std::size_t fft_size, std::size_t window_samples, std::size_t hop_samples,
              double sample_rate);

  std::size_t frame_count() const { return frame_count_; }
  std::size_t bin_count() const { return bin_count_; }
  std::size_t fft_size() const { return fft_size_; }
  std::size_t window_samples() const { return window_samples_; }
  std::size_t hop_samples() const { return hop_samples_; }
  double sample_rate() const { return sample_rate_; }

  double frame_hop_s() const { return hop_samples_ / sample_rate_; }
  double window_len_s() const { return window_samples_ / sample_rate_; }
  double bin_width_hz() const { return sample_rate_ / fft_size_; }
  double freq_origin_hz() const { return first_bin_ * bin_width_hz(); }
  double bin_frequency(std::size_t bin) const { return (first_bin_ + bin) * bin_width_hz(); }
  double frame_start_s(std::size_t frame) const { return frame * frame_hop_s(); }
  double frame_center_s(std::size_t frame) const {
    return frame_start_s(frame) + 0.5 * window_len_s();
  }

  std::complex<double>& at(std::size_t frame, std::size_t bin) {
    return values_[frame * bin_count_ + bin];
  }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return values_[frame * bin_count_ + bin];
  }
  double magnitude(std::size_t frame, std::size_t bin) const { return std::abs(at(frame, bin)); }

 private:
  std::size_t frame_count_ = 0;
  std::size_t bin_count_ = 0;
  std::size_t first_bin_ = 0;
  std::size_t fft_size_ = 1;
  std::size_t window_samples_ = 0;
  std::size_t hop_samples_ = 0;
  double sample_rate_ = 1.0;
  std::vector<std::complex<double>> values_;
};

// Frame count floor((len - window) / hop) + 1. Throws kInsufficientSignal if
// the buffer is shorter than one window.
Spectrogram stft(const AudioBuffer& buffer, const StftOptions& options = {});

// Periodic Hann window of the given length.
std::vector<double> hann_window(std::size_t length);

struct BandSplit {
  AudioBuffer voice;  // zero-phase order-8 lowpass at 10 kHz
  AudioBuffer probe;  // bandpass_probe()
};

// Requires fs >= 44.1 kHz.
BandSplit split_bands(const AudioBuffer& buffer, double probe_f0 = kDefaultProbeHz);

// Zero-phase order-4 Butterworth band-pass over [f0 - 200, f0 + 200] Hz,
// forward-backward response -3 dB at both edges. Throws kFrequencyAliasing
// when fs/2 does not exceed the upper edge.
AudioBuffer bandpass_probe(const AudioBuffer& buffer, double probe_f0 = kDefaultProbeHz,
                           double half_band_hz = kProbeHalfBandHz);

}  // namespace dopplive

#endif  // DOPPLIVE_SIGNAL_HPP_
