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

#include "dopplive/signal.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dopplive/butterworth.hpp"
#include "dopplive/error.hpp"
#include "dopplive/fft.hpp"

namespace dopplive {

namespace {

constexpr int kProbeFilterOrder = 4;
constexpr int kVoiceFilterOrder = 8;

std::size_t to_samples(double seconds, double sample_rate) {
  return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

}  // namespace

AudioBuffer generate_probe(double sample_rate, double f0, double duration_s,
                           double amplitude) {
  if (!(sample_rate > 0.0)) throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  if (f0 >= sample_rate / 2.0) {
    throw Error(ErrorKind::kFrequencyAliasing,
                "probe frequency " + std::to_string(f0) + " Hz is not below Nyquist");
  }
  if (!(duration_s >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "duration must be >= 0");
  const std::size_t n = to_samples(duration_s, sample_rate);
  std::vector<double> samples(n);
  const double w = 2.0 * std::numbers::pi * f0 / sample_rate;
  for (std::size_t k = 0; k < n; ++k) samples[k] = amplitude * std::sin(w * static_cast<double>(k));
  return AudioBuffer::mono(sample_rate, std::move(samples));
}

Spectrogram::Spectrogram(std::size_t frame_count, std::size_t bin_count, std::size_t first_bin,
                         std::size_t fft_size, std::size_t window_samples,
                         std::size_t hop_samples, double sample_rate)
    : frame_count_(frame_count),
      bin_count_(bin_count),
      first_bin_(first_bin),
      fft_size_(fft_size),
      window_samples_(window_samples),
      hop_samples_(hop_samples),
      sample_rate_(sample_rate),
      values_(frame_count * bin_count) {}

std::vector<double> hann_window(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / static_cast<double>(length));
  }
  return w;
}

Spectrogram stft(const AudioBuffer& buffer, const StftOptions& options) {
  buffer.require_mono("stft");
  const double fs = buffer.sample_rate();
  if (!(options.hop_s > 0.0)) throw Error(ErrorKind::kInvalidArgument, "hop must be positive");
  if (!(options.target_bin_width_hz > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "target bin width must be positive");
  }
  const std::size_t window = to_samples(options.window_s, fs);
  const std::size_t hop = std::max<std::size_t>(1, to_samples(options.hop_s, fs));
  if (window == 0) throw Error(ErrorKind::kInvalidArgument, "window must span at least one sample");
  const std::size_t len = buffer.length();
  if (len < window) {
    throw Error(ErrorKind::kInsufficientSignal,
                "signal of " + std::to_string(len) + " samples is shorter than one " +
                    std::to_string(window) + "-sample window");
  }

  const auto fft_size = std::max<std::size_t>(
      window, static_cast<std::size_t>(std::ceil(fs / options.target_bin_width_hz - 1e-9)));
  const std::size_t spectrum = fft_size / 2 + 1;
  const double bin_width = fs / static_cast<double>(fft_size);

  std::size_t first = 0;
  std::size_t last = spectrum - 1;
  if (options.min_freq_hz) {
    first = static_cast<std::size_t>(std::max(0.0, std::ceil(*options.min_freq_hz / bin_width - 1e-9)));
  }
  if (options.max_freq_hz) {
    last = std::min(last, static_cast<std::size_t>(
                              std::max(0.0, std::floor(*options.max_freq_hz / bin_width + 1e-9))));
  }
  if (first > last) throw Error(ErrorKind::kRange, "frequency crop selects no bins");

  const std::size_t frames = (len - window) / hop + 1;
  Spectrogram out(frames, last - first + 1, first, fft_size, window, hop, fs);

  const std::vector<double> taper = hann_window(window);
  RealFft fft(fft_size);
  std::vector<double> frame(window);
  std::vector<std::complex<double>> bins(spectrum);
  const auto x = buffer.samples();
  for (std::size_t k = 0; k < frames; ++k) {
    const std::size_t start = k * hop;
    for (std::size_t n = 0; n < window; ++n) frame[n] = x[start + n] * taper[n];
    fft.forward(frame, bins);
    for (std::size_t b = first; b <= last; ++b) out.at(k, b - first) = bins[b];
  }
  return out;
}

BandSplit split_bands(const AudioBuffer& buffer, double probe_f0) {
  buffer.require_mono("split_bands");
  if (buffer.sample_rate() < 44100.0) {
    throw Error(ErrorKind::kFrequencyAliasing, "split_bands needs a sample rate of at least 44.1 kHz");
  }
  const auto lowpass = SosFilter::butterworth_lowpass(kVoiceFilterOrder, kVoiceCutoffHz,
                                                      buffer.sample_rate());
  AudioBuffer voice = AudioBuffer::mono(buffer.sample_rate(), lowpass.filtfilt(buffer.samples()));
  AudioBuffer probe = bandpass_probe(buffer, probe_f0);
  return {std::move(voice), std::move(probe)};
}

AudioBuffer bandpass_probe(const AudioBuffer& buffer, double probe_f0, double half_band_hz) {
  buffer.require_mono("bandpass_probe");
  const double high = probe_f0 + half_band_hz;
  if (buffer.sample_rate() / 2.0 <= high) {
    throw Error(ErrorKind::kFrequencyAliasing,
                "sample rate " + std::to_string(buffer.sample_rate()) +
                    " Hz cannot represent the probe band up to " + std::to_string(high) + " Hz");
  }
  const auto bandpass = SosFilter::butterworth_bandpass(
      kProbeFilterOrder, probe_f0 - half_band_hz, high, buffer.sample_rate());
  return AudioBuffer::mono(buffer.sample_rate(), bandpass.filtfilt(buffer.samples()));
}

}  // namespace dopplive
