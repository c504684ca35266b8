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

#ifndef DOPPLIVE_AUDIO_HPP_
#define DOPPLIVE_AUDIO_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace dopplive {

// Multichannel PCM samples at a fixed rate. Samples are nominally in [-1, 1].
class AudioBuffer {
 public:
  AudioBuffer() = default;
  // Throws kInvalidArgument if the rate is not positive, there are no
  // channels, or channel lengths differ.
  AudioBuffer(double sample_rate, std::vector<std::vector<double>> channels);

  static AudioBuffer mono(double sample_rate, std::vector<double> samples);

  double sample_rate() const { return sample_rate_; }
  std::size_t channel_count() const { return channels_.size(); }
  std::size_t length() const { return channels_.empty() ? 0 : channels_.front().size(); }
  double duration_seconds() const { return static_cast<double>(length()) / sample_rate_; }

  std::span<const double> channel(std::size_t index) const;
  std::span<double> channel(std::size_t index);
  const std::vector<std::vector<double>>& channels() const { return channels_; }

  // Convenience for the many single-channel operations.
  std::span<const double> samples() const { return channel(0); }

  // Throws kInvalidArgument unless the buffer has exactly one channel.
  void require_mono(const char* operation) const;

 private:
  double sample_rate_ = 1.0;
  std::vector<std::vector<double>> channels_;
};

enum class WavEncoding { kPcm16, kFloat32 };

// 48, 96 and 192 kHz. Other rates load fine; the CLI warns about them.
bool is_standard_sample_rate(double sample_rate);

// Reads RIFF/WAVE with 16-bit PCM or 32-bit IEEE float payloads
// (WAVE_FORMAT_EXTENSIBLE headers included). Throws kIo / kParse.
AudioBuffer read_wav(const std::filesystem::path& path);

// Writes little-endian RIFF/WAVE. PCM16 output is clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace dopplive

#endif  // DOPPLIVE_AUDIO_HPP_
