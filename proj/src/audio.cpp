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

#include "dopplive/audio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "dopplive/error.hpp"

namespace dopplive {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

AudioBuffer::AudioBuffer(double sample_rate, std::vector<std::vector<double>> channels)
    : sample_rate_(sample_rate), channels_(std::move(channels)) {
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_)) {
    throw Error(ErrorKind::kInvalidArgument, "sample rate must be positive");
  }
  if (channels_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "audio buffer needs at least one channel");
  }
  const std::size_t n = channels_.front().size();
  for (const auto& ch : channels_) {
    if (ch.size() != n) {
      throw Error(ErrorKind::kInvalidArgument, "all channels must have equal length");
    }
  }
}

AudioBuffer AudioBuffer::mono(double sample_rate, std::vector<double> samples) {
  std::vector<std::vector<double>> channels;
  channels.push_back(std::move(samples));
  return AudioBuffer(sample_rate, std::move(channels));
}

std::span<const double> AudioBuffer::channel(std::size_t index) const {
  if (index >= channels_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "channel index out of range");
  }
  return channels_[index];
}

std::span<double> AudioBuffer::channel(std::size_t index) {
  if (index >= channels_.size()) {
    throw Error(ErrorKind::kInvalidArgument, "channel index out of range");
  }
  return channels_[index];
}

void AudioBuffer::require_mono(const char* operation) const {
  if (channels_.size() != 1) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(operation) + " requires a single-channel buffer");
  }
}

bool is_standard_sample_rate(double sample_rate) {
  return sample_rate == 48000.0 || sample_rate == 96000.0 || sample_rate == 192000.0;
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T read_le(const std::uint8_t* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

template <typename T>
void append_le(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kParse, path.string() + " is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* payload = nullptr;
  std::size_t payload_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::uint8_t* chunk = data.data() + pos;
    const auto size = read_le<std::uint32_t>(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min<std::size_t>(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw Error(ErrorKind::kParse, "truncated fmt chunk");
      format = read_le<std::uint16_t>(chunk + 8);
      channels = read_le<std::uint16_t>(chunk + 10);
      rate = read_le<std::uint32_t>(chunk + 12);
      bits = read_le<std::uint16_t>(chunk + 22);
      if (format == kFormatExtensible) {
        if (available < 40) throw Error(ErrorKind::kParse, "truncated extensible fmt chunk");
        // First two bytes of the subformat GUID carry the plain format tag.
        format = read_le<std::uint16_t>(chunk + 8 + 24);
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = chunk + 8;
      payload_size = available;
    }
    pos = body + size + (size & 1u);
  }

  if (channels == 0 || rate == 0) throw Error(ErrorKind::kParse, "missing fmt chunk");
  if (payload == nullptr) throw Error(ErrorKind::kParse, "missing data chunk");
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorKind::kParse, "unsupported WAV encoding (format " +
                                       std::to_string(format) + ", " +
                                       std::to_string(bits) + " bits)");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frames = payload_size / (bytes_per_sample * channels);
  std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = payload + (i * channels + c) * bytes_per_sample;
      out[c][i] = pcm16 ? read_le<std::int16_t>(p) / 32768.0
                        : static_cast<double>(read_le<float>(p));
    }
  }
  return AudioBuffer(static_cast<double>(rate), std::move(out));
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer,
               WavEncoding encoding) {
  const double rate = buffer.sample_rate();
  if (rate != std::floor(rate) || rate > 4294967295.0) {
    throw Error(ErrorKind::kInvalidArgument, "WAV needs an integral sample rate");
  }
  const std::uint16_t channels = static_cast<std::uint16_t>(buffer.channel_count());
  const std::uint16_t bits = encoding == WavEncoding::kPcm16 ? 16 : 32;
  const std::uint16_t block_align = channels * bits / 8;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(buffer.length() * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  append_le<std::uint32_t>(out, 36 + data_size);
  out.append("WAVEfmt ");
  append_le<std::uint32_t>(out, 16);
  append_le<std::uint16_t>(out, encoding == WavEncoding::kPcm16 ? kFormatPcm : kFormatFloat);
  append_le<std::uint16_t>(out, channels);
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(rate));
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(rate) * block_align);
  append_le<std::uint16_t>(out, block_align);
  append_le<std::uint16_t>(out, bits);
  out.append("data");
  append_le<std::uint32_t>(out, data_size);

  for (std::size_t i = 0; i < buffer.length(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = buffer.channels()[c][i];
      if (encoding == WavEncoding::kPcm16) {
        const double clipped = std::clamp(x, -1.0, 1.0);
        append_le<std::int16_t>(
            out, static_cast<std::int16_t>(std::lround(std::min(clipped * 32768.0, 32767.0))));
      } else {
        append_le<float>(out, static_cast<float>(x));
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorKind::kIo, "short write to " + path.string());
}

}  // namespace dopplive
