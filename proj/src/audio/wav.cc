// Copyright (c) 2026 The xltts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "util/error.h"

namespace xltts {

namespace {

uint32_t ReadU32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

uint16_t ReadU16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | p[1] << 8);
}

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void PutU16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>(v >> 8));
}

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

Waveform ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kIoError, path + ": not a RIFF/WAVE file");
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  const uint8_t* data = nullptr;
  uint32_t data_size = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const uint8_t* hdr = bytes.data() + pos;
    uint32_t chunk_size = ReadU32(hdr + 4);
    size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      // Tolerate a short final data chunk (common with streamed writers).
      chunk_size = static_cast<uint32_t>(bytes.size() - body);
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        throw Error(ErrorCode::kIoError, path + ": short fmt chunk");
      }
      format = ReadU16(bytes.data() + body);
      channels = ReadU16(bytes.data() + body + 2);
      sample_rate = ReadU32(bytes.data() + body + 4);
      bits = ReadU16(bytes.data() + body + 14);
      if (format == 0xFFFE && chunk_size >= 26) {
        // WAVE_FORMAT_EXTENSIBLE: real tag leads the SubFormat GUID.
        format = ReadU16(bytes.data() + body + 24);
      }
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (channels == 0 || sample_rate == 0 || data == nullptr) {
    throw Error(ErrorCode::kIoError, path + ": missing fmt or data chunk");
  }
  int bytes_per_sample = bits / 8;
  if (bytes_per_sample == 0) {
    throw Error(ErrorCode::kIoError, path + ": zero bit depth");
  }
  size_t frame_bytes = static_cast<size_t>(bytes_per_sample) * channels;
  size_t n_frames = data_size / frame_bytes;
  if (n_frames == 0) {
    throw Error(ErrorCode::kEmptyWaveform, path);
  }

  auto decode = [&](const uint8_t* p) -> double {
    if (format == 1 && bits == 16) {
      int16_t v;
      std::memcpy(&v, p, 2);
      return v / 32768.0;
    }
    if (format == 1 && bits == 24) {
      int32_t v = (p[0] << 8 | p[1] << 16 | p[2] << 24) >> 8;
      return v / 8388608.0;
    }
    if (format == 1 && bits == 32) {
      int32_t v;
      std::memcpy(&v, p, 4);
      return v / 2147483648.0;
    }
    if (format == 3 && bits == 32) {
      float v;
      std::memcpy(&v, p, 4);
      return static_cast<double>(v);
    }
    throw Error(ErrorCode::kIoError,
                path + ": unsupported sample format tag " +
                    std::to_string(format) + " / " + std::to_string(bits) +
                    " bits");
  };

  Waveform w;
  w.sample_rate = static_cast<int>(sample_rate);
  w.samples.resize(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += decode(data + f * frame_bytes +
                    static_cast<size_t>(c) * bytes_per_sample);
    }
    double v = acc / channels;
    if (!std::isfinite(v)) v = 0.0;
    w.samples[f] = std::clamp(v, -1.0, 1.0);
  }
  return w;
}

Waveform ReadWavCanonical(const std::string& path) {
  return Resample(ReadWav(path), kCanonicalSampleRate);
}

void WriteWav(const std::string& path, const Waveform& w) {
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, path);
  }
  std::string out;
  uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.append("RIFF");
  PutU32(&out, 36 + data_bytes);
  out.append("WAVEfmt ");
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(w.sample_rate));
  PutU32(&out, static_cast<uint32_t>(w.sample_rate) * 2);
  PutU16(&out, 2);   // block align
  PutU16(&out, 16);  // bits
  out.append("data");
  PutU32(&out, data_bytes);
  for (double s : w.samples) {
    double v = std::clamp(s, -1.0, 1.0);
    // Same 1/32768 scale as the reader, so a write/read round trip only
    // costs the rounding step.
    int32_t q = static_cast<int32_t>(std::lrint(v * 32768.0));
    q = std::clamp(q, -32768, 32767);
    PutU16(&out, static_cast<uint16_t>(static_cast<int16_t>(q)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
}

Waveform Resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "non-positive sample rate");
  }
  if (w.sample_rate == target_rate) return w;
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, "resample input");
  }

  double ratio = static_cast<double>(target_rate) / w.sample_rate;
  int64_t n_in = static_cast<int64_t>(w.samples.size());
  int64_t n_out = std::max<int64_t>(1, std::llround(n_in * ratio));

  // Kernel in input-sample units; stretched when downsampling so the cutoff
  // tracks the output Nyquist.
  double scale = std::min(1.0, ratio) * 0.95;
  const int base_half = 24;
  double half_width = base_half / scale;

  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t i = 0; i < n_out; ++i) {
    double center = i / ratio;
    int64_t lo = static_cast<int64_t>(std::ceil(center - half_width));
    int64_t hi = static_cast<int64_t>(std::floor(center + half_width));
    double acc = 0.0, wsum = 0.0;
    for (int64_t j = lo; j <= hi; ++j) {
      double t = j - center;
      // Hann-windowed sinc; normalizing by the weight sum keeps DC exact.
      double win = 0.5 + 0.5 * std::cos(M_PI * t / half_width);
      double weight = Sinc(scale * t) * win;
      wsum += weight;
      if (j >= 0 && j < n_in) acc += weight * w.samples[j];
    }
    double v = wsum != 0.0 ? acc / wsum : 0.0;
    out.samples[i] = std::clamp(v, -1.0, 1.0);
  }
  return out;
}

}  // namespace xltts
