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

#include "audio/loudness.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "util/error.h"

namespace xltts {

namespace {

// Analog prototype constants for the two K-weighting stages.
constexpr double kShelfFreq = 1681.9744509742;
constexpr double kShelfGainDb = 3.99984385397;
constexpr double kShelfQ = 0.7071752369;
constexpr double kHighpassFreq = 38.13547087602;
constexpr double kHighpassQ = 0.50032703732;

constexpr double kBlockSeconds = 0.4;
constexpr double kStepSeconds = 0.1;  // 75% overlap
constexpr double kAbsoluteGateLufs = -70.0;
constexpr double kRelativeGateLu = -10.0;

Biquad DesignHighShelf(double f0, double gain_db, double q, double fs) {
  double a = std::pow(10.0, gain_db / 40.0);
  double w0 = 2.0 * M_PI * f0 / fs;
  double alpha = std::sin(w0) / (2.0 * q);
  double cw = std::cos(w0);
  double sq = std::sqrt(a);
  double b0 = a * ((a + 1) + (a - 1) * cw + 2 * sq * alpha);
  double b1 = -2 * a * ((a - 1) + (a + 1) * cw);
  double b2 = a * ((a + 1) + (a - 1) * cw - 2 * sq * alpha);
  double a0 = (a + 1) - (a - 1) * cw + 2 * sq * alpha;
  double a1 = 2 * ((a - 1) - (a + 1) * cw);
  double a2 = (a + 1) - (a - 1) * cw - 2 * sq * alpha;
  return Biquad{b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

Biquad DesignHighpass(double f0, double q, double fs) {
  double w0 = 2.0 * M_PI * f0 / fs;
  double alpha = std::sin(w0) / (2.0 * q);
  double cw = std::cos(w0);
  double b0 = (1 + cw) / 2;
  double b1 = -(1 + cw);
  double b2 = (1 + cw) / 2;
  double a0 = 1 + alpha;
  double a1 = -2 * cw;
  double a2 = 1 - alpha;
  return Biquad{b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

}  // namespace

std::vector<double> Biquad::Filter(const std::vector<double>& x) const {
  std::vector<double> y(x.size());
  double s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double out = b0 * x[i] + s1;
    s1 = b1 * x[i] - a1 * out + s2;
    s2 = b2 * x[i] - a2 * out;
    y[i] = out;
  }
  return y;
}

double Biquad::MagnitudeAt(double freq_hz, double sample_rate) const {
  std::complex<double> z =
      std::polar(1.0, -2.0 * M_PI * freq_hz / sample_rate);
  std::complex<double> num = b0 + b1 * z + b2 * z * z;
  std::complex<double> den = 1.0 + a1 * z + a2 * z * z;
  return std::abs(num / den);
}

std::array<Biquad, 2> KWeightingFilters(double sample_rate) {
  return {DesignHighShelf(kShelfFreq, kShelfGainDb, kShelfQ, sample_rate),
          DesignHighpass(kHighpassFreq, kHighpassQ, sample_rate)};
}

double MeasureLoudnessLufs(const Waveform& w) {
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, "loudness input");
  }
  size_t block = static_cast<size_t>(std::lround(kBlockSeconds *
                                                 w.sample_rate));
  size_t step = static_cast<size_t>(std::lround(kStepSeconds *
                                                w.sample_rate));
  if (block == 0 || step == 0 || w.samples.size() < block) {
    throw Error(ErrorCode::kImmeasurableLoudness,
                "signal shorter than one 400 ms gating block");
  }

  auto filters = KWeightingFilters(w.sample_rate);
  std::vector<double> weighted = filters[1].Filter(filters[0].Filter(
      w.samples));

  // Per-block mean square power, then the two-stage gate.
  std::vector<double> powers;
  for (size_t start = 0; start + block <= weighted.size(); start += step) {
    double acc = 0.0;
    for (size_t i = start; i < start + block; ++i) {
      acc += weighted[i] * weighted[i];
    }
    powers.push_back(acc / block);
  }

  auto block_lufs = [](double p) { return -0.691 + 10.0 * std::log10(p); };
  double sum = 0.0;
  size_t count = 0;
  for (double p : powers) {
    if (p > 0 && block_lufs(p) > kAbsoluteGateLufs) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kImmeasurableLoudness,
                "every block below the absolute gate");
  }
  double relative_threshold = block_lufs(sum / count) + kRelativeGateLu;
  sum = 0.0;
  count = 0;
  for (double p : powers) {
    if (p > 0 && block_lufs(p) > kAbsoluteGateLufs &&
        block_lufs(p) > relative_threshold) {
      sum += p;
      ++count;
    }
  }
  if (count == 0) {
    throw Error(ErrorCode::kImmeasurableLoudness,
                "every block below the relative gate");
  }
  return block_lufs(sum / count);
}

Waveform NormalizeLoudness(const Waveform& w, double target_lufs,
                           int* clipped_count) {
  if (target_lufs < -40.0 || target_lufs > -10.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "target loudness outside [-40, -10] LUFS");
  }
  double measured = MeasureLoudnessLufs(w);
  double gain = std::pow(10.0, (target_lufs - measured) / 20.0);
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.resize(w.samples.size());
  int clips = 0;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    double v = w.samples[i] * gain;
    if (v > 1.0 || v < -1.0) {
      ++clips;
      v = std::clamp(v, -1.0, 1.0);
    }
    out.samples[i] = v;
  }
  if (clipped_count != nullptr) *clipped_count = clips;
  return out;
}

}  // namespace xltts
