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

#ifndef XLTTS_AUDIO_STFT_H_
#define XLTTS_AUDIO_STFT_H_

#include <vector>

#include "audio/wav.h"
#include "core/tensor.h"

namespace xltts {

// Canonical analysis settings: 1024-point transform, hop 256, Hann window,
// centered with reflect padding; 80 mel bands spanning 0-8000 Hz.
struct StftConfig {
  int n_fft = 1024;
  int hop = 256;
  int win = 1024;
  int mel_bands = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  int sample_rate = kCanonicalSampleRate;

  int bins() const { return n_fft / 2 + 1; }
};

struct Spectrogram {
  enum class Kind { kLinear, kMel };
  Mat magnitudes;  // [bins x frames]
  Kind kind = Kind::kLinear;
  int hop = 256;
  int win = 1024;
  int n_fft = 1024;

  Eigen::Index frames() const { return magnitudes.cols(); }
  Eigen::Index bins() const { return magnitudes.rows(); }
};

// The transform is a plain matrix product against fixed cosine/sine bases,
// which keeps the fast featurizer and the autodiff reconstruction-loss path
// numerically identical.
struct StftBasis {
  StftConfig cfg;
  Mat cos_basis;  // [bins x n_fft]
  Mat sin_basis;  // [bins x n_fft]
  Mat mel;        // [mel_bands x bins]
  Eigen::VectorXd window;

  explicit StftBasis(const StftConfig& config);
  // Shared instance for the default configuration.
  static const StftBasis& Canonical();
};

// Triangular mel filterbank on the HTK mel scale, [mel_bands x bins].
Mat MelFilterbank(const StftConfig& cfg);

// Number of analysis frames for a signal of the given length:
// 1 + floor(length / hop) under centered padding.
Eigen::Index NumFrames(Eigen::Index length, const StftConfig& cfg);

// Composed gather indices mapping (frame, tap) positions directly into the
// unpadded signal, reflect-padded at the edges. Size n_fft * frames.
std::vector<int> FrameGatherIndices(Eigen::Index length,
                                    const StftConfig& cfg);

Spectrogram LinearSpectrogram(const Waveform& w, const StftConfig& cfg = {});
Spectrogram MelSpectrogram(const Waveform& w, const StftConfig& cfg = {});

// Differentiable log-mel of a [1 x N] waveform tensor; gradient-safe floors
// are applied before the square root and the log.
Tensor LogMelFromWave(const Tensor& wave_row, const StftBasis& basis);

}  // namespace xltts

#endif  // XLTTS_AUDIO_STFT_H_
