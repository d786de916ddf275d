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

#include "audio/stft.h"

#include <cmath>
#include <vector>

#include "util/error.h"

namespace xltts {

namespace {

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

// Reflects an out-of-range position back into [0, n), bouncing off both ends
// (edge samples are not duplicated).
Eigen::Index ReflectIndex(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

// Windowed frames of the signal as a [n_fft x frames] matrix.
Mat FrameSignal(const std::vector<double>& x, const StftConfig& cfg,
                const Eigen::VectorXd& window) {
  Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::Index frames = NumFrames(n, cfg);
  Eigen::Index pad = cfg.n_fft / 2;
  Mat out(cfg.n_fft, frames);
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (int k = 0; k < cfg.n_fft; ++k) {
      Eigen::Index src = ReflectIndex(f * cfg.hop + k - pad, n);
      out(k, f) = x[src] * window(k);
    }
  }
  return out;
}

Mat MagnitudesFromFrames(const Mat& frames, const StftBasis& basis) {
  Mat real, imag;
  real.noalias() = basis.cos_basis * frames;
  imag.noalias() = basis.sin_basis * frames;
  return (real.array().square() + imag.array().square()).sqrt();
}

}  // namespace

StftBasis::StftBasis(const StftConfig& config) : cfg(config) {
  if (cfg.win != cfg.n_fft) {
    throw Error(ErrorCode::kInvalidArgument,
                "window length must equal transform size");
  }
  int bins = cfg.bins();
  cos_basis.resize(bins, cfg.n_fft);
  sin_basis.resize(bins, cfg.n_fft);
  for (int b = 0; b < bins; ++b) {
    for (int t = 0; t < cfg.n_fft; ++t) {
      double phase = 2.0 * M_PI * b * t / cfg.n_fft;
      cos_basis(b, t) = std::cos(phase);
      sin_basis(b, t) = -std::sin(phase);
    }
  }
  mel = MelFilterbank(cfg);
  window.resize(cfg.win);
  for (int t = 0; t < cfg.win; ++t) {
    window(t) = 0.5 - 0.5 * std::cos(2.0 * M_PI * t / cfg.win);
  }
}

const StftBasis& StftBasis::Canonical() {
  static const StftBasis* basis = new StftBasis(StftConfig{});
  return *basis;
}

Mat MelFilterbank(const StftConfig& cfg) {
  int bins = cfg.bins();
  double mel_lo = HzToMel(cfg.fmin);
  double mel_hi = HzToMel(cfg.fmax);
  std::vector<double> edges(cfg.mel_bands + 2);
  for (int i = 0; i < cfg.mel_bands + 2; ++i) {
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.mel_bands + 1));
  }
  Mat fb = Mat::Zero(cfg.mel_bands, bins);
  for (int m = 0; m < cfg.mel_bands; ++m) {
    double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      double freq = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      double rise = (freq - lo) / (mid - lo);
      double fall = (hi - freq) / (hi - mid);
      fb(m, k) = std::max(0.0, std::min(rise, fall));
    }
  }
  return fb;
}

Eigen::Index NumFrames(Eigen::Index length, const StftConfig& cfg) {
  if (length < 1) {
    throw Error(ErrorCode::kEmptyWaveform, "spectrogram input");
  }
  return 1 + length / cfg.hop;
}

std::vector<int> FrameGatherIndices(Eigen::Index length,
                                    const StftConfig& cfg) {
  Eigen::Index frames = NumFrames(length, cfg);
  Eigen::Index pad = cfg.n_fft / 2;
  std::vector<int> idx;
  idx.reserve(static_cast<size_t>(frames) * cfg.n_fft);
  for (Eigen::Index f = 0; f < frames; ++f) {
    for (int k = 0; k < cfg.n_fft; ++k) {
      idx.push_back(static_cast<int>(
          ReflectIndex(f * cfg.hop + k - pad, length)));
    }
  }
  return idx;
}

namespace {

bool IsCanonicalConfig(const StftConfig& cfg) {
  StftConfig d;
  return cfg.n_fft == d.n_fft && cfg.hop == d.hop && cfg.win == d.win &&
         cfg.mel_bands == d.mel_bands && cfg.fmin == d.fmin &&
         cfg.fmax == d.fmax && cfg.sample_rate == d.sample_rate;
}

Spectrogram SpectrogramWithBasis(const Waveform& w, const StftBasis& basis,
                                 Spectrogram::Kind kind) {
  if (w.samples.empty()) {
    throw Error(ErrorCode::kEmptyWaveform, "spectrogram input");
  }
  const StftConfig& cfg = basis.cfg;
  Mat frames = FrameSignal(w.samples, cfg, basis.window);
  Spectrogram s;
  s.magnitudes = MagnitudesFromFrames(frames, basis);
  if (kind == Spectrogram::Kind::kMel) {
    s.magnitudes = basis.mel * s.magnitudes;
  }
  s.kind = kind;
  s.hop = cfg.hop;
  s.win = cfg.win;
  s.n_fft = cfg.n_fft;
  return s;
}

Spectrogram ComputeSpectrogram(const Waveform& w, const StftConfig& cfg,
                               Spectrogram::Kind kind) {
  if (IsCanonicalConfig(cfg)) {
    return SpectrogramWithBasis(w, StftBasis::Canonical(), kind);
  }
  StftBasis basis(cfg);
  return SpectrogramWithBasis(w, basis, kind);
}

}  // namespace

Spectrogram LinearSpectrogram(const Waveform& w, const StftConfig& cfg) {
  return ComputeSpectrogram(w, cfg, Spectrogram::Kind::kLinear);
}

Spectrogram MelSpectrogram(const Waveform& w, const StftConfig& cfg) {
  return ComputeSpectrogram(w, cfg, Spectrogram::Kind::kMel);
}

Tensor LogMelFromWave(const Tensor& wave_row, const StftBasis& basis) {
  if (wave_row.rows() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "waveform tensor must be [1 x N]");
  }
  const StftConfig& cfg = basis.cfg;
  std::vector<int> idx = FrameGatherIndices(wave_row.cols(), cfg);
  Eigen::Index frames = NumFrames(wave_row.cols(), cfg);
  Tensor gathered = GatherCols(wave_row, idx);            // [1 x n_fft*F]
  Tensor framed = Reshape(gathered, cfg.n_fft, frames);   // column-major fill
  Tensor windowed = MulColVec(framed, Tensor::Constant(Mat(basis.window)));
  Tensor real = MatMul(Tensor::Constant(basis.cos_basis), windowed);
  Tensor imag = MatMul(Tensor::Constant(basis.sin_basis), windowed);
  Tensor power = Add(Square(real), Square(imag));
  Tensor magnitude = Sqrt(ClampMin(power, 1e-10));
  Tensor mel = MatMul(Tensor::Constant(basis.mel), magnitude);
  return Log(ClampMin(mel, 1e-5));
}

}  // namespace xltts
