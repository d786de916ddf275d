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

#ifndef XLTTS_MODEL_CONTENT_ENCODER_H_
#define XLTTS_MODEL_CONTENT_ENCODER_H_

#include <string>
#include <vector>

#include "core/tensor.h"

namespace xltts {

// Frozen waveform-to-frames featurizer for the content loss. The built-in
// encoder is a fixed-seed random strided convolution stack: its weights are
// graph constants (never registered, never updated), while gradients still
// flow through to the input waveform. The slot accepts other encoder kinds
// by name so a pretrained model can be dropped in.
struct ContentEncoderConfig {
  std::string kind = "builtin-conv";
  int d_content = 128;

  std::string ToJson() const;
  static ContentEncoderConfig FromJson(const std::string& json_text);
};

class ContentEncoder {
 public:
  ContentEncoder() = default;
  // Throws kEncoderUnavailable for any kind other than "builtin-conv".
  explicit ContentEncoder(const ContentEncoderConfig& cfg);

  // wav_row [1 x N] -> [d_content x T_c]; needs at least MinSamples().
  Tensor Forward(const Tensor& wav_row) const;
  // Deterministic length mapping; -1 when n is too short.
  Eigen::Index OutputFrames(Eigen::Index n) const;
  Eigen::Index MinSamples() const;
  const ContentEncoderConfig& config() const { return cfg_; }

 private:
  ContentEncoderConfig cfg_;
  std::vector<Tensor> weights_;  // constants
  std::vector<int> kernels_;
  std::vector<int> strides_;
};

}  // namespace xltts

#endif  // XLTTS_MODEL_CONTENT_ENCODER_H_
