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

#include "model/content_encoder.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "util/error.h"

namespace xltts {

using json = nlohmann::json;

namespace {

// Any change here silently re-randomizes every stored content target, so
// the seed is part of the format.
constexpr uint64_t kWeightSeed = 0x517ec0de;

}  // namespace

std::string ContentEncoderConfig::ToJson() const {
  json j;
  j["kind"] = kind;
  j["d_content"] = d_content;
  return j.dump();
}

ContentEncoderConfig ContentEncoderConfig::FromJson(
    const std::string& json_text) {
  ContentEncoderConfig c;
  try {
    json j = json::parse(json_text);
    j.at("kind").get_to(c.kind);
    j.at("d_content").get_to(c.d_content);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("content encoder config: ") + e.what());
  }
  return c;
}

ContentEncoder::ContentEncoder(const ContentEncoderConfig& cfg) : cfg_(cfg) {
  if (cfg.kind != "builtin-conv") {
    throw Error(ErrorCode::kEncoderUnavailable,
                "no content encoder of kind '" + cfg.kind + "' is wired in");
  }
  kernels_ = {10, 8, 4, 4};
  strides_ = {5, 4, 2, 2};
  const int channels[5] = {1, 64, 64, 128, cfg.d_content};
  Rng rng(kWeightSeed);
  for (int i = 0; i < 4; ++i) {
    const int fan_in = channels[i] * kernels_[i];
    Mat w(channels[i + 1], fan_in);
    const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        w(r, c) = stddev * rng.Normal();
      }
    }
    weights_.push_back(Tensor::Constant(std::move(w)));
  }
}

Eigen::Index ContentEncoder::OutputFrames(Eigen::Index n) const {
  for (size_t i = 0; i < kernels_.size(); ++i) {
    if (n < kernels_[i]) return -1;
    n = (n - kernels_[i]) / strides_[i] + 1;
  }
  return n;
}

Eigen::Index ContentEncoder::MinSamples() const {
  // Smallest n with one output frame, found by inverting the length map.
  Eigen::Index n = 1;
  for (size_t i = kernels_.size(); i-- > 0;) {
    n = (n - 1) * strides_[i] + kernels_[i];
  }
  return n;
}

Tensor ContentEncoder::Forward(const Tensor& wav_row) const {
  if (!wav_row.defined() || wav_row.rows() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "content input must be [1 x N]");
  }
  if (OutputFrames(wav_row.cols()) < 1) {
    throw Error(ErrorCode::kTooShort,
                "waveform of " + std::to_string(wav_row.cols()) +
                    " samples is under the " +
                    std::to_string(MinSamples()) + "-sample minimum");
  }
  Tensor x = wav_row;
  for (size_t i = 0; i < weights_.size(); ++i) {
    Conv1dSpec spec;
    spec.kernel = kernels_[i];
    spec.stride = strides_[i];
    x = Conv1d(x, weights_[i], Tensor(), spec);
    x = Gelu(x);
  }
  return x;
}

}  // namespace xltts
