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

#ifndef XLTTS_MODEL_CONFIG_H_
#define XLTTS_MODEL_CONFIG_H_

#include <string>
#include <vector>

namespace xltts {

// Dimension manifest of the TTS backbone. Two presets share every structural
// count (layer/block/flow numbers); they differ only in channel widths.
// "paper" is the full-size model, "desk" a narrow one trainable on a single
// workstation CPU.
struct ModelConfig {
  // Prior text encoder.
  int char_embed = 192;
  int lang_embed = 4;
  int ffn = 768;
  int heads = 2;
  int text_layers = 10;
  int d_z = 192;
  // Posterior encoder.
  int spec_bins = 513;
  int post_hidden = 192;
  int post_layers = 16;
  int wn_kernel = 5;
  // Flow decoder.
  int flow_couplings = 4;
  int flow_wn_layers = 4;
  int flow_hidden = 192;
  // Stochastic duration predictor.
  int sdp_filter = 192;
  int sdp_kernel = 3;
  int sdp_layers = 3;
  int sdp_bins = 10;
  double sdp_tail = 5.0;
  int sdp_flows = 4;
  // Style interfaces.
  int d_spk = 512;
  int d_emo = 256;
  int d_content = 128;
  int gin = 256;
  // Vocoder generator.
  int gen_initial = 512;
  std::vector<int> upsample = {8, 8, 2, 2};
  std::vector<int> up_kernels = {16, 16, 4, 4};
  std::vector<int> mrf_kernels = {3, 7, 11};
  std::vector<int> mrf_dilations = {1, 3, 5};
  // Discriminators.
  std::vector<int> mpd_periods = {2, 3, 5, 7, 11};
  std::vector<int> mpd_channels = {32, 128, 512, 512};
  std::vector<int> msd_channels = {128, 128, 256, 512, 512};
  double dropout = 0.1;
  // Whether the posterior encoder sees the emotion half of the style vector
  // (the speaker half is always applied).
  bool posterior_use_emotion = true;

  // Transformer width; the char and language embeddings are concatenated.
  int hidden() const { return char_embed + lang_embed; }
  int hop() const;  // product of upsample factors

  std::string ToJson() const;
  static ModelConfig FromJson(const std::string& json_text);
  bool operator==(const ModelConfig& o) const;

  static ModelConfig Desk();
  static ModelConfig Paper();
};

}  // namespace xltts

#endif  // XLTTS_MODEL_CONFIG_H_
