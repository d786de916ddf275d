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

#include "model/config.h"

#include "json.hpp"
#include "util/error.h"

namespace xltts {

namespace {
using nlohmann::json;
}  // namespace

int ModelConfig::hop() const {
  int h = 1;
  for (int u : upsample) h *= u;
  return h;
}

std::string ModelConfig::ToJson() const {
  json j;
  j["char_embed"] = char_embed;
  j["lang_embed"] = lang_embed;
  j["ffn"] = ffn;
  j["heads"] = heads;
  j["text_layers"] = text_layers;
  j["d_z"] = d_z;
  j["spec_bins"] = spec_bins;
  j["post_hidden"] = post_hidden;
  j["post_layers"] = post_layers;
  j["wn_kernel"] = wn_kernel;
  j["flow_couplings"] = flow_couplings;
  j["flow_wn_layers"] = flow_wn_layers;
  j["flow_hidden"] = flow_hidden;
  j["sdp_filter"] = sdp_filter;
  j["sdp_kernel"] = sdp_kernel;
  j["sdp_layers"] = sdp_layers;
  j["sdp_bins"] = sdp_bins;
  j["sdp_tail"] = sdp_tail;
  j["sdp_flows"] = sdp_flows;
  j["d_spk"] = d_spk;
  j["d_emo"] = d_emo;
  j["d_content"] = d_content;
  j["gin"] = gin;
  j["gen_initial"] = gen_initial;
  j["upsample"] = upsample;
  j["up_kernels"] = up_kernels;
  j["mrf_kernels"] = mrf_kernels;
  j["mrf_dilations"] = mrf_dilations;
  j["mpd_periods"] = mpd_periods;
  j["mpd_channels"] = mpd_channels;
  j["msd_channels"] = msd_channels;
  j["dropout"] = dropout;
  j["posterior_use_emotion"] = posterior_use_emotion;
  return j.dump();
}

ModelConfig ModelConfig::FromJson(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("bad model config json: ") + e.what());
  }
  ModelConfig c;
  try {
    j.at("char_embed").get_to(c.char_embed);
    j.at("lang_embed").get_to(c.lang_embed);
    j.at("ffn").get_to(c.ffn);
    j.at("heads").get_to(c.heads);
    j.at("text_layers").get_to(c.text_layers);
    j.at("d_z").get_to(c.d_z);
    j.at("spec_bins").get_to(c.spec_bins);
    j.at("post_hidden").get_to(c.post_hidden);
    j.at("post_layers").get_to(c.post_layers);
    j.at("wn_kernel").get_to(c.wn_kernel);
    j.at("flow_couplings").get_to(c.flow_couplings);
    j.at("flow_wn_layers").get_to(c.flow_wn_layers);
    j.at("flow_hidden").get_to(c.flow_hidden);
    j.at("sdp_filter").get_to(c.sdp_filter);
    j.at("sdp_kernel").get_to(c.sdp_kernel);
    j.at("sdp_layers").get_to(c.sdp_layers);
    j.at("sdp_bins").get_to(c.sdp_bins);
    j.at("sdp_tail").get_to(c.sdp_tail);
    j.at("sdp_flows").get_to(c.sdp_flows);
    j.at("d_spk").get_to(c.d_spk);
    j.at("d_emo").get_to(c.d_emo);
    j.at("d_content").get_to(c.d_content);
    j.at("gin").get_to(c.gin);
    j.at("gen_initial").get_to(c.gen_initial);
    j.at("upsample").get_to(c.upsample);
    j.at("up_kernels").get_to(c.up_kernels);
    j.at("mrf_kernels").get_to(c.mrf_kernels);
    j.at("mrf_dilations").get_to(c.mrf_dilations);
    j.at("mpd_periods").get_to(c.mpd_periods);
    j.at("mpd_channels").get_to(c.mpd_channels);
    j.at("msd_channels").get_to(c.msd_channels);
    j.at("dropout").get_to(c.dropout);
    j.at("posterior_use_emotion").get_to(c.posterior_use_emotion);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("model config field: ") + e.what());
  }
  return c;
}

bool ModelConfig::operator==(const ModelConfig& o) const {
  return ToJson() == o.ToJson();
}

ModelConfig ModelConfig::Desk() {
  ModelConfig c;
  c.char_embed = 44;
  c.ffn = 192;
  c.d_z = 48;
  c.post_hidden = 48;
  c.flow_hidden = 48;
  c.sdp_filter = 48;
  c.d_spk = 64;
  c.d_emo = 32;
  c.gin = 64;
  c.gen_initial = 64;
  c.mpd_channels = {8, 16, 32, 32};
  c.msd_channels = {16, 16, 32, 64, 64};
  return c;
}

ModelConfig ModelConfig::Paper() { return ModelConfig(); }

}  // namespace xltts
