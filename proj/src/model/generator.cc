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

#include "model/generator.h"

#include <string>

#include "util/error.h"

namespace xltts {

namespace {

constexpr double kSlope = 0.1;

// Interleaves u-1 zero columns after each input column: [C x T] -> [C x uT].
// Stacking zero rows under x and re-chunking the column-major buffer into
// C-row columns lands every x(:, t) at output column u*t.
Tensor ZeroStuff(const Tensor& x, int u) {
  if (u == 1) return x;
  const Eigen::Index c = x.rows();
  const Eigen::Index t = x.cols();
  Tensor zeros = Tensor::Constant(Mat::Zero((u - 1) * c, t));
  return Reshape(ConcatRows(x, zeros), c, u * t);
}

}  // namespace

Generator::Generator(ParamRegistry* reg, const ModelConfig& cfg, Rng* rng)
    : cfg_(cfg) {
  Conv1dSpec pre;
  pre.kernel = 7;
  pre.pad_left = 3;
  pre.pad_right = 3;
  conv_pre_ = Conv1dLayer(reg, "gen.pre", cfg.d_z, cfg.gen_initial, pre, true,
                          rng);
  cond_ = Linear(reg, "gen.cond", cfg.gin, cfg.gen_initial, true, rng);

  if (cfg.upsample.size() != cfg.up_kernels.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "upsample factors and kernels differ in count");
  }
  int channels = cfg.gen_initial;
  stages_.resize(cfg.upsample.size());
  for (size_t i = 0; i < cfg.upsample.size(); ++i) {
    const int u = cfg.upsample[i];
    const int k = cfg.up_kernels[i];
    if (k < u || (k - u) % 2 != 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "upsample kernel " + std::to_string(k) +
                      " incompatible with factor " + std::to_string(u));
    }
    Stage& st = stages_[i];
    st.factor = u;
    const int out_ch = channels / 2;
    const std::string sp = "gen.up" + std::to_string(i);
    // Transposed-conv equivalent: zero-stuff by u, then correlate with an
    // asymmetric pad that crops (k-u)/2 frames from each logical edge.
    const int crop = (k - u) / 2;
    Conv1dSpec up;
    up.kernel = k;
    up.pad_left = k - 1 - crop;
    up.pad_right = crop;
    st.up = Conv1dLayer(reg, sp, channels, out_ch, up, true, rng);

    st.branches.resize(cfg.mrf_kernels.size());
    for (size_t b = 0; b < cfg.mrf_kernels.size(); ++b) {
      const int mk = cfg.mrf_kernels[b];
      st.branches[b].resize(cfg.mrf_dilations.size());
      for (size_t d = 0; d < cfg.mrf_dilations.size(); ++d) {
        const int dil = cfg.mrf_dilations[d];
        const std::string rp = sp + ".mrf" + std::to_string(b) + "." +
                               std::to_string(d);
        Conv1dSpec ds;
        ds.kernel = mk;
        ds.dilation = dil;
        ds.pad_left = SamePad(mk, dil);
        ds.pad_right = SamePad(mk, dil);
        st.branches[b][d].dilated =
            Conv1dLayer(reg, rp + ".a", out_ch, out_ch, ds, true, rng);
        Conv1dSpec ps;
        ps.kernel = mk;
        ps.pad_left = SamePad(mk, 1);
        ps.pad_right = SamePad(mk, 1);
        st.branches[b][d].plain =
            Conv1dLayer(reg, rp + ".b", out_ch, out_ch, ps, true, rng);
      }
    }
    channels = out_ch;
  }

  Conv1dSpec post;
  post.kernel = 7;
  post.pad_left = 3;
  post.pad_right = 3;
  conv_post_ = Conv1dLayer(reg, "gen.post", channels, 1, post, true, rng);
}

Tensor Generator::Forward(const Tensor& z, const Tensor& g) const {
  if (!z.defined() || z.rows() != cfg_.d_z) {
    throw Error(ErrorCode::kDimensionMismatch,
                "generator input must have " + std::to_string(cfg_.d_z) +
                    " rows");
  }
  if (!g.defined() || g.rows() != cfg_.gin || g.cols() != 1) {
    throw Error(ErrorCode::kDimensionMismatch, "style vector must be [gin x 1]");
  }
  Tensor x = AddColVec(conv_pre_.Forward(z), cond_.Forward(g));
  for (const Stage& st : stages_) {
    x = LeakyRelu(x, kSlope);
    x = st.up.Forward(ZeroStuff(x, st.factor));
    Tensor fused;
    for (const auto& branch : st.branches) {
      Tensor h = x;
      for (const ResUnit& unit : branch) {
        Tensor t = unit.dilated.Forward(LeakyRelu(h, kSlope));
        t = unit.plain.Forward(LeakyRelu(t, kSlope));
        h = Add(h, t);
      }
      fused = fused.defined() ? Add(fused, h) : h;
    }
    x = MulScalar(fused, 1.0 / static_cast<double>(st.branches.size()));
  }
  x = LeakyRelu(x, kSlope);
  return Tanh(conv_post_.Forward(x));
}

}  // namespace xltts
