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

#include "nn/spline.h"

#include <cmath>
#include <vector>

#include "util/error.h"

namespace xltts {
namespace {

constexpr double kMinBinWidth = 1e-3;
constexpr double kMinBinHeight = 1e-3;
constexpr double kMinDerivative = 1e-3;

void CheckShapes(Eigen::Index xr, Eigen::Index xc, Eigen::Index pr,
                 Eigen::Index pc, int bins) {
  if (bins < 2) {
    throw Error(ErrorCode::kInvalidArgument, "spline needs >= 2 bins");
  }
  if (pr != xr * (3 * bins - 1) || pc != xc) {
    throw Error(ErrorCode::kShapeMismatch, "spline parameter block");
  }
}

// Largest k in [0, bins-1] with cum(k) <= v, for cum of size bins+1.
int FindBin(const Eigen::VectorXd& cum, double v) {
  int lo = 0;
  int hi = static_cast<int>(cum.size()) - 2;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (cum(mid) <= v) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

}  // namespace

SplineResult RationalQuadraticForward(const Tensor& x, const Tensor& params,
                                      int bins, double tail_bound) {
  CheckShapes(x.rows(), x.cols(), params.rows(), params.cols(), bins);
  const Eigen::Index h = x.rows();
  const Eigen::Index t_len = x.cols();
  const int block = 3 * bins - 1;
  const double b = tail_bound;

  Tensor ones_row = Tensor::Constant(Mat::Ones(1, t_len));
  Tensor zeros_row = Tensor::Constant(Mat::Zero(1, t_len));

  Tensor y_all, ld_all;
  for (Eigen::Index c = 0; c < h; ++c) {
    Tensor xc = SliceRows(x, c, 1);
    Tensor pc = SliceRows(params, c * block, block);
    Tensor wu = SliceRows(pc, 0, bins);
    Tensor hu = SliceRows(pc, bins, bins);
    Tensor du = SliceRows(pc, 2 * bins, bins - 1);

    // Normalized bins on [-b, b] with floors so no bin collapses.
    Tensor widths = AddScalar(
        MulScalar(SoftmaxCols(wu), 1.0 - bins * kMinBinWidth), kMinBinWidth);
    Tensor heights = AddScalar(
        MulScalar(SoftmaxCols(hu), 1.0 - bins * kMinBinHeight),
        kMinBinHeight);
    Tensor bin_w = MulScalar(widths, 2.0 * b);
    Tensor bin_h = MulScalar(heights, 2.0 * b);
    Tensor cum_w = AddScalar(
        MulScalar(ConcatRows(zeros_row, CumsumRows(widths)), 2.0 * b), -b);
    Tensor cum_h = AddScalar(
        MulScalar(ConcatRows(zeros_row, CumsumRows(heights)), 2.0 * b), -b);
    Tensor derivs = ConcatRows(
        ones_row,
        ConcatRows(AddScalar(Softplus(du), kMinDerivative), ones_row));

    // Bin membership and the in-domain mask come from values only; the
    // index is locally constant so this is gradient-exact a.e.
    std::vector<int> idx(t_len), idx1(t_len);
    Mat mask(1, t_len);
    const Mat& cwv = cum_w.value();
    for (Eigen::Index j = 0; j < t_len; ++j) {
      double v = xc.value()(0, j);
      bool inside = v >= -b && v <= b;
      mask(0, j) = inside ? 1.0 : 0.0;
      int k = inside ? FindBin(cwv.col(j), v) : 0;
      idx[j] = k;
      idx1[j] = k + 1;
    }

    Tensor cwk = GatherRowPerCol(cum_w, idx);
    Tensor chk = GatherRowPerCol(cum_h, idx);
    Tensor wk = GatherRowPerCol(bin_w, idx);
    Tensor hk = GatherRowPerCol(bin_h, idx);
    Tensor dk = GatherRowPerCol(derivs, idx);
    Tensor dk1 = GatherRowPerCol(derivs, idx1);

    // Out-of-domain columns run the same arithmetic on clamped inputs (kept
    // finite) and are masked out at the end.
    Tensor xi = Clamp(Div(Sub(Clamp(xc, -b, b), cwk), wk), 0.0, 1.0);
    Tensor one_m = AddScalar(Neg(xi), 1.0);
    Tensor xi1m = Mul(xi, one_m);
    Tensor sk = Div(hk, wk);
    Tensor excess = Sub(Add(dk1, dk), MulScalar(sk, 2.0));
    Tensor den = Add(sk, Mul(excess, xi1m));
    Tensor num = Mul(hk, Add(Mul(sk, Square(xi)), Mul(dk, xi1m)));
    Tensor y_in = Add(chk, Div(num, den));
    Tensor det_num =
        Mul(Square(sk), Add(Add(Mul(dk1, Square(xi)),
                                MulScalar(Mul(sk, xi1m), 2.0)),
                            Mul(dk, Square(one_m))));
    Tensor ld_in = Sub(Log(det_num), MulScalar(Log(den), 2.0));

    Tensor m = Tensor::Constant(mask);
    Tensor not_m = Tensor::Constant(Mat::Ones(1, t_len) - mask);
    Tensor yc = Add(Mul(m, y_in), Mul(not_m, xc));
    Tensor ldc = Mul(m, ld_in);
    y_all = c == 0 ? yc : ConcatRows(y_all, yc);
    ld_all = c == 0 ? ldc : ConcatRows(ld_all, ldc);
  }
  return SplineResult{y_all, ld_all};
}

Mat RationalQuadraticInverse(const Mat& y, const Mat& params, int bins,
                             double tail_bound) {
  CheckShapes(y.rows(), y.cols(), params.rows(), params.cols(), bins);
  const Eigen::Index h = y.rows();
  const Eigen::Index t_len = y.cols();
  const int block = 3 * bins - 1;
  const double b = tail_bound;

  Mat x(h, t_len);
  Eigen::VectorXd widths(bins), heights(bins), derivs(bins + 1);
  Eigen::VectorXd cum_w(bins + 1), cum_h(bins + 1);
  for (Eigen::Index c = 0; c < h; ++c) {
    for (Eigen::Index j = 0; j < t_len; ++j) {
      double v = y(c, j);
      if (v < -b || v > b) {
        x(c, j) = v;
        continue;
      }
      auto pc = params.block(c * block, j, block, 1);
      auto fill_softmax = [&](int offset, double floor,
                              Eigen::VectorXd* out) {
        double mx = pc(offset, 0);
        for (int k = 1; k < bins; ++k) mx = std::max(mx, pc(offset + k, 0));
        double sum = 0.0;
        for (int k = 0; k < bins; ++k) {
          (*out)(k) = std::exp(pc(offset + k, 0) - mx);
          sum += (*out)(k);
        }
        for (int k = 0; k < bins; ++k) {
          (*out)(k) = floor + (1.0 - bins * floor) * (*out)(k) / sum;
        }
      };
      fill_softmax(0, kMinBinWidth, &widths);
      fill_softmax(bins, kMinBinHeight, &heights);
      derivs(0) = 1.0;
      derivs(bins) = 1.0;
      for (int k = 0; k < bins - 1; ++k) {
        double u = pc(2 * bins + k, 0);
        // softplus, overflow-safe
        double sp = u > 30.0 ? u : std::log1p(std::exp(u));
        derivs(k + 1) = kMinDerivative + sp;
      }
      cum_w(0) = 0.0;
      cum_h(0) = 0.0;
      for (int k = 0; k < bins; ++k) {
        cum_w(k + 1) = cum_w(k) + widths(k);
        cum_h(k + 1) = cum_h(k) + heights(k);
      }
      for (int k = 0; k <= bins; ++k) {
        cum_w(k) = 2.0 * b * cum_w(k) - b;
        cum_h(k) = 2.0 * b * cum_h(k) - b;
      }

      int k = FindBin(cum_h, v);
      double wk = 2.0 * b * widths(k);
      double hk = 2.0 * b * heights(k);
      double sk = hk / wk;
      double d0 = derivs(k);
      double d1 = derivs(k + 1);
      double excess = d1 + d0 - 2.0 * sk;
      double dy = v - cum_h(k);
      double qa = hk * (sk - d0) + dy * excess;
      double qb = hk * d0 - dy * excess;
      double qc = -sk * dy;
      double disc = qb * qb - 4.0 * qa * qc;
      double xi = 2.0 * qc / (-qb - std::sqrt(std::max(0.0, disc)));
      x(c, j) = xi * wk + cum_w(k);
    }
  }
  return x;
}

}  // namespace xltts
