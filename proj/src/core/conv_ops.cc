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

// Convolutions lower to GEMM via im2col. The patch matrix is rebuilt inside
// the backward closure instead of being cached on the node: recomputing it is
// cheap next to the GEMMs and keeps the live graph small.

#include <string>
#include <vector>

#include "core/tensor.h"
#include "util/error.h"

namespace xltts {

namespace {

// Patch matrix for one channel group: row (c_in_group * kernel + tap),
// column = output position. Zero where a tap lands in the padding.
Mat Im2col1d(const Mat& x, int group, int group_channels,
             const Conv1dSpec& s, Eigen::Index out_len) {
  Mat col = Mat::Zero(static_cast<Eigen::Index>(group_channels) * s.kernel,
                      out_len);
  Eigen::Index t = x.cols();
  for (int c = 0; c < group_channels; ++c) {
    Eigen::Index xr = static_cast<Eigen::Index>(group) * group_channels + c;
    for (int tap = 0; tap < s.kernel; ++tap) {
      Eigen::Index row = static_cast<Eigen::Index>(c) * s.kernel + tap;
      for (Eigen::Index to = 0; to < out_len; ++to) {
        Eigen::Index ti = to * s.stride + static_cast<Eigen::Index>(tap) *
                          s.dilation - s.pad_left;
        if (ti >= 0 && ti < t) col(row, to) = x(xr, ti);
      }
    }
  }
  return col;
}

// Scatter-add of the patch-matrix gradient back onto the input.
void Col2im1d(const Mat& dcol, int group, int group_channels,
              const Conv1dSpec& s, Mat* dx) {
  Eigen::Index t = dx->cols();
  Eigen::Index out_len = dcol.cols();
  for (int c = 0; c < group_channels; ++c) {
    Eigen::Index xr = static_cast<Eigen::Index>(group) * group_channels + c;
    for (int tap = 0; tap < s.kernel; ++tap) {
      Eigen::Index row = static_cast<Eigen::Index>(c) * s.kernel + tap;
      for (Eigen::Index to = 0; to < out_len; ++to) {
        Eigen::Index ti = to * s.stride + static_cast<Eigen::Index>(tap) *
                          s.dilation - s.pad_left;
        if (ti >= 0 && ti < t) (*dx)(xr, ti) += dcol(row, to);
      }
    }
  }
}

Mat Im2col2d(const Mat& x, const Conv2dSpec& s, int out_h, int out_w) {
  Eigen::Index cin = x.rows();
  Mat col = Mat::Zero(cin * s.kh * s.kw,
                      static_cast<Eigen::Index>(out_h) * out_w);
  for (Eigen::Index c = 0; c < cin; ++c) {
    for (int kh = 0; kh < s.kh; ++kh) {
      for (int kw = 0; kw < s.kw; ++kw) {
        Eigen::Index row = (c * s.kh + kh) * s.kw + kw;
        for (int ho = 0; ho < out_h; ++ho) {
          int hi = ho * s.sh + kh - s.ph;
          if (hi < 0 || hi >= s.in_h) continue;
          for (int wo = 0; wo < out_w; ++wo) {
            int wi = wo * s.sw + kw - s.pw;
            if (wi < 0 || wi >= s.in_w) continue;
            col(row, static_cast<Eigen::Index>(ho) * out_w + wo) =
                x(c, static_cast<Eigen::Index>(hi) * s.in_w + wi);
          }
        }
      }
    }
  }
  return col;
}

void Col2im2d(const Mat& dcol, const Conv2dSpec& s, int out_h, int out_w,
              Mat* dx) {
  Eigen::Index cin = dx->rows();
  for (Eigen::Index c = 0; c < cin; ++c) {
    for (int kh = 0; kh < s.kh; ++kh) {
      for (int kw = 0; kw < s.kw; ++kw) {
        Eigen::Index row = (c * s.kh + kh) * s.kw + kw;
        for (int ho = 0; ho < out_h; ++ho) {
          int hi = ho * s.sh + kh - s.ph;
          if (hi < 0 || hi >= s.in_h) continue;
          for (int wo = 0; wo < out_w; ++wo) {
            int wi = wo * s.sw + kw - s.pw;
            if (wi < 0 || wi >= s.in_w) continue;
            (*dx)(c, static_cast<Eigen::Index>(hi) * s.in_w + wi) +=
                dcol(row, static_cast<Eigen::Index>(ho) * out_w + wo);
          }
        }
      }
    }
  }
}

}  // namespace

Eigen::Index Conv1dOutLen(Eigen::Index t, const Conv1dSpec& s) {
  Eigen::Index padded = t + s.pad_left + s.pad_right;
  Eigen::Index span = static_cast<Eigen::Index>(s.dilation) * (s.kernel - 1)
                      + 1;
  if (padded < span) return 0;
  return (padded - span) / s.stride + 1;
}

Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv1dSpec& spec) {
  if (spec.kernel < 1 || spec.stride < 1 || spec.dilation < 1 ||
      spec.groups < 1 || spec.pad_left < 0 || spec.pad_right < 0) {
    throw Error(ErrorCode::kInvalidArgument, "Conv1d spec");
  }
  Eigen::Index cin = x.rows();
  Eigen::Index cout = w.rows();
  if (cin % spec.groups != 0 || cout % spec.groups != 0) {
    throw Error(ErrorCode::kShapeMismatch, "Conv1d channels vs groups");
  }
  int gc = static_cast<int>(cin) / spec.groups;      // in channels per group
  Eigen::Index gco = cout / spec.groups;             // out channels per group
  if (w.cols() != static_cast<Eigen::Index>(gc) * spec.kernel) {
    throw Error(ErrorCode::kShapeMismatch, "Conv1d weight cols");
  }
  if (b.defined() && (b.rows() != cout || b.cols() != 1)) {
    throw Error(ErrorCode::kShapeMismatch, "Conv1d bias");
  }
  Eigen::Index out_len = Conv1dOutLen(x.cols(), spec);
  if (out_len < 1) {
    throw Error(ErrorCode::kShapeMismatch,
                "Conv1d output would be empty: input length " +
                    std::to_string(x.cols()));
  }

  Mat y(cout, out_len);
  for (int g = 0; g < spec.groups; ++g) {
    Mat col = Im2col1d(x.value(), g, gc, spec, out_len);
    y.middleRows(static_cast<Eigen::Index>(g) * gco, gco).noalias() =
        w.value().middleRows(static_cast<Eigen::Index>(g) * gco, gco) * col;
  }
  if (b.defined()) y.colwise() += Eigen::VectorXd(b.value().col(0));

  auto out = std::make_shared<TensorNode>();
  out->value = std::move(y);
  bool has_bias = b.defined();
  std::vector<std::shared_ptr<TensorNode>> parents = {x.node(), w.node()};
  if (has_bias) parents.push_back(b.node());
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  if (!any) return Tensor(std::move(out));

  out->requires_grad = true;
  out->parents = std::move(parents);
  int groups = spec.groups;
  out->backward = [spec, gc, gco, groups, has_bias](TensorNode* n) {
    TensorNode* xp = n->parents[0].get();
    TensorNode* wp = n->parents[1].get();
    const Mat& xv = xp->value;
    const Mat& wv = wp->value;
    Eigen::Index out_len = n->grad.cols();
    Mat dx;
    if (xp->requires_grad) dx = Mat::Zero(xv.rows(), xv.cols());
    Mat dw;
    if (wp->requires_grad) dw = Mat::Zero(wv.rows(), wv.cols());
    for (int g = 0; g < groups; ++g) {
      Eigen::Index r0 = static_cast<Eigen::Index>(g) * gco;
      if (wp->requires_grad) {
        Mat col = Im2col1d(xv, g, gc, spec, out_len);
        dw.middleRows(r0, gco).noalias() =
            n->grad.middleRows(r0, gco) * col.transpose();
      }
      if (xp->requires_grad) {
        Mat dcol;
        dcol.noalias() =
            wv.middleRows(r0, gco).transpose() * n->grad.middleRows(r0, gco);
        Col2im1d(dcol, g, gc, spec, &dx);
      }
    }
    if (xp->requires_grad) {
      if (!xp->has_grad) { xp->grad = std::move(dx); xp->has_grad = true; }
      else xp->grad += dx;
    }
    if (wp->requires_grad) {
      if (!wp->has_grad) { wp->grad = std::move(dw); wp->has_grad = true; }
      else wp->grad += dw;
    }
    if (has_bias) {
      TensorNode* bp = n->parents[2].get();
      if (bp->requires_grad) {
        Mat db = n->grad.rowwise().sum();
        if (!bp->has_grad) { bp->grad = std::move(db); bp->has_grad = true; }
        else bp->grad += db;
      }
    }
  };
  return Tensor(std::move(out));
}

int Conv2dOutH(const Conv2dSpec& s) {
  int padded = s.in_h + 2 * s.ph;
  if (padded < s.kh) return 0;
  return (padded - s.kh) / s.sh + 1;
}

int Conv2dOutW(const Conv2dSpec& s) {
  int padded = s.in_w + 2 * s.pw;
  if (padded < s.kw) return 0;
  return (padded - s.kw) / s.sw + 1;
}

Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv2dSpec& spec) {
  if (spec.kh < 1 || spec.kw < 1 || spec.sh < 1 || spec.sw < 1 ||
      spec.ph < 0 || spec.pw < 0 || spec.in_h < 1 || spec.in_w < 1) {
    throw Error(ErrorCode::kInvalidArgument, "Conv2d spec");
  }
  Eigen::Index cin = x.rows();
  if (x.cols() != static_cast<Eigen::Index>(spec.in_h) * spec.in_w) {
    throw Error(ErrorCode::kShapeMismatch, "Conv2d input area");
  }
  if (w.cols() != cin * spec.kh * spec.kw) {
    throw Error(ErrorCode::kShapeMismatch, "Conv2d weight cols");
  }
  if (b.defined() && (b.rows() != w.rows() || b.cols() != 1)) {
    throw Error(ErrorCode::kShapeMismatch, "Conv2d bias");
  }
  int out_h = Conv2dOutH(spec);
  int out_w = Conv2dOutW(spec);
  if (out_h < 1 || out_w < 1) {
    throw Error(ErrorCode::kShapeMismatch, "Conv2d output would be empty");
  }

  Mat col = Im2col2d(x.value(), spec, out_h, out_w);
  Mat y;
  y.noalias() = w.value() * col;
  col.resize(0, 0);
  if (b.defined()) y.colwise() += Eigen::VectorXd(b.value().col(0));

  auto out = std::make_shared<TensorNode>();
  out->value = std::move(y);
  bool has_bias = b.defined();
  std::vector<std::shared_ptr<TensorNode>> parents = {x.node(), w.node()};
  if (has_bias) parents.push_back(b.node());
  bool any = false;
  for (const auto& p : parents) any = any || p->requires_grad;
  if (!any) return Tensor(std::move(out));

  out->requires_grad = true;
  out->parents = std::move(parents);
  out->backward = [spec, out_h, out_w, has_bias](TensorNode* n) {
    TensorNode* xp = n->parents[0].get();
    TensorNode* wp = n->parents[1].get();
    if (wp->requires_grad) {
      Mat col = Im2col2d(xp->value, spec, out_h, out_w);
      Mat dw;
      dw.noalias() = n->grad * col.transpose();
      if (!wp->has_grad) { wp->grad = std::move(dw); wp->has_grad = true; }
      else wp->grad += dw;
    }
    if (xp->requires_grad) {
      Mat dcol;
      dcol.noalias() = wp->value.transpose() * n->grad;
      Mat dx = Mat::Zero(xp->value.rows(), xp->value.cols());
      Col2im2d(dcol, spec, out_h, out_w, &dx);
      if (!xp->has_grad) { xp->grad = std::move(dx); xp->has_grad = true; }
      else xp->grad += dx;
    }
    if (has_bias) {
      TensorNode* bp = n->parents[2].get();
      if (bp->requires_grad) {
        Mat db = n->grad.rowwise().sum();
        if (!bp->has_grad) { bp->grad = std::move(db); bp->has_grad = true; }
        else bp->grad += db;
      }
    }
  };
  return Tensor(std::move(out));
}

Tensor AvgPool1d(const Tensor& x, int kernel, int stride, int pad) {
  if (kernel < 1 || stride < 1 || pad < 0) {
    throw Error(ErrorCode::kInvalidArgument, "AvgPool1d spec");
  }
  Eigen::Index t = x.cols();
  Eigen::Index padded = t + 2 * static_cast<Eigen::Index>(pad);
  if (padded < kernel) {
    throw Error(ErrorCode::kShapeMismatch, "AvgPool1d output would be empty");
  }
  Eigen::Index out_len = (padded - kernel) / stride + 1;
  // Padding positions count toward the divisor (always 1/kernel).
  Mat y = Mat::Zero(x.rows(), out_len);
  for (Eigen::Index to = 0; to < out_len; ++to) {
    for (int tap = 0; tap < kernel; ++tap) {
      Eigen::Index ti = to * stride + tap - pad;
      if (ti >= 0 && ti < t) y.col(to) += x.value().col(ti);
    }
  }
  y /= static_cast<double>(kernel);

  auto out = std::make_shared<TensorNode>();
  out->value = std::move(y);
  if (!x.node()->requires_grad) return Tensor(std::move(out));
  out->requires_grad = true;
  out->parents = {x.node()};
  out->backward = [kernel, stride, pad](TensorNode* n) {
    TensorNode* xp = n->parents[0].get();
    Eigen::Index t = xp->value.cols();
    Mat dx = Mat::Zero(xp->value.rows(), t);
    double inv = 1.0 / kernel;
    for (Eigen::Index to = 0; to < n->grad.cols(); ++to) {
      for (int tap = 0; tap < kernel; ++tap) {
        Eigen::Index ti = to * stride + tap - pad;
        if (ti >= 0 && ti < t) dx.col(ti) += inv * n->grad.col(to);
      }
    }
    if (!xp->has_grad) { xp->grad = std::move(dx); xp->has_grad = true; }
    else xp->grad += dx;
  };
  return Tensor(std::move(out));
}

}  // namespace xltts
