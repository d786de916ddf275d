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

// Gradient correctness for every differentiable op, checked against central
// finite differences; convolution values checked against a naive direct
// implementation; reproducibility of the random source.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "core/rng.h"
#include "core/tensor.h"
#include "util/error.h"

namespace xltts {
namespace {

Mat RandMat(Rng* rng, int r, int c, double scale = 1.0, double shift = 0.0) {
  Mat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      m(i, j) = rng->Normal() * scale + shift;
    }
  }
  return m;
}

using Builder = std::function<Tensor(const std::vector<Tensor>&)>;

// Compares reverse-mode gradients of a scalar-valued builder against central
// differences at every coordinate of every input.
void CheckGrad(const Builder& f, const std::vector<Mat>& inputs,
               double tol = 1e-6) {
  std::vector<Tensor> params;
  params.reserve(inputs.size());
  for (const auto& m : inputs) params.push_back(Tensor::Parameter(m));
  Tensor loss = f(params);
  REQUIRE(loss.rows() == 1);
  REQUIRE(loss.cols() == 1);
  loss.Backward();
  std::vector<Mat> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p.GradOrZero());

  const double eps = 1e-5;
  for (size_t k = 0; k < inputs.size(); ++k) {
    for (Eigen::Index j = 0; j < inputs[k].cols(); ++j) {
      for (Eigen::Index i = 0; i < inputs[k].rows(); ++i) {
        auto eval = [&](double delta) {
          std::vector<Tensor> xs;
          for (size_t m = 0; m < inputs.size(); ++m) {
            Mat v = inputs[m];
            if (m == k) v(i, j) += delta;
            xs.push_back(Tensor::Constant(std::move(v)));
          }
          return f(xs).item();
        };
        double num = (eval(eps) - eval(-eps)) / (2.0 * eps);
        double ana = analytic[k](i, j);
        double denom = 1.0 + std::max(std::abs(num), std::abs(ana));
        CHECK_MESSAGE(std::abs(num - ana) <= tol * denom,
                      "input " << k << " entry (" << i << "," << j
                               << "): analytic " << ana << " numeric " << num);
      }
    }
  }
}

// Fixed random projection turns a matrix-valued op into a scalar with
// non-uniform output gradients.
Tensor Project(const Tensor& y, const Mat& p) {
  return SumAll(Mul(y, Tensor::Constant(p)));
}

TEST_CASE("elementwise gradients match finite differences") {
  Rng rng(7);
  Mat a = RandMat(&rng, 3, 4);
  Mat b = RandMat(&rng, 3, 4);
  Mat p = RandMat(&rng, 3, 4);
  Mat positive = RandMat(&rng, 3, 4, 0.3, 2.0);  // bounded away from zero

  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Add(x[0], x[1]), p);
  }, {a, b});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Sub(x[0], x[1]), p);
  }, {a, b});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Mul(x[0], x[1]), p);
  }, {a, b});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Div(x[0], x[1]), p);
  }, {a, positive});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Neg(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(AddScalar(x[0], 1.7), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(MulScalar(x[0], -2.3), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Exp(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Log(x[0]), p);
  }, {positive});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Sqrt(x[0]), p);
  }, {positive});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Square(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Tanh(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Sigmoid(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(LogSigmoid(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Gelu(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Softplus(x[0]), p);
  }, {a});
}

TEST_CASE("piecewise ops differentiate away from their kinks") {
  Rng rng(11);
  // Magnitudes in [0.5, 1.5]: eps-perturbations cannot cross 0 or the clamp
  // bounds at +/-2.
  Mat a(3, 4);
  for (Eigen::Index j = 0; j < 4; ++j) {
    for (Eigen::Index i = 0; i < 3; ++i) {
      double mag = 0.5 + rng.Uniform();
      a(i, j) = rng.Uniform() < 0.5 ? -mag : mag;
    }
  }
  Mat p = RandMat(&rng, 3, 4);
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Abs(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Relu(x[0]), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(LeakyRelu(x[0], 0.1), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(ClampMin(x[0], 0.0), p);
  }, {a});
  CheckGrad([&](const std::vector<Tensor>& x) {
    return Project(Clamp(x[0], -2.0, 2.0), p);
  }, {a});
}

TEST_CASE("broadcast and scalar-scale gradients") {
  Rng rng(13);
  Mat x = RandMat(&rng, 4, 5);
  Mat v = RandMat(&rng, 4, 1);
  Mat s = RandMat(&rng, 1, 1);
  Mat p = RandMat(&rng, 4, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(AddColVec(in[0], in[1]), p);
  }, {x, v});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(MulColVec(in[0], in[1]), p);
  }, {x, v});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(ScaleByScalar(in[0], in[1]), p);
  }, {x, s});
}

TEST_CASE("matrix product gradients") {
  Rng rng(17);
  Mat a = RandMat(&rng, 3, 4);
  Mat b = RandMat(&rng, 4, 5);
  Mat p = RandMat(&rng, 3, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(MatMul(in[0], in[1]), p);
  }, {a, b});

  Mat a2 = RandMat(&rng, 4, 3);
  Mat p2 = RandMat(&rng, 3, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(MatMulTA(in[0], in[1]), p2);
  }, {a2, b});

  Mat b2 = RandMat(&rng, 5, 4);
  Mat p3 = RandMat(&rng, 3, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(MatMulTB(in[0], in[1]), p3);
  }, {a, b2});
}

TEST_CASE("reduction gradients") {
  Rng rng(19);
  Mat x = RandMat(&rng, 3, 5);
  Mat pc = RandMat(&rng, 3, 1);
  Mat pr = RandMat(&rng, 1, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return SumAll(in[0]);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return MeanAll(in[0]);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SumCols(in[0]), pc);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(MeanCols(in[0]), pc);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SumRows(in[0]), pr);
  }, {x});
}

TEST_CASE("shape op gradients and values") {
  Rng rng(23);
  Mat x = RandMat(&rng, 4, 6);
  Mat y = RandMat(&rng, 2, 6);
  Mat p_slice_r = RandMat(&rng, 2, 6);
  Mat p_slice_c = RandMat(&rng, 4, 3);
  Mat p_cat_r = RandMat(&rng, 6, 6);
  Mat p_cat_c = RandMat(&rng, 4, 12);
  Mat p_pad = RandMat(&rng, 4, 9);
  Mat p_reshape = RandMat(&rng, 8, 3);
  Mat p_gather = RandMat(&rng, 4, 4);
  Mat p_repeat = RandMat(&rng, 4, 7);
  Mat p_rowpick = RandMat(&rng, 1, 6);
  Mat p_cumsum = RandMat(&rng, 4, 6);

  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SliceRows(in[0], 1, 2), p_slice_r);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SliceCols(in[0], 2, 3), p_slice_c);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(ConcatRows(in[0], in[1]), p_cat_r);
  }, {x, y});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(ConcatCols(in[0], in[1]), p_cat_c);
  }, {x, x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(PadCols(in[0], 2, 1), p_pad);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(Reshape(in[0], 8, 3), p_reshape);
  }, {x});

  std::vector<int> idx = {5, 0, 0, 3};
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(GatherCols(in[0], idx), p_gather);
  }, {x});
  std::vector<int> counts = {2, 0, 1, 3, 0, 1};
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(RepeatCols(in[0], counts), p_repeat);
  }, {x});
  std::vector<int> rows = {3, 1, 0, 2, 1, 3};
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(GatherRowPerCol(in[0], rows), p_rowpick);
  }, {x});
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(CumsumRows(in[0]), p_cumsum);
  }, {x});

  // Value semantics pinned by hand.
  Mat m(2, 3);
  m << 1, 2, 3,
       4, 5, 6;
  Tensor t = Tensor::Constant(m);
  Mat r = Reshape(t, 3, 2).value();  // column-major: (1,4,2),(5,3,6)
  CHECK(r(0, 0) == 1);
  CHECK(r(1, 0) == 4);
  CHECK(r(2, 0) == 2);
  CHECK(r(0, 1) == 5);
  CHECK(r(1, 1) == 3);
  CHECK(r(2, 1) == 6);

  Mat cs = CumsumRows(t).value();
  CHECK(cs(0, 0) == 1);
  CHECK(cs(1, 0) == 5);
  CHECK(cs(1, 2) == 9);

  Mat g = GatherRowPerCol(t, {1, 0, 1}).value();
  CHECK(g(0, 0) == 4);
  CHECK(g(0, 1) == 2);
  CHECK(g(0, 2) == 6);

  Mat rep = RepeatCols(t, {2, 1, 0}).value();
  CHECK(rep.cols() == 3);
  CHECK(rep(0, 0) == 1);
  CHECK(rep(0, 1) == 1);
  CHECK(rep(0, 2) == 2);
}

TEST_CASE("softmax and layernorm") {
  Rng rng(29);
  Mat x = RandMat(&rng, 4, 5, 2.0);
  Mat p = RandMat(&rng, 4, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SoftmaxRows(in[0]), p);
  }, {x}, 1e-5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(SoftmaxCols(in[0]), p);
  }, {x}, 1e-5);

  Mat sm = SoftmaxCols(Tensor::Constant(x)).value();
  for (Eigen::Index j = 0; j < sm.cols(); ++j) {
    CHECK(sm.col(j).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sm.col(j).minCoeff() > 0.0);
  }
  Mat smr = SoftmaxRows(Tensor::Constant(x)).value();
  for (Eigen::Index i = 0; i < smr.rows(); ++i) {
    CHECK(smr.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }

  Mat gamma = RandMat(&rng, 4, 1, 0.3, 1.0);
  Mat beta = RandMat(&rng, 4, 1, 0.3);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(LayerNormCols(in[0], in[1], in[2]), p);
  }, {x, gamma, beta}, 1e-5);

  // Unit gamma, zero beta: every column is standardized.
  Tensor ones = Tensor::Constant(Mat::Ones(4, 1));
  Tensor zeros = Tensor::Constant(Mat::Zero(4, 1));
  Mat ln = LayerNormCols(Tensor::Constant(x), ones, zeros).value();
  for (Eigen::Index j = 0; j < ln.cols(); ++j) {
    CHECK(ln.col(j).mean() == doctest::Approx(0.0).epsilon(1e-9));
    double var = (ln.col(j).array() - ln.col(j).mean()).square().mean();
    CHECK(var == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("graph reuse accumulates and Detach blocks") {
  Mat v(1, 1);
  v(0, 0) = 3.0;
  Tensor x = Tensor::Parameter(v);
  // y = x*x + x used twice -> dy/dx = 2x + 1 = 7.
  Tensor y = Add(Mul(x, x), x);
  y.Backward();
  CHECK(x.GradOrZero()(0, 0) == doctest::Approx(7.0));

  x.ZeroGrad();
  Tensor z = Mul(Detach(x), x);  // d/dx = detached value = 3
  z.Backward();
  CHECK(x.GradOrZero()(0, 0) == doctest::Approx(3.0));

  // Constant-only graphs record nothing.
  Tensor c = Mul(Tensor::Scalar(2.0), Tensor::Scalar(4.0));
  CHECK(!c.requires_grad());
  CHECK(c.item() == doctest::Approx(8.0));
}

TEST_CASE("dropout scales kept entries and zeroes the rest") {
  Rng rng(31);
  Mat x = Mat::Ones(8, 8);
  Tensor t = Tensor::Parameter(x);
  Tensor d = Dropout(t, 0.25, &rng);
  int kept = 0;
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 8; ++i) {
      double v = d.value()(i, j);
      if (v != 0.0) {
        CHECK(v == doctest::Approx(1.0 / 0.75));
        ++kept;
      }
    }
  }
  CHECK(kept > 30);  // p=0.25 on 64 entries
  CHECK(kept < 64);
  SumAll(d).Backward();
  // Gradient is the same mask.
  for (Eigen::Index j = 0; j < 8; ++j) {
    for (Eigen::Index i = 0; i < 8; ++i) {
      double g = t.GradOrZero()(i, j);
      double v = d.value()(i, j);
      CHECK(g == doctest::Approx(v));
    }
  }
  // p = 0 is the identity.
  Tensor same = Dropout(t, 0.0, &rng);
  CHECK(same.node().get() == t.node().get());
}

// ---------------------------------------------------------------------------
// convolution oracles
// ---------------------------------------------------------------------------

Mat NaiveConv1d(const Mat& x, const Mat& w, const Mat* b,
                const Conv1dSpec& s) {
  Eigen::Index to_len = Conv1dOutLen(x.cols(), s);
  int gc = static_cast<int>(x.rows()) / s.groups;
  Eigen::Index gco = w.rows() / s.groups;
  Mat y = Mat::Zero(w.rows(), to_len);
  for (Eigen::Index o = 0; o < w.rows(); ++o) {
    int g = static_cast<int>(o / gco);
    for (Eigen::Index to = 0; to < to_len; ++to) {
      double acc = b ? (*b)(o, 0) : 0.0;
      for (int c = 0; c < gc; ++c) {
        for (int tap = 0; tap < s.kernel; ++tap) {
          Eigen::Index ti = to * s.stride +
                            static_cast<Eigen::Index>(tap) * s.dilation -
                            s.pad_left;
          if (ti >= 0 && ti < x.cols()) {
            acc += w(o, static_cast<Eigen::Index>(c) * s.kernel + tap) *
                   x(static_cast<Eigen::Index>(g) * gc + c, ti);
          }
        }
      }
      y(o, to) = acc;
    }
  }
  return y;
}

TEST_CASE("conv1d matches a naive direct convolution") {
  Rng rng(37);
  struct Case {
    int cin, cout, t;
    Conv1dSpec s;
  };
  std::vector<Case> cases = {
      {1, 1, 8, {3, 1, 1, 1, 1, 1}},
      {3, 5, 12, {5, 1, 1, 2, 2, 1}},
      {4, 6, 16, {3, 2, 1, 1, 1, 2}},
      {2, 2, 20, {3, 1, 3, 3, 3, 1}},
      {6, 3, 9, {1, 1, 1, 0, 0, 3}},
      {4, 8, 15, {4, 3, 2, 5, 2, 2}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.s.kernel);
    CAPTURE(c.s.stride);
    CAPTURE(c.s.groups);
    Mat x = RandMat(&rng, c.cin, c.t);
    Mat w = RandMat(&rng, c.cout, (c.cin / c.s.groups) * c.s.kernel);
    Mat b = RandMat(&rng, c.cout, 1);
    Mat got = Conv1d(Tensor::Constant(x), Tensor::Constant(w),
                     Tensor::Constant(b), c.s).value();
    Mat want = NaiveConv1d(x, w, &b, c.s);
    REQUIRE(got.rows() == want.rows());
    REQUIRE(got.cols() == want.cols());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);

    // No-bias path.
    Mat got2 = Conv1d(Tensor::Constant(x), Tensor::Constant(w), Tensor(),
                      c.s).value();
    Mat want2 = NaiveConv1d(x, w, nullptr, c.s);
    CHECK((got2 - want2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conv1d gradients match finite differences") {
  Rng rng(41);
  Conv1dSpec s{3, 2, 2, 2, 1, 2};
  Mat x = RandMat(&rng, 4, 10);
  Mat w = RandMat(&rng, 6, (4 / 2) * 3);
  Mat b = RandMat(&rng, 6, 1);
  Eigen::Index to_len = Conv1dOutLen(10, s);
  Mat p = RandMat(&rng, 6, to_len);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(Conv1d(in[0], in[1], in[2], s), p);
  }, {x, w, b}, 1e-5);
}

TEST_CASE("conv1d output length and failure modes") {
  Conv1dSpec s{5, 2, 1, 0, 0, 1};
  CHECK(Conv1dOutLen(5, s) == 1);
  CHECK(Conv1dOutLen(6, s) == 1);
  CHECK(Conv1dOutLen(7, s) == 2);
  CHECK(Conv1dOutLen(4, s) == 0);
  Conv1dSpec d{3, 1, 4, 0, 0, 1};  // receptive span 9
  CHECK(Conv1dOutLen(8, d) == 0);
  CHECK(Conv1dOutLen(9, d) == 1);

  Mat x = Mat::Ones(2, 4);
  Mat w = Mat::Ones(2, 2 * 5);
  CHECK_THROWS_AS(
      Conv1d(Tensor::Constant(x), Tensor::Constant(w), Tensor(),
             Conv1dSpec{5, 1, 1, 0, 0, 1}),
      Error);
  // Channel count not divisible by groups.
  Mat w2 = Mat::Ones(2, 3);
  CHECK_THROWS_AS(
      Conv1d(Tensor::Constant(Mat::Ones(3, 8)), Tensor::Constant(w2), Tensor(),
             Conv1dSpec{3, 1, 1, 1, 1, 2}),
      Error);
}

Mat NaiveConv2d(const Mat& x, const Mat& w, const Mat* b,
                const Conv2dSpec& s) {
  int oh = Conv2dOutH(s), ow = Conv2dOutW(s);
  Eigen::Index cin = x.rows();
  Mat y = Mat::Zero(w.rows(), static_cast<Eigen::Index>(oh) * ow);
  for (Eigen::Index o = 0; o < w.rows(); ++o) {
    for (int ho = 0; ho < oh; ++ho) {
      for (int wo = 0; wo < ow; ++wo) {
        double acc = b ? (*b)(o, 0) : 0.0;
        for (Eigen::Index c = 0; c < cin; ++c) {
          for (int kh = 0; kh < s.kh; ++kh) {
            for (int kw = 0; kw < s.kw; ++kw) {
              int hi = ho * s.sh + kh - s.ph;
              int wi = wo * s.sw + kw - s.pw;
              if (hi < 0 || hi >= s.in_h || wi < 0 || wi >= s.in_w) continue;
              acc += w(o, (c * s.kh + kh) * s.kw + kw) *
                     x(c, static_cast<Eigen::Index>(hi) * s.in_w + wi);
            }
          }
        }
        y(o, static_cast<Eigen::Index>(ho) * ow + wo) = acc;
      }
    }
  }
  return y;
}

TEST_CASE("conv2d matches a naive direct convolution") {
  Rng rng(43);
  std::vector<Conv2dSpec> specs = {
      {5, 6, 3, 3, 1, 1, 1, 1},
      {8, 7, 5, 1, 3, 1, 2, 0},
      {6, 6, 2, 2, 2, 2, 0, 0},
  };
  for (const auto& s : specs) {
    CAPTURE(s.kh);
    CAPTURE(s.sh);
    Mat x = RandMat(&rng, 3, s.in_h * s.in_w);
    Mat w = RandMat(&rng, 4, 3 * s.kh * s.kw);
    Mat b = RandMat(&rng, 4, 1);
    Mat got = Conv2d(Tensor::Constant(x), Tensor::Constant(w),
                     Tensor::Constant(b), s).value();
    Mat want = NaiveConv2d(x, w, &b, s);
    REQUIRE(got.rows() == want.rows());
    REQUIRE(got.cols() == want.cols());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conv2d gradients match finite differences") {
  Rng rng(47);
  Conv2dSpec s{5, 4, 3, 3, 2, 1, 1, 1};
  Mat x = RandMat(&rng, 2, s.in_h * s.in_w);
  Mat w = RandMat(&rng, 3, 2 * s.kh * s.kw);
  Mat b = RandMat(&rng, 3, 1);
  Mat p = RandMat(&rng, 3, Conv2dOutH(s) * Conv2dOutW(s));
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(Conv2d(in[0], in[1], in[2], s), p);
  }, {x, w, b}, 1e-5);
}

TEST_CASE("avgpool1d value and gradient") {
  Rng rng(53);
  Mat x = RandMat(&rng, 2, 9);
  Mat y = AvgPool1d(Tensor::Constant(x), 4, 2, 2).value();
  // Padded length 13, windows of 4 at stride 2 -> 5 outputs.
  REQUIRE(y.cols() == 5);
  // First window covers pad,pad,x0,x1; divisor is the full kernel.
  CHECK(y(0, 0) == doctest::Approx((x(0, 0) + x(0, 1)) / 4.0));
  CHECK(y(1, 2) ==
        doctest::Approx((x(1, 2) + x(1, 3) + x(1, 4) + x(1, 5)) / 4.0));

  Mat p = RandMat(&rng, 2, 5);
  CheckGrad([&](const std::vector<Tensor>& in) {
    return Project(AvgPool1d(in[0], 4, 2, 2), p);
  }, {x});
}

// ---------------------------------------------------------------------------
// random source
// ---------------------------------------------------------------------------

TEST_CASE("rng streams are reproducible and serializable") {
  Rng a(123), b(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.Uniform() == b.Uniform());
    CHECK(a.Normal() == b.Normal());
  }
  CHECK(a == b);

  // Serialize mid-stream, with a cached Box-Muller half pending.
  a.Normal();
  std::string state = a.StateString();
  std::vector<double> want;
  for (int i = 0; i < 10; ++i) want.push_back(a.Normal());
  Rng c(0);
  c.SetStateString(state);
  for (int i = 0; i < 10; ++i) CHECK(c.Normal() == want[i]);

  CHECK_THROWS_AS(c.SetStateString("not a state"), Error);

  Rng d(123);
  Rng forked = d.Fork();
  CHECK(!(forked == d));
  double u1 = forked.Uniform();
  Rng d2(123);
  Rng forked2 = d2.Fork();
  CHECK(forked2.Uniform() == u1);
}

TEST_CASE("rng uniform int is in range and covers values") {
  Rng rng(99);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    uint64_t v = rng.UniformInt(7);
    REQUIRE(v < 7);
    hits[v]++;
  }
  for (int k = 0; k < 7; ++k) CHECK(hits[k] > 800);

  double lo = 1e9, hi = -1e9;
  for (int i = 0; i < 1000; ++i) {
    double u = rng.Uniform(-2.0, 3.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    REQUIRE(u >= -2.0);
    REQUIRE(u < 3.0);
  }
  CHECK(lo < -1.5);
  CHECK(hi > 2.5);
}

TEST_CASE("error carries its code and a prefixed message") {
  Error e(ErrorCode::kShapeMismatch, "details");
  CHECK(e.code() == ErrorCode::kShapeMismatch);
  CHECK(std::string(e.what()) == "ShapeMismatch: details");
}

}  // namespace
}  // namespace xltts
