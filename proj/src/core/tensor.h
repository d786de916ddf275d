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

#ifndef XLTTS_CORE_TENSOR_H_
#define XLTTS_CORE_TENSOR_H_

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "core/rng.h"

namespace xltts {

// All tensors are dense double matrices. Convention: rows index channels,
// columns index time (or flattened spatial positions for 2-D data).
using Mat = Eigen::MatrixXd;

struct TensorNode {
  Mat value;
  Mat grad;
  bool requires_grad = false;
  bool has_grad = false;
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode*)> backward;
};

// Reverse-mode automatic differentiation over a dynamically recorded DAG.
// A Tensor is a shared handle to a node; graphs are freed when the last
// handle to their root goes away.
class Tensor {
 public:
  Tensor() = default;

  static Tensor Constant(Mat value);
  static Tensor Scalar(double value);
  // Leaf with requires_grad set; the optimizer mutates value in place.
  static Tensor Parameter(Mat value);

  bool defined() const { return node_ != nullptr; }
  const Mat& value() const { return node_->value; }
  Mat& mutable_value() { return node_->value; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double item() const;

  // Gradient of the last Backward() call; zeros if none reached this node.
  Mat GradOrZero() const;
  void ZeroGrad();

  // Reverse pass from a scalar root.
  void Backward() const;

  std::shared_ptr<TensorNode> node() const { return node_; }
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<TensorNode> node_;
};

// ---- elementwise ----
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Div(const Tensor& a, const Tensor& b);
Tensor Neg(const Tensor& x);
Tensor AddScalar(const Tensor& x, double c);
Tensor MulScalar(const Tensor& x, double c);
Tensor Exp(const Tensor& x);
Tensor Log(const Tensor& x);
Tensor Sqrt(const Tensor& x);
Tensor Square(const Tensor& x);
Tensor Abs(const Tensor& x);
Tensor Tanh(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor LogSigmoid(const Tensor& x);
Tensor Relu(const Tensor& x);
Tensor LeakyRelu(const Tensor& x, double slope);
Tensor Gelu(const Tensor& x);
Tensor Softplus(const Tensor& x);
Tensor ClampMin(const Tensor& x, double lo);
Tensor Clamp(const Tensor& x, double lo, double hi);

// Broadcast a column vector [R x 1] across the columns of x [R x C].
Tensor AddColVec(const Tensor& x, const Tensor& v);
Tensor MulColVec(const Tensor& x, const Tensor& v);
// Multiply by a [1 x 1] tensor.
Tensor ScaleByScalar(const Tensor& x, const Tensor& s);

// ---- matrix products ----
Tensor MatMul(const Tensor& a, const Tensor& b);    // a * b
Tensor MatMulTA(const Tensor& a, const Tensor& b);  // a^T * b
Tensor MatMulTB(const Tensor& a, const Tensor& b);  // a * b^T

// ---- reductions ----
Tensor SumAll(const Tensor& x);
Tensor MeanAll(const Tensor& x);
Tensor SumCols(const Tensor& x);   // [R x C] -> [R x 1]
Tensor MeanCols(const Tensor& x);  // [R x C] -> [R x 1]
Tensor SumRows(const Tensor& x);   // [R x C] -> [1 x C]

// ---- shape ----
Tensor SliceRows(const Tensor& x, Eigen::Index start, Eigen::Index n);
Tensor SliceCols(const Tensor& x, Eigen::Index start, Eigen::Index n);
Tensor ConcatRows(const Tensor& a, const Tensor& b);
Tensor ConcatCols(const Tensor& a, const Tensor& b);
Tensor PadCols(const Tensor& x, Eigen::Index left, Eigen::Index right);
Tensor Reshape(const Tensor& x, Eigen::Index rows, Eigen::Index cols);
// Select columns by index (with repetition); covers embedding lookup and
// duration-regulated expansion.
Tensor GatherCols(const Tensor& x, const std::vector<int>& indices);
Tensor RepeatCols(const Tensor& x, const std::vector<int>& counts);
// Pick one row per column: out[0, j] = x(rows[j], j).
Tensor GatherRowPerCol(const Tensor& x, const std::vector<int>& rows);
// Running sum down each column: out(i, j) = sum_{k <= i} x(k, j).
Tensor CumsumRows(const Tensor& x);

// ---- structured ----
Tensor SoftmaxRows(const Tensor& x);  // each row sums to 1
Tensor SoftmaxCols(const Tensor& x);  // each column sums to 1
// Normalize each column over rows, then scale/shift by per-row gamma, beta.
Tensor LayerNormCols(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                     double eps = 1e-5);
Tensor Dropout(const Tensor& x, double p, Rng* rng);
Tensor Detach(const Tensor& x);

// ---- convolution (core/conv_ops.cc) ----
struct Conv1dSpec {
  int kernel = 1;
  int stride = 1;
  int dilation = 1;
  int pad_left = 0;
  int pad_right = 0;
  int groups = 1;
};
// x: [Cin x T]; w: [Cout x (Cin/groups * kernel)]; optional bias [Cout x 1].
Tensor Conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv1dSpec& spec);
Eigen::Index Conv1dOutLen(Eigen::Index t, const Conv1dSpec& spec);

struct Conv2dSpec {
  int in_h = 0, in_w = 0;
  int kh = 1, kw = 1;
  int sh = 1, sw = 1;
  int ph = 0, pw = 0;
};
// x: [Cin x (H*W)], element (c, h*W + w); w: [Cout x (Cin*kh*kw)].
Tensor Conv2d(const Tensor& x, const Tensor& w, const Tensor& b,
              const Conv2dSpec& spec);
int Conv2dOutH(const Conv2dSpec& spec);
int Conv2dOutW(const Conv2dSpec& spec);

Tensor AvgPool1d(const Tensor& x, int kernel, int stride, int pad);

}  // namespace xltts

#endif  // XLTTS_CORE_TENSOR_H_
