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

#ifndef XLTTS_NN_SPLINE_H_
#define XLTTS_NN_SPLINE_H_

#include "core/tensor.h"

namespace xltts {

// Monotonic piecewise rational-quadratic map on [-tail_bound, tail_bound],
// identity outside (linear tails with unit boundary derivatives). Bins are
// parameterized per element: for channel c the rows
// [c*(3*bins-1), (c+1)*(3*bins-1)) of `params` hold `bins` unnormalized
// widths, `bins` unnormalized heights, and `bins-1` unnormalized interior
// derivatives for every column.
struct SplineResult {
  Tensor y;           // same shape as x
  Tensor logdet_map;  // elementwise log |dy/dx| (zero outside the domain)
};

// Differentiable forward map; gradients flow into both x and params. Bin
// membership is treated as locally constant, which is exact almost
// everywhere.
SplineResult RationalQuadraticForward(const Tensor& x, const Tensor& params,
                                      int bins, double tail_bound);

// Exact inverse of the forward map, plain arithmetic (no graph).
Mat RationalQuadraticInverse(const Mat& y, const Mat& params, int bins,
                             double tail_bound);

}  // namespace xltts

#endif  // XLTTS_NN_SPLINE_H_
