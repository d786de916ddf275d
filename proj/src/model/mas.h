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

#ifndef XLTTS_MODEL_MAS_H_
#define XLTTS_MODEL_MAS_H_

#include <vector>

#include "core/tensor.h"

namespace xltts {

// Monotonic alignment search: the most likely monotonic, surjective
// assignment of frames to tokens. Runs on plain values — the alignment is
// treated as a constant by every gradient path that consumes it.
struct Alignment {
  std::vector<int> durations;  // frames per token, each >= 1, sums to T
  double score = 0.0;          // total log-likelihood along the chosen path
};

// Per-(token, frame) diagonal-Gaussian log-likelihood table [L x T]:
// ll(l, t) = -0.5 * sum_d [ log(2*pi) + 2*log_sigma(d, l)
//                           + (frames(d, t) - mu(d, l))^2
//                             * exp(-2*log_sigma(d, l)) ].
// mu, log_sigma are [d x L]; frames is [d x T].
Mat GaussianFrameLogLik(const Mat& mu, const Mat& log_sigma,
                        const Mat& frames);

// Dynamic program over an [L x T] log-likelihood table. Ties prefer keeping
// the current token, so transitions land as late as possible and the
// frame-to-token map is lexicographically smallest among the argmax set.
// Throws kFewerFramesThanTokens when T < L.
Alignment MasFromLogLik(const Mat& ll);

// Convenience wrapper: table + search in one call.
Alignment MasAlign(const Mat& mu, const Mat& log_sigma, const Mat& frames);

// Durations to a frame-to-token index vector, e.g. {2, 1} -> {0, 0, 1}.
std::vector<int> ExpandIndices(const std::vector<int>& durations);

}  // namespace xltts

#endif  // XLTTS_MODEL_MAS_H_
