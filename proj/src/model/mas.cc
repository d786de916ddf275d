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

#include "model/mas.h"

#include <cmath>
#include <limits>
#include <string>

#include "util/error.h"

namespace xltts {

Mat GaussianFrameLogLik(const Mat& mu, const Mat& log_sigma,
                        const Mat& frames) {
  if (mu.rows() != log_sigma.rows() || mu.cols() != log_sigma.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "mu and log_sigma shapes differ");
  }
  if (frames.rows() != mu.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "frames have " + std::to_string(frames.rows()) +
                    " channels, stats have " + std::to_string(mu.rows()));
  }
  const Eigen::Index d = mu.rows();
  const Eigen::Index num_tokens = mu.cols();
  const Eigen::Index num_frames = frames.cols();
  constexpr double kLog2Pi = 1.8378770664093453;

  Mat ll(num_tokens, num_frames);
  for (Eigen::Index l = 0; l < num_tokens; ++l) {
    for (Eigen::Index t = 0; t < num_frames; ++t) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = frames(k, t) - mu(k, l);
        acc += kLog2Pi + 2.0 * log_sigma(k, l) +
               diff * diff * std::exp(-2.0 * log_sigma(k, l));
      }
      ll(l, t) = -0.5 * acc;
    }
  }
  return ll;
}

Alignment MasFromLogLik(const Mat& ll) {
  const Eigen::Index num_tokens = ll.rows();
  const Eigen::Index num_frames = ll.cols();
  if (num_tokens == 0 || num_frames == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty alignment table");
  }
  if (num_frames < num_tokens) {
    throw Error(ErrorCode::kFewerFramesThanTokens,
                std::to_string(num_frames) + " frames cannot cover " +
                    std::to_string(num_tokens) + " tokens");
  }

  // Suffix scores: r(l, t) is the best total over frames t..T-1 given that
  // frame t belongs to token l, with the path forced to end on the last
  // token. Walking forward over frames then lets ties pick the smaller
  // token at the earliest undecided frame, which is exactly the
  // lexicographically-smallest optimal alignment.
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  Mat r = Mat::Constant(num_tokens, num_frames, kNegInf);
  r(num_tokens - 1, num_frames - 1) = ll(num_tokens - 1, num_frames - 1);
  for (Eigen::Index t = num_frames - 2; t >= 0; --t) {
    for (Eigen::Index l = 0; l < num_tokens; ++l) {
      const double stay = r(l, t + 1);
      const double advance =
          (l + 1 < num_tokens) ? r(l + 1, t + 1) : kNegInf;
      const double best = std::max(stay, advance);
      if (best != kNegInf) r(l, t) = ll(l, t) + best;
    }
  }

  Alignment out;
  out.durations.assign(num_tokens, 0);
  out.score = r(0, 0);
  Eigen::Index l = 0;
  out.durations[0] = 1;
  for (Eigen::Index t = 0; t + 1 < num_frames; ++t) {
    const double stay = r(l, t + 1);
    const double advance = (l + 1 < num_tokens) ? r(l + 1, t + 1) : kNegInf;
    // Ties keep the current token: the earlier token takes the frame.
    if (!(stay >= advance)) ++l;
    ++out.durations[l];
  }
  return out;
}

Alignment MasAlign(const Mat& mu, const Mat& log_sigma, const Mat& frames) {
  return MasFromLogLik(GaussianFrameLogLik(mu, log_sigma, frames));
}

std::vector<int> ExpandIndices(const std::vector<int>& durations) {
  std::vector<int> idx;
  for (size_t i = 0; i < durations.size(); ++i) {
    if (durations[i] <= 0) {
      throw Error(ErrorCode::kNonPositiveDuration,
                  "duration " + std::to_string(durations[i]) + " at token " +
                      std::to_string(i));
    }
    idx.insert(idx.end(), durations[i], static_cast<int>(i));
  }
  return idx;
}

}  // namespace xltts
