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

#include "core/rng.h"

#include <cmath>
#include <sstream>

#include "util/error.h"

namespace xltts {

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "UniformInt(0)");
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::Normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1, u2;
  do {
    u1 = Uniform();
  } while (u1 <= 0.0);
  u2 = Uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

std::string Rng::StateString() const {
  std::ostringstream os;
  os << engine_ << " " << (has_cached_normal_ ? 1 : 0) << " ";
  os.precision(17);
  os << cached_normal_;
  return os.str();
}

void Rng::SetStateString(const std::string& state) {
  std::istringstream is(state);
  int cached = 0;
  is >> engine_ >> cached >> cached_normal_;
  if (is.fail()) {
    throw Error(ErrorCode::kCorruptCheckpoint, "bad RNG state string");
  }
  has_cached_normal_ = cached != 0;
}

}  // namespace xltts
