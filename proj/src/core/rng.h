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

#ifndef XLTTS_CORE_RNG_H_
#define XLTTS_CORE_RNG_H_

#include <cstdint>
#include <random>
#include <string>

namespace xltts {

// Deterministic random source. Sampling is implemented on top of the raw
// engine output (not std:: distributions) so a serialized state resumes the
// exact stream.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) { Seed(seed); }

  void Seed(uint64_t seed) {
    engine_.seed(seed);
    has_cached_normal_ = false;
    cached_normal_ = 0.0;
  }

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1).
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n). Rejection-sampled, unbiased.
  uint64_t UniformInt(uint64_t n);

  // Standard normal via Box-Muller.
  double Normal();

  // Derive an independent stream deterministically.
  Rng Fork() { return Rng(NextU64() ^ 0x9e3779b97f4a7c15ull); }

  std::string StateString() const;
  void SetStateString(const std::string& state);

  bool operator==(const Rng& other) const {
    return engine_ == other.engine_ &&
           has_cached_normal_ == other.has_cached_normal_ &&
           cached_normal_ == other.cached_normal_;
  }

 private:
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace xltts

#endif  // XLTTS_CORE_RNG_H_
