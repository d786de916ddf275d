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

#ifndef XLTTS_NN_REGISTRY_H_
#define XLTTS_NN_REGISTRY_H_

#include <cstdint>
#include <map>
#include <string>

#include "core/rng.h"
#include "core/tensor.h"

namespace xltts {

// Owns every trainable leaf of a model under a unique dotted name, so the
// optimizer, the checkpoint format, and the parameter-count report all see
// the same flat view. Layers register themselves at construction time.
class ParamRegistry {
 public:
  // Registers `init` under `name`; names must be unique.
  Tensor Add(const std::string& name, Mat init);

  Tensor AddUniform(const std::string& name, Eigen::Index rows,
                    Eigen::Index cols, double bound, Rng* rng);
  Tensor AddNormal(const std::string& name, Eigen::Index rows,
                   Eigen::Index cols, double stddev, Rng* rng);
  Tensor AddZeros(const std::string& name, Eigen::Index rows,
                  Eigen::Index cols);
  Tensor AddOnes(const std::string& name, Eigen::Index rows,
                 Eigen::Index cols);

  const std::map<std::string, Tensor>& params() const { return params_; }
  bool empty() const { return params_.empty(); }
  int64_t ParameterCount() const;
  void ZeroGrads();

  // Copies every parameter into `out` as prefix+name. Keys already present
  // under other names are left alone.
  void SaveTensors(std::map<std::string, Mat>* out,
                   const std::string& prefix) const;
  // Loads every registered parameter from `in`; a missing key is a corrupt
  // checkpoint, a shape clash is an incompatible one.
  void LoadTensors(const std::map<std::string, Mat>& in,
                   const std::string& prefix);

 private:
  std::map<std::string, Tensor> params_;
};

}  // namespace xltts

#endif  // XLTTS_NN_REGISTRY_H_
