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

#include "nn/registry.h"

#include "util/error.h"

namespace xltts {

Tensor ParamRegistry::Add(const std::string& name, Mat init) {
  if (params_.count(name) > 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate parameter name '" + name + "'");
  }
  Tensor t = Tensor::Parameter(std::move(init));
  params_.emplace(name, t);
  return t;
}

Tensor ParamRegistry::AddUniform(const std::string& name, Eigen::Index rows,
                                 Eigen::Index cols, double bound, Rng* rng) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = rng->Uniform(-bound, bound);
    }
  }
  return Add(name, std::move(m));
}

Tensor ParamRegistry::AddNormal(const std::string& name, Eigen::Index rows,
                                Eigen::Index cols, double stddev, Rng* rng) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      m(i, j) = stddev * rng->Normal();
    }
  }
  return Add(name, std::move(m));
}

Tensor ParamRegistry::AddZeros(const std::string& name, Eigen::Index rows,
                               Eigen::Index cols) {
  return Add(name, Mat::Zero(rows, cols));
}

Tensor ParamRegistry::AddOnes(const std::string& name, Eigen::Index rows,
                              Eigen::Index cols) {
  return Add(name, Mat::Ones(rows, cols));
}

int64_t ParamRegistry::ParameterCount() const {
  int64_t total = 0;
  for (const auto& [name, t] : params_) {
    total += static_cast<int64_t>(t.rows()) * t.cols();
  }
  return total;
}

void ParamRegistry::ZeroGrads() {
  for (auto& [name, t] : params_) {
    t.ZeroGrad();
  }
}

void ParamRegistry::SaveTensors(std::map<std::string, Mat>* out,
                                const std::string& prefix) const {
  for (const auto& [name, t] : params_) {
    (*out)[prefix + name] = t.value();
  }
}

void ParamRegistry::LoadTensors(const std::map<std::string, Mat>& in,
                                const std::string& prefix) {
  for (auto& [name, t] : params_) {
    auto it = in.find(prefix + name);
    if (it == in.end()) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  "checkpoint lacks tensor '" + prefix + name + "'");
    }
    if (it->second.rows() != t.rows() || it->second.cols() != t.cols()) {
      throw Error(ErrorCode::kIncompatibleDimensions,
                  "tensor '" + prefix + name + "' is " +
                      std::to_string(it->second.rows()) + "x" +
                      std::to_string(it->second.cols()) + ", model wants " +
                      std::to_string(t.rows()) + "x" +
                      std::to_string(t.cols()));
    }
    t.mutable_value() = it->second;
  }
}

}  // namespace xltts
