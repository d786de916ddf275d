// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0
//
// Decoupled-weight-decay Adam over a parameter registry, with moment state
// that serializes into checkpoints for bit-identical resumption.

#ifndef XLTTS_TRAIN_OPTIMIZER_H_
#define XLTTS_TRAIN_OPTIMIZER_H_

#include <cstdint>
#include <map>
#include <string>

#include "core/tensor.h"
#include "nn/registry.h"

namespace xltts {

struct AdamWConfig {
  double beta1 = 0.8;
  double beta2 = 0.99;
  double weight_decay = 0.01;
  double eps = 1e-9;
};

class AdamW {
 public:
  AdamW() = default;
  AdamW(ParamRegistry* registry, AdamWConfig cfg);

  // Applies one update using the gradients currently stored in the registry.
  // When clip_norm > 0 the gradient set is rescaled so its global L2 norm
  // does not exceed clip_norm.  Returns the pre-clip global norm.
  double Step(double lr, double clip_norm = 0.0);

  // Same update but from an externally captured gradient map (name -> grad).
  // Parameters without an entry are treated as having zero gradient.
  double StepWithGrads(double lr, std::map<std::string, Mat> grads,
                       double clip_norm = 0.0);

  // Global L2 norm of the gradients currently in the registry.
  double GradNorm() const;

  // Copies per-parameter first/second moments from the registry's gradients.
  std::map<std::string, Mat> CaptureGrads() const;

  int64_t step_count() const { return t_; }

  // Serializes moments and the step counter under `prefix`.
  void SaveInto(std::map<std::string, Mat>* tensors,
                const std::string& prefix) const;
  // Restores moments and step counter; missing keys throw kCorruptCheckpoint
  // and shape clashes throw kIncompatibleDimensions.
  void LoadFrom(const std::map<std::string, Mat>& tensors,
                const std::string& prefix);

 private:
  ParamRegistry* registry_ = nullptr;
  AdamWConfig cfg_;
  int64_t t_ = 0;
  std::map<std::string, Mat> m_;
  std::map<std::string, Mat> v_;
};

}  // namespace xltts

#endif  // XLTTS_TRAIN_OPTIMIZER_H_
