// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/optimizer.h"

#include <cmath>

#include "util/error.h"

namespace xltts {

AdamW::AdamW(ParamRegistry* registry, AdamWConfig cfg)
    : registry_(registry), cfg_(cfg) {
  for (const auto& [name, tensor] : registry_->params()) {
    m_[name] = Mat::Zero(tensor.rows(), tensor.cols());
    v_[name] = Mat::Zero(tensor.rows(), tensor.cols());
  }
}

double AdamW::Step(double lr, double clip_norm) {
  return StepWithGrads(lr, CaptureGrads(), clip_norm);
}

std::map<std::string, Mat> AdamW::CaptureGrads() const {
  std::map<std::string, Mat> grads;
  for (const auto& [name, tensor] : registry_->params()) {
    grads[name] = tensor.GradOrZero();
  }
  return grads;
}

double AdamW::GradNorm() const {
  double sq = 0.0;
  for (const auto& [name, tensor] : registry_->params()) {
    sq += tensor.GradOrZero().squaredNorm();
  }
  return std::sqrt(sq);
}

double AdamW::StepWithGrads(double lr, std::map<std::string, Mat> grads,
                            double clip_norm) {
  double sq = 0.0;
  for (const auto& [name, g] : grads) {
    sq += g.squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (clip_norm > 0.0 && norm > clip_norm) {
    const double scale = clip_norm / norm;
    for (auto& [name, g] : grads) {
      g *= scale;
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (const auto& [name, param] : registry_->params()) {
    Mat& m = m_[name];
    Mat& v = v_[name];
    auto it = grads.find(name);
    const Mat g = it != grads.end()
                      ? it->second
                      : Mat::Zero(param.rows(), param.cols()).eval();
    m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * g;
    v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * g.cwiseProduct(g);
    Mat m_hat = m / bc1;
    Mat v_hat = v / bc2;
    Mat update =
        (m_hat.array() / (v_hat.array().sqrt() + cfg_.eps)).matrix() +
        cfg_.weight_decay * param.value();
    Tensor handle = param;
    handle.mutable_value() -= lr * update;
  }
  return norm;
}

void AdamW::SaveInto(std::map<std::string, Mat>* tensors,
                     const std::string& prefix) const {
  for (const auto& [name, m] : m_) {
    (*tensors)[prefix + name + ".m"] = m;
  }
  for (const auto& [name, v] : v_) {
    (*tensors)[prefix + name + ".v"] = v;
  }
  Mat step(1, 1);
  step(0, 0) = static_cast<double>(t_);
  (*tensors)[prefix + "__step"] = step;
}

void AdamW::LoadFrom(const std::map<std::string, Mat>& tensors,
                     const std::string& prefix) {
  auto fetch = [&](const std::string& key) -> const Mat& {
    auto it = tensors.find(key);
    if (it == tensors.end()) {
      throw Error(ErrorCode::kCorruptCheckpoint,
                  "optimizer state missing key: " + key);
    }
    return it->second;
  };
  for (auto& [name, m] : m_) {
    const Mat& src = fetch(prefix + name + ".m");
    if (src.rows() != m.rows() || src.cols() != m.cols()) {
      throw Error(ErrorCode::kIncompatibleDimensions,
                  "optimizer moment shape clash at " + name);
    }
    m = src;
  }
  for (auto& [name, v] : v_) {
    const Mat& src = fetch(prefix + name + ".v");
    if (src.rows() != v.rows() || src.cols() != v.cols()) {
      throw Error(ErrorCode::kIncompatibleDimensions,
                  "optimizer moment shape clash at " + name);
    }
    v = src;
  }
  const Mat& step = fetch(prefix + "__step");
  t_ = static_cast<int64_t>(step(0, 0));
}

}  // namespace xltts
