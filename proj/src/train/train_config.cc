// Copyright (c) 2026 The xltts Authors
// SPDX-License-Identifier: Apache-2.0

#include "train/train_config.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "util/error.h"

namespace xltts {
namespace {

std::string Trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Malformed(int line_no, const std::string& why) {
  throw Error(ErrorCode::kMalformedLine,
              "config line " + std::to_string(line_no) + ": " + why);
}

double ParseDouble(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) Malformed(line_no, "trailing junk in number: " + v);
    return x;
  } catch (const Error&) {
    throw;
  } catch (...) {
    Malformed(line_no, "expected a number, got: " + v);
  }
}

int64_t ParseInt(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used != v.size()) Malformed(line_no, "trailing junk in integer: " + v);
    return static_cast<int64_t>(x);
  } catch (const Error&) {
    throw;
  } catch (...) {
    Malformed(line_no, "expected an integer, got: " + v);
  }
}

uint64_t ParseUint(const std::string& v, int line_no) {
  try {
    std::size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) Malformed(line_no, "trailing junk in integer: " + v);
    return static_cast<uint64_t>(x);
  } catch (const Error&) {
    throw;
  } catch (...) {
    Malformed(line_no, "expected an unsigned integer, got: " + v);
  }
}

}  // namespace

TrainConfig TrainConfig::Desk() {
  TrainConfig c;
  c.scale = "desk";
  c.batch_size = 8;
  c.max_steps = 50000;
  return c;
}

TrainConfig TrainConfig::Paper() {
  TrainConfig c;
  c.scale = "paper";
  c.batch_size = 128;
  c.max_steps = 1000000;
  return c;
}

TrainConfig TrainConfig::Parse(const std::string& text) {
  TrainConfig c;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) Malformed(line_no, "expected `key = value`");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      Malformed(line_no, "empty key or value");
    }
    if (key == "scale") {
      if (value != "desk" && value != "paper") {
        Malformed(line_no, "scale must be `desk` or `paper`");
      }
      c.scale = value;
    } else if (key == "batch_size") {
      c.batch_size = static_cast<int>(ParseInt(value, line_no));
    } else if (key == "beta1") {
      c.beta1 = ParseDouble(value, line_no);
    } else if (key == "beta2") {
      c.beta2 = ParseDouble(value, line_no);
    } else if (key == "weight_decay") {
      c.weight_decay = ParseDouble(value, line_no);
    } else if (key == "initial_lr") {
      c.initial_lr = ParseDouble(value, line_no);
    } else if (key == "lr_decay") {
      c.lr_decay = ParseDouble(value, line_no);
    } else if (key == "max_steps") {
      c.max_steps = ParseInt(value, line_no);
    } else if (key == "seed") {
      c.seed = ParseUint(value, line_no);
    } else if (key == "segment_frames") {
      c.segment_frames = static_cast<int>(ParseInt(value, line_no));
    } else if (key == "grad_clip_norm") {
      c.grad_clip_norm = ParseDouble(value, line_no);
    } else if (key == "alpha_e") {
      c.loss.alpha_e = ParseDouble(value, line_no);
    } else if (key == "alpha_s") {
      c.loss.alpha_s = ParseDouble(value, line_no);
    } else if (key == "content_weight") {
      c.loss.content_weight = ParseDouble(value, line_no);
    } else if (key == "mel_weight") {
      c.loss.mel_weight = ParseDouble(value, line_no);
    } else if (key == "kl_weight") {
      c.loss.kl_weight = ParseDouble(value, line_no);
    } else if (key == "fm_weight") {
      c.loss.fm_weight = ParseDouble(value, line_no);
    } else {
      Malformed(line_no, "unknown key: " + key);
    }
  }
  c.Validate();
  return c;
}

TrainConfig TrainConfig::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "cannot open config file: " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

std::string TrainConfig::ToText() const {
  std::ostringstream out;
  out.precision(17);
  out << "# training\n";
  out << "scale = " << scale << "\n";
  out << "batch_size = " << batch_size << "\n";
  out << "beta1 = " << beta1 << "\n";
  out << "beta2 = " << beta2 << "\n";
  out << "weight_decay = " << weight_decay << "\n";
  out << "initial_lr = " << initial_lr << "\n";
  out << "lr_decay = " << lr_decay << "\n";
  out << "max_steps = " << max_steps << "\n";
  out << "seed = " << seed << "\n";
  out << "segment_frames = " << segment_frames << "\n";
  out << "grad_clip_norm = " << grad_clip_norm << "\n";
  out << "# objective weights\n";
  out << "alpha_e = " << loss.alpha_e << "\n";
  out << "alpha_s = " << loss.alpha_s << "\n";
  out << "content_weight = " << loss.content_weight << "\n";
  out << "mel_weight = " << loss.mel_weight << "\n";
  out << "kl_weight = " << loss.kl_weight << "\n";
  out << "fm_weight = " << loss.fm_weight << "\n";
  return out.str();
}

double TrainConfig::LearningRate(int64_t epoch) const {
  return initial_lr * std::pow(lr_decay, static_cast<double>(epoch));
}

void TrainConfig::Validate() const {
  if (scale != "desk" && scale != "paper") {
    throw Error(ErrorCode::kInvalidArgument, "scale must be desk or paper");
  }
  if (batch_size <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch_size must be positive");
  }
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "betas must lie in (0, 1)");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw Error(ErrorCode::kInvalidArgument, "weight_decay must be >= 0");
  }
  if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) {
    throw Error(ErrorCode::kInvalidArgument, "initial_lr must be positive");
  }
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lr_decay must lie in (0, 1]");
  }
  if (max_steps <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_steps must be positive");
  }
  if (segment_frames <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment_frames must be positive");
  }
  if (!(grad_clip_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "grad_clip_norm must be positive");
  }
  loss.Validate();
}

}  // namespace xltts
