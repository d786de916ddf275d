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

#include "data/split.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "core/rng.h"
#include "json.hpp"
#include "util/error.h"

namespace xltts {

SplitAssignment SplitDataset(const std::vector<Utterance>& utts,
                             uint64_t seed) {
  if (utts.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "nothing to split");
  }
  // Sorted stratum keys keep the result independent of input ordering
  // quirks and fully determined by (contents, seed).
  std::map<std::pair<std::string, std::string>, std::vector<int>> strata;
  for (size_t i = 0; i < utts.size(); ++i) {
    strata[{utts[i].speaker, utts[i].lang}].push_back(static_cast<int>(i));
  }

  SplitAssignment split;
  Rng master(seed);
  for (auto& [key, rows] : strata) {
    if (rows.size() < 10) {
      throw Error(ErrorCode::kStratumTooSmall,
                  "speaker '" + key.first + "' language '" + key.second +
                      "' has " + std::to_string(rows.size()) +
                      " utterances, need 10");
    }
    Rng rng = master.Fork();
    // Fisher-Yates over the stratum rows.
    for (size_t i = rows.size() - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(rng.UniformInt(i + 1));
      std::swap(rows[i], rows[j]);
    }
    size_t n = rows.size();
    size_t n_val = static_cast<size_t>(std::llround(0.1 * n));
    size_t n_test = n_val;
    size_t n_train = n - n_val - n_test;
    for (size_t i = 0; i < n; ++i) {
      if (i < n_train) {
        split.train.push_back(rows[i]);
      } else if (i < n_train + n_val) {
        split.val.push_back(rows[i]);
      } else {
        split.test.push_back(rows[i]);
      }
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string SplitToJson(const SplitAssignment& split) {
  nlohmann::json j;
  j["train"] = split.train;
  j["val"] = split.val;
  j["test"] = split.test;
  return j.dump(2);
}

SplitAssignment SplitFromJson(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr,
                                           /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object() || !j.contains("train") ||
      !j.contains("val") || !j.contains("test")) {
    throw Error(ErrorCode::kInvalidArgument, "malformed split JSON");
  }
  SplitAssignment split;
  for (const char* name : {"train", "val", "test"}) {
    if (!j[name].is_array()) {
      throw Error(ErrorCode::kInvalidArgument, "malformed split JSON");
    }
    std::vector<int>& dst = name[0] == 't' && name[1] == 'r' ? split.train
                            : name[0] == 'v'                 ? split.val
                                                             : split.test;
    for (const auto& v : j[name]) {
      if (!v.is_number_integer()) {
        throw Error(ErrorCode::kInvalidArgument, "split rows must be integers");
      }
      dst.push_back(v.get<int>());
    }
  }
  return split;
}

void SaveSplit(const std::string& path, const SplitAssignment& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
  out << SplitToJson(split) << "\n";
  if (!out.good()) {
    throw Error(ErrorCode::kUnwritablePath, path);
  }
}

SplitAssignment LoadSplit(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    throw Error(ErrorCode::kMissingFile, path);
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return SplitFromJson(ss.str());
}

}  // namespace xltts
