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

#include "core/checkpoint.h"

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "util/error.h"

namespace xltts {

namespace {

// File layout: 8-byte magic, then a little-endian payload of
//   u32 version
//   u64 meta length, meta bytes (JSON, sorted keys)
//   u64 tensor count, per tensor: name, u64 rows, u64 cols, f64 data
//   u64 blob count, per blob: name, u64 length, bytes
// and a trailing u32 CRC-32 of the payload.
constexpr char kMagic[8] = {'x', 'l', 't', 't', 's', 'c', 'k', '1'};
constexpr uint32_t kVersion = 1;

void PutU32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void PutU64(std::string* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<char>(v >> (8 * i)));
}

void PutString(std::string* out, const std::string& s) {
  PutU64(out, s.size());
  out->append(s);
}

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i])
                                     << (8 * i);
    pos_ += 4;
    return v;
  }

  uint64_t U64() {
    Need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i])
                                     << (8 * i);
    pos_ += 8;
    return v;
  }

  std::string String() {
    uint64_t len = U64();
    Need(len);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), len);
    pos_ += len;
    return s;
  }

  void Doubles(double* dst, uint64_t count) {
    Need(count * sizeof(double));
    std::memcpy(dst, data_ + pos_, count * sizeof(double));
    pos_ += count * sizeof(double);
  }

  bool Done() const { return pos_ == size_; }

 private:
  void Need(uint64_t n) {
    if (pos_ + n > size_) {
      throw Error(ErrorCode::kCorruptCheckpoint, "truncated payload");
    }
  }

  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

}  // namespace

void Checkpoint::Save(const std::string& path) const {
  std::string payload;
  PutU32(&payload, kVersion);
  PutString(&payload, meta.dump());
  PutU64(&payload, tensors.size());
  for (const auto& [name, m] : tensors) {
    PutString(&payload, name);
    PutU64(&payload, static_cast<uint64_t>(m.rows()));
    PutU64(&payload, static_cast<uint64_t>(m.cols()));
    // Eigen matrices are column-major and contiguous; doubles are stored in
    // native (little-endian) byte order.
    payload.append(reinterpret_cast<const char*>(m.data()),
                   sizeof(double) * m.size());
  }
  PutU64(&payload, blobs.size());
  for (const auto& [name, blob] : blobs) {
    PutString(&payload, name);
    PutString(&payload, blob);
  }
  uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(payload.data()),
            static_cast<uInt>(payload.size())));

  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kUnwritablePath, tmp);
    }
    out.write(kMagic, sizeof(kMagic));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    std::string tail;
    PutU32(&tail, crc);
    out.write(tail.data(), static_cast<std::streamsize>(tail.size()));
    if (!out) {
      throw Error(ErrorCode::kUnwritablePath, tmp);
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kUnwritablePath,
                path + ": " + ec.message());
  }
}

Checkpoint Checkpoint::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, path);
  }
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + 4 + 4) {
    throw Error(ErrorCode::kCorruptCheckpoint, path + ": too small");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kCorruptCheckpoint, path + ": bad magic");
  }
  size_t payload_size = bytes.size() - sizeof(kMagic) - 4;
  const uint8_t* payload = bytes.data() + sizeof(kMagic);
  uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i) {
    stored_crc |= static_cast<uint32_t>(bytes[sizeof(kMagic) + payload_size +
                                              i])
                  << (8 * i);
  }
  uint32_t crc = static_cast<uint32_t>(
      crc32(0L, payload, static_cast<uInt>(payload_size)));
  if (crc != stored_crc) {
    throw Error(ErrorCode::kCorruptCheckpoint, path + ": checksum mismatch");
  }

  Reader r(payload, payload_size);
  uint32_t version = r.U32();
  if (version != kVersion) {
    throw Error(ErrorCode::kCorruptCheckpoint,
                path + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  std::string meta_str = r.String();
  ckpt.meta = nlohmann::json::parse(meta_str, nullptr, false);
  if (ckpt.meta.is_discarded()) {
    throw Error(ErrorCode::kCorruptCheckpoint, path + ": bad metadata");
  }
  uint64_t n_tensors = r.U64();
  for (uint64_t i = 0; i < n_tensors; ++i) {
    std::string name = r.String();
    uint64_t rows = r.U64();
    uint64_t cols = r.U64();
    if (rows > (1ull << 32) || cols > (1ull << 32)) {
      throw Error(ErrorCode::kCorruptCheckpoint, path + ": absurd shape");
    }
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    r.Doubles(m.data(), rows * cols);
    ckpt.tensors.emplace(std::move(name), std::move(m));
  }
  uint64_t n_blobs = r.U64();
  for (uint64_t i = 0; i < n_blobs; ++i) {
    std::string name = r.String();
    ckpt.blobs.emplace(std::move(name), r.String());
  }
  if (!r.Done()) {
    throw Error(ErrorCode::kCorruptCheckpoint, path + ": trailing bytes");
  }
  return ckpt;
}

}  // namespace xltts
