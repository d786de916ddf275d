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

#ifndef XLTTS_UTIL_ERROR_H_
#define XLTTS_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace xltts {

enum class ErrorCode {
  kMissingFile,
  kMalformedLine,
  kUnsupportedLanguage,
  kUnknownEmotionLabel,
  kAllSilence,
  kImmeasurableLoudness,
  kEmptyWaveform,
  kStratumTooSmall,
  kEmptyCorpus,
  kEmptyText,
  kVocabMismatch,
  kDimensionMismatch,
  kOddChannelCount,
  kFewerFramesThanTokens,
  kNonPositiveDuration,
  kTooShort,
  kMissingLabels,
  kClassAbsentFromTrain,
  kEncoderUnavailable,
  kLengthMismatch,
  kBatchSizeMismatch,
  kShapeMismatch,
  kNonFiniteComponent,
  kNonFiniteLoss,
  kCorruptCheckpoint,
  kIncompatibleDimensions,
  kPairMismatch,
  kReferenceTooShort,
  kUnwritablePath,
  kInvalidArgument,
  kIoError,
};

const char* ErrorCodeName(ErrorCode code);

// All recoverable failures are reported through this exception; the code
// identifies the contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xltts

#endif  // XLTTS_UTIL_ERROR_H_
