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

#include "util/error.h"

namespace xltts {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kUnsupportedLanguage: return "UnsupportedLanguage";
    case ErrorCode::kUnknownEmotionLabel: return "UnknownEmotionLabel";
    case ErrorCode::kAllSilence: return "AllSilence";
    case ErrorCode::kImmeasurableLoudness: return "ImmeasurableLoudness";
    case ErrorCode::kEmptyWaveform: return "EmptyWaveform";
    case ErrorCode::kStratumTooSmall: return "StratumTooSmall";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kVocabMismatch: return "VocabMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kOddChannelCount: return "OddChannelCount";
    case ErrorCode::kFewerFramesThanTokens: return "FewerFramesThanTokens";
    case ErrorCode::kNonPositiveDuration: return "NonPositiveDuration";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kMissingLabels: return "MissingLabels";
    case ErrorCode::kClassAbsentFromTrain: return "ClassAbsentFromTrain";
    case ErrorCode::kEncoderUnavailable: return "EncoderUnavailable";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kBatchSizeMismatch: return "BatchSizeMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteComponent: return "NonFiniteComponent";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kCorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::kIncompatibleDimensions: return "IncompatibleDimensions";
    case ErrorCode::kPairMismatch: return "PairMismatch";
    case ErrorCode::kReferenceTooShort: return "ReferenceTooShort";
    case ErrorCode::kUnwritablePath: return "UnwritablePath";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace xltts
