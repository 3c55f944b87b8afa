// Copyright 2026 The Upcall Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "upcall/error.hpp"

namespace upcall {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kNotWav: return "NotWav";
    case ErrorCode::kUnsupportedEncoding: return "UnsupportedEncoding";
    case ErrorCode::kTruncated: return "Truncated";
    case ErrorCode::kClipTooShort: return "ClipTooShort";
    case ErrorCode::kEmptyCandidates: return "EmptyCandidates";
    case ErrorCode::kBandOutOfRange: return "BandOutOfRange";
    case ErrorCode::kBandViolation: return "BandViolation";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kEmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::kModelFormat: return "ModelFormat";
  }
  return "Unknown";
}

}  // namespace upcall
