// Copyright 2026 The bctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bctx/error.h"

namespace bctx {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotAZip: return "NotAZip";
    case ErrorCode::kMissingDex: return "MissingDex";
    case ErrorCode::kMissingManifest: return "MissingManifest";
    case ErrorCode::kCorruptEntry: return "CorruptEntry";
    case ErrorCode::kNotSupported: return "NotSupported";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::kTruncatedSection: return "TruncatedSection";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kBadMutf8: return "BadMutf8";
    case ErrorCode::kSpecTooLarge: return "SpecTooLarge";
    case ErrorCode::kBadChunk: return "BadChunk";
    case ErrorCode::kBadStringPool: return "BadStringPool";
    case ErrorCode::kWellFormednessError: return "WellFormednessError";
    case ErrorCode::kEmptyTraining: return "EmptyTraining";
    case ErrorCode::kBadCatalogLine: return "BadCatalogLine";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kLabelUnseen: return "LabelUnseen";
    case ErrorCode::kVersionUnsupported: return "VersionUnsupported";
    case ErrorCode::kFingerprintMismatch: return "FingerprintMismatch";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kUnknownOperator: return "UnknownOperator";
    case ErrorCode::kBadCorpus: return "BadCorpus";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace bctx
