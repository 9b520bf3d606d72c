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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bctx {

enum class ErrorCode {
  // apk-container
  kNotAZip,
  kMissingDex,
  kMissingManifest,
  kCorruptEntry,
  kNotSupported,
  // dex-parser
  kBadMagic,
  kChecksumMismatch,
  kTruncatedSection,
  kIndexOutOfRange,
  kBadMutf8,
  kSpecTooLarge,
  // manifest-context / netconst
  kBadChunk,
  kBadStringPool,
  kWellFormednessError,
  kEmptyTraining,
  // iccg
  kBadCatalogLine,
  // embedder / classifier
  kShapeMismatch,
  kDimMismatch,
  kEmptyDataset,
  kLabelUnseen,
  kVersionUnsupported,
  kFingerprintMismatch,
  // evaluation
  kClassTooSmall,
  kUnknownOperator,
  kBadCorpus,
  kBadConfig,
  kIoError,
  kUsageError,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported with this type. The
// code identifies the failure class; the message carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace bctx
