// Copyright 2026 The S3F Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace s3f {

enum class ErrorKind {
  Ingest,
  Schema,
  State,
  Argument,
  Numeric,
  Mode,
  Format,
  Size,
};

inline constexpr std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Ingest: return "IngestError";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::State: return "StateError";
    case ErrorKind::Argument: return "ArgumentError";
    case ErrorKind::Numeric: return "NumericError";
    case ErrorKind::Mode: return "ModeError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::Size: return "SizeError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindError : public Error {
 public:
  explicit KindError(const std::string& message) : Error(K, message) {}
};

using IngestError = KindError<ErrorKind::Ingest>;
using SchemaError = KindError<ErrorKind::Schema>;
using StateError = KindError<ErrorKind::State>;
using ArgumentError = KindError<ErrorKind::Argument>;
using ModeError = KindError<ErrorKind::Mode>;
using FormatError = KindError<ErrorKind::Format>;
using SizeError = KindError<ErrorKind::Size>;

// Carries the solver step at which the state stopped being finite (-1 when
// the failure is not tied to a step).
class NumericError : public KindError<ErrorKind::Numeric> {
 public:
  explicit NumericError(const std::string& message, int step = -1)
      : KindError<ErrorKind::Numeric>(message), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace s3f
