// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sonotrace {

// Stable numeric values; the C API exposes them unchanged.
enum class ErrorCode : int {
  ParseError = 1,
  EmptyMesh = 2,
  MissingMesh = 3,
  UnknownMaterial = 4,
  InvalidFrequencyGrid = 5,
  InvalidConfig = 6,
  InvalidArgument = 7,
  Overflow = 8,
  DomainError = 9,
  RevisionMismatch = 10,
  AliasRisk = 11,
  GridMismatch = 12,
  SampleRateMismatch = 13,
  UnknownEntity = 14,
  IoError = 15,
  ProtocolError = 16,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

using WarningHandler = std::function<void(std::string_view)>;

// Installs a process-wide sink for non-fatal diagnostics. Passing an empty
// handler restores the default (stderr).
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace sonotrace
