// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "common/error.hpp"

#include <iostream>
#include <mutex>

namespace sonotrace {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyMesh: return "EmptyMesh";
    case ErrorCode::MissingMesh: return "MissingMesh";
    case ErrorCode::UnknownMaterial: return "UnknownMaterial";
    case ErrorCode::InvalidFrequencyGrid: return "InvalidFrequencyGrid";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::RevisionMismatch: return "RevisionMismatch";
    case ErrorCode::AliasRisk: return "AliasRisk";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::UnknownEntity: return "UnknownEntity";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler& handler_slot() {
  static WarningHandler h;
  return h;
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(handler_mutex());
  handler_slot() = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler_slot()) {
    handler_slot()(message);
  } else {
    std::cerr << "sonotrace: warning: " << message << '\n';
  }
}

}  // namespace sonotrace
