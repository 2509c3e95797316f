// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "common/math.hpp"

namespace sonotrace::server {

// Frame: "STUE", u16 version, u16 type, u64 payload length, payload.
inline constexpr char kMagic[4] = {'S', 'T', 'U', 'E'};
inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::size_t kHeaderBytes = 16;
inline constexpr std::uint16_t kDefaultPort = 7343;
inline constexpr std::uint16_t kResponseBit = 0x8000;

enum class MessageType : std::uint16_t {
  Hello = 1,
  Ping = 2,
  GetConfig = 3,
  SetPose = 4,
  Simulate = 5,
  Synthesize = 6,
  Error = 0xFFFF,
};

constexpr std::uint16_t response_type(MessageType t) { return static_cast<std::uint16_t>(t) | kResponseBit; }

enum class WireError : std::uint16_t {
  BadMagic = 1,
  VersionMismatch = 2,
  UnknownEntity = 3,
  SimFailed = 4,
  UnknownType = 5,
  Malformed = 6,
  NoSession = 7,
};

const char* wire_error_name(WireError code);

struct Frame {
  std::uint16_t version = kProtocolVersion;
  std::uint16_t type = 0;
  std::vector<std::uint8_t> payload;
};

std::vector<std::uint8_t> encode_frame(std::uint16_t type, std::span<const std::uint8_t> payload,
                                       std::uint16_t version = kProtocolVersion);

// Error payload: u16 code, u32 text length, UTF-8 text.
std::vector<std::uint8_t> encode_error_payload(WireError code, const std::string& text);
std::vector<std::uint8_t> encode_error_frame(WireError code, const std::string& text);
std::pair<WireError, std::string> decode_error_payload(std::span<const std::uint8_t> payload);

// Largest accepted payload for a request type.
std::uint64_t max_request_payload(std::uint16_t type);

// A protocol violation found while framing. The reader has already
// resynchronized; the connection stays usable.
struct FrameFault {
  WireError code;
  std::string message;
};

using FrameEvent = std::variant<Frame, FrameFault>;

// Incremental request decoder. Bad magic or an oversized length reports a
// fault and scans forward for the next "STUE".
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  // Next complete frame or fault, if any.
  std::optional<FrameEvent> next();
  // True while a frame has started but not completed.
  bool partial() const;
  // Drops a stalled partial frame; returns the fault to report.
  FrameFault abandon();

 private:
  enum class Mode { Header, Scan };
  void compact();

  std::vector<std::uint8_t> buf_;
  std::size_t pos_ = 0;
  Mode mode_ = Mode::Header;
};

// HELLO request: u16 name length, client name. Response: u16 version,
// u16 name length, server name.
std::vector<std::uint8_t> encode_hello(const std::string& name);
std::string decode_hello(std::span<const std::uint8_t> payload);
std::vector<std::uint8_t> encode_hello_reply(const std::string& name);

// SET_POSE request: u16 id length, id, f64 position[3], f64 quaternion
// [w, x, y, z]. Response: u64 new scene revision.
struct SetPoseRequest {
  std::string entity;
  Pose pose;
};
std::vector<std::uint8_t> encode_set_pose(const SetPoseRequest& request);
SetPoseRequest decode_set_pose(std::span<const std::uint8_t> payload);

// SIMULATE request: u32 component flags, u64 seed. Response: the
// contribution export.
struct SimulateRequest {
  std::uint32_t components = 0;
  std::uint64_t seed = 0;
};
std::vector<std::uint8_t> encode_simulate(const SimulateRequest& request);
SimulateRequest decode_simulate(std::span<const std::uint8_t> payload);

// SYNTHESIZE request: u32 source, u32 receiver, f64 fs (0 = default), u32
// n_fft (0 = smallest that fits), u32 component flags, u64 seed.
struct SynthesizeRequest {
  std::uint32_t source = 0;
  std::uint32_t receiver = 0;
  double fs = 0.0;
  std::uint32_t n_fft = 0;
  std::uint32_t components = 0;
  std::uint64_t seed = 0;
};
std::vector<std::uint8_t> encode_synthesize(const SynthesizeRequest& request);
SynthesizeRequest decode_synthesize(std::span<const std::uint8_t> payload);

// SYNTHESIZE response: u32 source, u32 receiver, f64 fs, u32 n_fft, u64
// revision, u64 sample count, f64 samples.
struct SynthesizeReply {
  std::uint32_t source = 0;
  std::uint32_t receiver = 0;
  double fs = 0.0;
  std::uint32_t n_fft = 0;
  std::uint64_t revision = 0;
  std::vector<double> samples;
};
std::vector<std::uint8_t> encode_synthesize_reply(const SynthesizeReply& reply);
SynthesizeReply decode_synthesize_reply(std::span<const std::uint8_t> payload);

}  // namespace sonotrace::server
