// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "server/protocol.hpp"

#include <algorithm>
#include <cstring>

#include "common/binary_io.hpp"
#include "common/error.hpp"

namespace sonotrace::server {

namespace {

constexpr std::uint64_t kSmallPayload = 4096;
constexpr std::uint64_t kUnknownPayload = 1u << 20;
constexpr std::size_t kSetPoseFixed = 2 + 7 * 8;

void expect_end(const ByteReader& r, const char* what) {
  if (r.remaining() != 0) fail(ErrorCode::ProtocolError, std::string(what) + " payload has trailing bytes");
}

std::string read_short_string(ByteReader& r) {
  const std::uint16_t n = r.u16();
  return r.string(n);
}

void write_short_string(ByteWriter& w, const std::string& s) {
  if (s.size() > 0xFFFF) fail(ErrorCode::InvalidArgument, "string longer than 65535 bytes");
  w.u16(static_cast<std::uint16_t>(s.size()));
  w.bytes(s);
}

}  // namespace

const char* wire_error_name(WireError code) {
  switch (code) {
    case WireError::BadMagic: return "BAD_MAGIC";
    case WireError::VersionMismatch: return "VERSION_MISMATCH";
    case WireError::UnknownEntity: return "UNKNOWN_ENTITY";
    case WireError::SimFailed: return "SIM_FAILED";
    case WireError::UnknownType: return "UNKNOWN_TYPE";
    case WireError::Malformed: return "MALFORMED";
    case WireError::NoSession: return "NO_SESSION";
  }
  return "UNKNOWN";
}

std::vector<std::uint8_t> encode_frame(std::uint16_t type, std::span<const std::uint8_t> payload,
                                       std::uint16_t version) {
  ByteWriter w(kHeaderBytes + payload.size());
  w.bytes(std::string_view(kMagic, 4));
  w.u16(version);
  w.u16(type);
  w.u64(payload.size());
  w.bytes(payload);
  return std::move(w).take();
}

std::vector<std::uint8_t> encode_error_payload(WireError code, const std::string& text) {
  ByteWriter w(6 + text.size());
  w.u16(static_cast<std::uint16_t>(code));
  w.u32(static_cast<std::uint32_t>(text.size()));
  w.bytes(text);
  return std::move(w).take();
}

std::vector<std::uint8_t> encode_error_frame(WireError code, const std::string& text) {
  return encode_frame(static_cast<std::uint16_t>(MessageType::Error), encode_error_payload(code, text));
}

std::pair<WireError, std::string> decode_error_payload(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::ProtocolError);
  const auto code = static_cast<WireError>(r.u16());
  const std::uint32_t n = r.u32();
  std::string text = r.string(n);
  expect_end(r, "error");
  return {code, std::move(text)};
}

std::uint64_t max_request_payload(std::uint16_t type) {
  switch (static_cast<MessageType>(type)) {
    case MessageType::Hello:
    case MessageType::Ping:
    case MessageType::GetConfig: return kSmallPayload;
    case MessageType::SetPose: return kSetPoseFixed + 0xFFFF;
    case MessageType::Simulate: return 12;
    case MessageType::Synthesize: return 36;
    default: return kUnknownPayload;
  }
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  compact();
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void FrameReader::compact() {
  if (pos_ > 0 && (pos_ >= buf_.size() / 2 || pos_ == buf_.size())) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
}

std::optional<FrameEvent> FrameReader::next() {
  for (;;) {
    const std::size_t avail = buf_.size() - pos_;
    const std::uint8_t* p = buf_.data() + pos_;
    if (mode_ == Mode::Scan) {
      const auto* end = p + avail;
      const auto* found = std::search(p, end, kMagic, kMagic + 4);
      if (found != end) {
        pos_ += static_cast<std::size_t>(found - p);
        mode_ = Mode::Header;
        continue;
      }
      // Keep a tail that could be the start of the next magic.
      pos_ += avail > 3 ? avail - 3 : 0;
      return std::nullopt;
    }

    const std::size_t check = std::min<std::size_t>(avail, 4);
    if (std::memcmp(p, kMagic, check) != 0) {
      pos_ += 1;
      mode_ = Mode::Scan;
      return FrameFault{WireError::BadMagic, "bad frame magic"};
    }
    if (avail < kHeaderBytes) return std::nullopt;

    ByteReader r({p, kHeaderBytes});
    r.skip(4);
    Frame frame;
    frame.version = r.u16();
    frame.type = r.u16();
    const std::uint64_t length = r.u64();
    if (length > max_request_payload(frame.type)) {
      pos_ += 1;
      mode_ = Mode::Scan;
      return FrameFault{WireError::Malformed, "payload length " + std::to_string(length) + " exceeds the limit for type " +
                                                  std::to_string(frame.type)};
    }
    if (avail - kHeaderBytes < length) return std::nullopt;
    frame.payload.assign(p + kHeaderBytes, p + kHeaderBytes + length);
    pos_ += kHeaderBytes + length;
    return frame;
  }
}

bool FrameReader::partial() const { return mode_ == Mode::Header && buf_.size() > pos_; }

FrameFault FrameReader::abandon() {
  buf_.clear();
  pos_ = 0;
  mode_ = Mode::Header;
  return {WireError::Malformed, "incomplete frame timed out"};
}

std::vector<std::uint8_t> encode_hello(const std::string& name) {
  ByteWriter w;
  write_short_string(w, name);
  return std::move(w).take();
}

std::string decode_hello(std::span<const std::uint8_t> payload) {
  if (payload.empty()) return {};
  ByteReader r(payload, ErrorCode::ProtocolError);
  std::string name = read_short_string(r);
  expect_end(r, "HELLO");
  return name;
}

std::vector<std::uint8_t> encode_hello_reply(const std::string& name) {
  ByteWriter w;
  w.u16(kProtocolVersion);
  write_short_string(w, name);
  return std::move(w).take();
}

std::vector<std::uint8_t> encode_set_pose(const SetPoseRequest& request) {
  ByteWriter w;
  write_short_string(w, request.entity);
  const auto& t = request.pose.position;
  const auto& q = request.pose.orientation;
  for (double v : {t.x, t.y, t.z, q.w, q.x, q.y, q.z}) w.f64(v);
  return std::move(w).take();
}

SetPoseRequest decode_set_pose(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::ProtocolError);
  SetPoseRequest req;
  req.entity = read_short_string(r);
  req.pose.position.x = r.f64();
  req.pose.position.y = r.f64();
  req.pose.position.z = r.f64();
  req.pose.orientation.w = r.f64();
  req.pose.orientation.x = r.f64();
  req.pose.orientation.y = r.f64();
  req.pose.orientation.z = r.f64();
  expect_end(r, "SET_POSE");
  return req;
}

std::vector<std::uint8_t> encode_simulate(const SimulateRequest& request) {
  ByteWriter w(12);
  w.u32(request.components);
  w.u64(request.seed);
  return std::move(w).take();
}

SimulateRequest decode_simulate(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::ProtocolError);
  SimulateRequest req;
  req.components = r.u32();
  req.seed = r.u64();
  expect_end(r, "SIMULATE");
  return req;
}

std::vector<std::uint8_t> encode_synthesize(const SynthesizeRequest& request) {
  ByteWriter w(36);
  w.u32(request.source);
  w.u32(request.receiver);
  w.f64(request.fs);
  w.u32(request.n_fft);
  w.u32(request.components);
  w.u64(request.seed);
  return std::move(w).take();
}

SynthesizeRequest decode_synthesize(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::ProtocolError);
  SynthesizeRequest req;
  req.source = r.u32();
  req.receiver = r.u32();
  req.fs = r.f64();
  req.n_fft = r.u32();
  req.components = r.u32();
  req.seed = r.u64();
  expect_end(r, "SYNTHESIZE");
  return req;
}

std::vector<std::uint8_t> encode_synthesize_reply(const SynthesizeReply& reply) {
  ByteWriter w(36 + 8 * reply.samples.size());
  w.u32(reply.source);
  w.u32(reply.receiver);
  w.f64(reply.fs);
  w.u32(reply.n_fft);
  w.u64(reply.revision);
  w.u64(reply.samples.size());
  for (double s : reply.samples) w.f64(s);
  return std::move(w).take();
}

SynthesizeReply decode_synthesize_reply(std::span<const std::uint8_t> payload) {
  ByteReader r(payload, ErrorCode::ProtocolError);
  SynthesizeReply reply;
  reply.source = r.u32();
  reply.receiver = r.u32();
  reply.fs = r.f64();
  reply.n_fft = r.u32();
  reply.revision = r.u64();
  const std::uint64_t n = r.u64();
  if (n > r.remaining() / 8) fail(ErrorCode::ProtocolError, "SYNTHESIZE reply sample count overruns the payload");
  reply.samples.resize(n);
  for (auto& s : reply.samples) s = r.f64();
  expect_end(r, "SYNTHESIZE reply");
  return reply;
}

}  // namespace sonotrace::server
