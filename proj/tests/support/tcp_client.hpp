// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

// Blocking loopback client that frames and parses replies on its own.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sonotrace::testing {

struct RawFrame {
  std::uint16_t version = 0;
  std::uint16_t type = 0;
  std::vector<std::uint8_t> payload;
};

class TcpClient {
 public:
  TcpClient(const std::string& host, std::uint16_t port);
  ~TcpClient();
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;

  void send_bytes(std::span<const std::uint8_t> bytes);
  void send_frame(std::uint16_t type, std::span<const std::uint8_t> payload, std::uint16_t version = 1);
  // Waits up to timeout_ms; nullopt on timeout or peer close.
  std::optional<RawFrame> read_frame(int timeout_ms = 10000);
  RawFrame request(std::uint16_t type, std::span<const std::uint8_t> payload);
  // Sends HELLO and expects its reply.
  void hello(const std::string& name = "test");
  void close_write();

 private:
  bool read_exact(std::uint8_t* out, std::size_t n, int timeout_ms);
  int fd_ = -1;
};

std::vector<std::uint8_t> raw_frame(std::uint16_t type, std::span<const std::uint8_t> payload,
                                    std::uint16_t version = 1);

// u16 code and text of an error payload.
std::pair<std::uint16_t, std::string> parse_error(std::span<const std::uint8_t> payload);

}  // namespace sonotrace::testing
