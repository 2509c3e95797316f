// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#include "server/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>

#include "common/binary_io.hpp"
#include "common/error.hpp"
#include "scene/scene_config.hpp"
#include "synthesis/synthesis.hpp"

namespace sonotrace::server {

namespace {

constexpr int kPollMs = 50;
const char* const kServerName = "sonotrace";

std::string describe(const Error& e) { return std::string(error_code_name(e.code())) + ": " + e.what(); }

bool send_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) {
        pollfd p{fd, POLLOUT, 0};
        ::poll(&p, 1, kPollMs);
        continue;
      }
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::vector<std::uint8_t> reply(MessageType type, std::span<const std::uint8_t> payload) {
  return encode_frame(response_type(type), payload);
}

}  // namespace

std::uint16_t port_from_environment(std::uint16_t fallback) {
  const char* env = std::getenv("SONOTRACE_PORT");
  if (!env || !*env) return fallback;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 65535) {
    warn(std::string("ignoring invalid SONOTRACE_PORT '") + env + "'");
    return fallback;
  }
  return static_cast<std::uint16_t>(v);
}

Server::Server(acoustics::Model model, ServerOptions options)
    : options_(std::move(options)), model_(std::move(model)) {}

Server::~Server() { stop(); }

acoustics::Model Server::snapshot() const {
  std::lock_guard lock(model_mutex_);
  return model_;
}

void Server::start() {
  if (listen_fd_ >= 0) return;
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) fail(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.bind_address.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    fail(ErrorCode::IoError, "invalid bind address '" + options_.bind_address + "'");
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
    const std::string msg = std::strerror(errno);
    ::close(fd);
    fail(ErrorCode::IoError, "cannot listen on " + options_.bind_address + ":" + std::to_string(options_.port) +
                                 ": " + msg);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  listen_fd_ = fd;
  stopping_ = false;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::wait() {
  while (!stopping_) std::this_thread::sleep_for(std::chrono::milliseconds(kPollMs));
  stop();
}

void Server::stop() {
  stopping_ = true;
  if (acceptor_.joinable()) acceptor_.join();
  reap(true);
  if (listen_fd_ >= 0) {
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void Server::reap(bool all) {
  std::lock_guard lock(connections_mutex_);
  for (auto it = connections_.begin(); it != connections_.end();) {
    if (all || it->done) {
      if (it->thread.joinable()) it->thread.join();
      ::close(it->fd);
      it = connections_.erase(it);
    } else {
      ++it;
    }
  }
}

void Server::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, kPollMs);
    reap(false);
    if (ready <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    std::lock_guard lock(connections_mutex_);
    auto& c = connections_.emplace_back();
    c.fd = fd;
    c.thread = std::thread([this, &c] { serve_connection(c); });
  }
}

void Server::serve_connection(Connection& connection) {
  const int fd = connection.fd;
  FrameReader reader;
  Session session;
  auto last_byte = std::chrono::steady_clock::now();
  std::vector<std::uint8_t> chunk(64 * 1024);
  bool open = true;
  while (open && !stopping_) {
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, kPollMs);
    const auto now = std::chrono::steady_clock::now();
    if (ready > 0) {
      const ssize_t n = ::recv(fd, chunk.data(), chunk.size(), 0);
      if (n == 0) break;
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        break;
      }
      last_byte = now;
      reader.feed({chunk.data(), static_cast<std::size_t>(n)});
      while (open) {
        auto event = reader.next();
        if (!event) break;
        std::vector<std::uint8_t> out;
        if (auto* fault = std::get_if<FrameFault>(&*event)) {
          out = encode_error_frame(fault->code, fault->message);
        } else {
          out = handle(std::get<Frame>(*event), session);
        }
        open = send_all(fd, out);
      }
    } else if (ready < 0 && errno != EINTR) {
      break;
    } else if (reader.partial() &&
               now - last_byte > std::chrono::milliseconds(options_.idle_timeout_ms)) {
      const auto fault = reader.abandon();
      open = send_all(fd, encode_error_frame(fault.code, fault.message));
    }
  }
  ::shutdown(fd, SHUT_RDWR);
  connection.done = true;
}

std::vector<std::uint8_t> Server::handle(const Frame& frame, Session& session) {
  if (frame.version != kProtocolVersion) {
    return encode_error_frame(WireError::VersionMismatch, "server speaks protocol version " +
                                                              std::to_string(kProtocolVersion) + ", got " +
                                                              std::to_string(frame.version));
  }
  const auto type = static_cast<MessageType>(frame.type);
  try {
    switch (type) {
      case MessageType::Ping:
        return reply(type, {});
      case MessageType::Hello:
        session.client_name = decode_hello(frame.payload);
        session.established = true;
        return reply(type, encode_hello_reply(kServerName));
      case MessageType::GetConfig:
      case MessageType::SetPose:
      case MessageType::Simulate:
      case MessageType::Synthesize:
        if (!session.established) return encode_error_frame(WireError::NoSession, "send HELLO first");
        break;
      default:
        return encode_error_frame(WireError::UnknownType, "unknown message type " + std::to_string(frame.type));
    }

    if (type == MessageType::GetConfig) {
      const auto model = snapshot();
      const std::string text = scene::scene_summary(*model.scene).dump();
      return reply(type, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
    }
    if (type == MessageType::SetPose) {
      const auto request = decode_set_pose(frame.payload);
      std::lock_guard writer(writer_mutex_);
      auto next = snapshot().with_pose(request.entity, request.pose);
      const std::uint64_t revision = next.scene->revision();
      {
        std::lock_guard lock(model_mutex_);
        model_ = std::move(next);
      }
      ByteWriter w(8);
      w.u64(revision);
      return reply(type, w.data());
    }
    if (type == MessageType::Simulate) {
      const auto request = decode_simulate(frame.payload);
      const auto model = snapshot();
      const auto set = acoustics::simulate(model, {request.components, request.seed, options_.workers});
      return reply(type, acoustics::encode_contributions(set, {request.components, request.seed}));
    }
    const auto request = decode_synthesize(frame.payload);
    const auto model = snapshot();
    const auto& scene = *model.scene;
    if (request.source >= scene.emitters().size() || request.receiver >= scene.receivers().size()) {
      return encode_error_frame(WireError::UnknownEntity, "no pair (" + std::to_string(request.source) + ", " +
                                                              std::to_string(request.receiver) + ")");
    }
    const auto set = acoustics::simulate(model, {request.components, request.seed, options_.workers});
    synthesis::SpectralGrid grid;
    if (request.n_fft == 0) {
      grid = synthesis::grid_for_contributions(set, 2.0 * scene.emitters()[request.source].max_distance, 0.0,
                                               request.fs);
    } else {
      grid.fs = request.fs > 0.0 ? request.fs : synthesis::default_sample_rate(scene.frequencies());
      grid.n_fft = request.n_fft;
    }
    const synthesis::SpectrumBuilder builder(grid, scene.frequencies(), scene.speed_of_sound());
    const auto h = synthesis::impulse_response(set, request.source, request.receiver, builder);
    SynthesizeReply out{request.source, request.receiver, grid.fs, grid.n_fft, scene.revision(), h.samples};
    return reply(type, encode_synthesize_reply(out));
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::ProtocolError:
        return encode_error_frame(WireError::Malformed, e.what());
      case ErrorCode::UnknownEntity:
        return encode_error_frame(WireError::UnknownEntity, e.what());
      case ErrorCode::InvalidArgument:
        if (type == MessageType::SetPose) return encode_error_frame(WireError::Malformed, e.what());
        [[fallthrough]];
      default:
        return encode_error_frame(WireError::SimFailed, describe(e));
    }
  } catch (const std::exception& e) {
    return encode_error_frame(WireError::SimFailed, std::string("internal: ") + e.what());
  }
}

}  // namespace sonotrace::server
