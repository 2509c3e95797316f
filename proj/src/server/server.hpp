// SPDX-FileCopyrightText: Copyright (c) 2026 The SonoTrace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "acoustics/pipeline.hpp"
#include "server/protocol.hpp"

namespace sonotrace::server {

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  std::uint16_t port = kDefaultPort;  // 0 = ephemeral
  int idle_timeout_ms = 1000;         // for a stalled partial frame
  unsigned workers = 0;
};

// SONOTRACE_PORT if set and valid, else `fallback`.
std::uint16_t port_from_environment(std::uint16_t fallback = kDefaultPort);

// Per-connection protocol state.
struct Session {
  bool established = false;
  std::string client_name;
};

// Multi-client TCP front end over one scene. SET_POSE swaps in a new
// revision under a single writer lock; other requests run on the snapshot
// current when they arrive. Requests on one connection are answered in
// order.
class Server {
 public:
  Server(acoustics::Model model, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds, listens and starts accepting. Errors: IoError.
  void start();
  // Bound port (useful with port 0).
  std::uint16_t port() const { return port_; }
  // Closes the listener and every connection; joins all threads.
  void stop();
  // Blocks until stop() is called from another thread or a signal handler
  // sets request_stop().
  void wait();
  void request_stop() { stopping_ = true; }

  acoustics::Model snapshot() const;

  // Answers one decoded frame; returns the full response frame.
  std::vector<std::uint8_t> handle(const Frame& frame, Session& session);

 private:
  struct Connection {
    int fd = -1;
    std::atomic<bool> done{false};
    std::thread thread;
  };

  void accept_loop();
  void serve_connection(Connection& connection);
  void reap(bool all);

  ServerOptions options_;
  mutable std::mutex model_mutex_;
  acoustics::Model model_;
  std::mutex writer_mutex_;

  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex connections_mutex_;
  std::list<Connection> connections_;
};

}  // namespace sonotrace::server
