/*
 * Copyright 2026 The rocket-ipc Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <memory>

#include "rocket/engine/backend.hpp"
#include "rocket/runtime/config.hpp"
#include "rocket/runtime/handlers.hpp"

namespace rocket::runtime {

// Cumulative counters since start() or the last reset_stats(). Stage times
// are summed over jobs.
struct ServerStats {
  std::uint64_t requests = 0;
  std::uint64_t queries = 0;
  std::uint64_t jobs_done = 0;
  std::uint64_t jobs_failed = 0;
  std::uint64_t errors_sent = 0;
  std::uint64_t batches = 0;
  std::uint64_t copy_in_ns = 0;
  std::uint64_t wait_ns = 0;
  std::uint64_t exec_ns = 0;
  std::uint64_t copy_out_ns = 0;
  std::uint64_t polls = 0;
  std::uint64_t cpu_copies = 0;
  std::uint64_t offload_copies = 0;
  std::uint64_t queue_full_fallbacks = 0;
};

// The server side of the runtime: one dispatcher thread draining every
// client's tx ring, `worker_threads` request handlers, and the copy engine.
//
// A client's jobs always run on the same worker, in arrival order, so
// responses to one client leave in request order for sync and async.
class Server {
 public:
  explicit Server(ServerConfig config, HandlerRegistry handlers = HandlerRegistry::with_builtins());
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Publishes the control segment and starts the threads. Throws
  // Error(NameCollision) if another live server uses the name.
  void start();
  // Idempotent; also run by the destructor. Unlinks every segment.
  void stop();
  bool running() const noexcept;

  const ServerConfig& config() const noexcept;
  std::uint32_t active_clients() const noexcept;

  ServerStats stats() const noexcept;
  // Counters of the engine used for OFFLOAD-routed copies.
  engine::EngineCounters engine_counters() const noexcept;
  // Zeroes both stats() and engine_counters().
  void reset_stats() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rocket::runtime
