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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rocket/completion/wait.hpp"
#include "rocket/transport/message.hpp"

namespace rocket::client {

struct ClientConfig {
  std::string server_name;
  Mode mode = Mode::Sync;  // fixed for the session
  DeviceHint device_hint = DeviceHint::Auto;
  InjectionHint cache_injection = InjectionHint::Default;
  completion::PollPolicy poll{};
  double connect_timeout_ms = 2000.0;
};

// Per-request settings; any field left unset falls back to the session's
// ClientConfig, and DEFAULT injection falls back to the server's table.
struct Overrides {
  std::optional<DeviceHint> device;
  std::optional<InjectionHint> injection;
  std::optional<StageCosts> stages;
  // Room reserved for the result; defaults to max(payload size, 64).
  std::optional<std::size_t> result_capacity;
};

enum class FutureState { Pending, Ready, Failed };

class ClientSession;

// Result of a request_async call. get() blocks until the response arrives
// and may be called from any thread, any number of times.
class ResponseFuture {
 public:
  ResponseFuture() = default;

  JobId job_id() const noexcept { return job_id_; }
  FutureState state() const;
  bool ready() const { return state() != FutureState::Pending; }

  // Returns the result bytes, or throws Error(ServerError) when the server
  // answered with an error.
  const std::vector<std::byte>& get() const;

  struct Shared;

 private:
  friend class ClientSession;
  ResponseFuture(JobId id, std::shared_ptr<Shared> shared) : job_id_(id), shared_(std::move(shared)) {}

  JobId job_id_ = 0;
  std::shared_ptr<Shared> shared_;
};

enum class QueryStatus { Ready, NotReady, Unknown };

struct QueryResult {
  QueryStatus status = QueryStatus::Unknown;
  std::vector<std::byte> bytes;
};

struct ClientStats {
  std::uint64_t requests = 0;
  std::uint64_t queries = 0;
  std::uint64_t tx_copy_ns = 0;  // submitting the client-side copy
  std::uint64_t tx_wait_ns = 0;  // waiting for it
  std::uint64_t rx_copy_ns = 0;  // copying results out of shared memory
  std::uint64_t polls = 0;
  std::uint64_t offload_copies = 0;
  std::uint64_t cpu_copies = 0;
};

// A connection to one server. Use from one thread at a time; futures it
// hands out may be waited on from other threads.
class ClientSession {
 public:
  // Claims a slot in the server's control segment and maps the queue pair
  // the server creates for it. Throws Error(ServerUnavailable) or
  // Error(TooManyClients).
  static ClientSession connect(ClientConfig config);

  ClientSession(ClientSession&&) noexcept;
  ClientSession& operator=(ClientSession&&) noexcept;
  ~ClientSession();

  std::uint32_t client_id() const noexcept;
  Mode mode() const noexcept;
  std::optional<std::uint16_t> op_code(std::string_view name) const;
  // Concurrency metadata published by the server.
  std::uint32_t active_clients() const noexcept;

  // Every request call throws Error(ModeMismatch) if the session's mode
  // differs, Error(UnknownOp) for an unregistered name, and
  // Error(PayloadTooLarge) if the data or result cannot fit the pair.
  std::vector<std::byte> request_sync(std::string_view op, std::span<const std::byte> data, const Overrides& o = {});
  std::vector<std::byte> request_sync(std::uint16_t op, std::span<const std::byte> data, const Overrides& o = {});
  ResponseFuture request_async(std::string_view op, std::span<const std::byte> data, const Overrides& o = {});
  ResponseFuture request_async(std::uint16_t op, std::span<const std::byte> data, const Overrides& o = {});
  JobId request_pipeline(std::string_view op, std::span<const std::byte> data, const Overrides& o = {});
  JobId request_pipeline(std::uint16_t op, std::span<const std::byte> data, const Overrides& o = {});

  // QUERY round trip. Ready results stay retrievable until the client's
  // result cache recycles them; after that the id reads as UNKNOWN.
  // A job the server failed raises Error(ServerError).
  QueryResult query_result(JobId job);

  // Blocks until the pipelined job finishes and hands its result over; the
  // id is retired afterwards and later queries read UNKNOWN. Throws
  // Error(ServerError) on failure and Error(InvalidArgument) for an id this
  // session never issued or has already retired.
  std::vector<std::byte> wait_result(JobId job);

  // Processes every message waiting on the rx ring. Returns how many.
  std::size_t pump();

  ClientStats stats() const;
  void reset_stats();

  // Releases the slot. Also run by the destructor.
  void close();

  struct Impl;

 private:
  explicit ClientSession(std::shared_ptr<Impl> impl);
  ResponseFuture submit_future(std::uint16_t op, std::span<const std::byte> data, const Overrides& o, Mode mode);

  std::shared_ptr<Impl> impl_;
};

}  // namespace rocket::client
