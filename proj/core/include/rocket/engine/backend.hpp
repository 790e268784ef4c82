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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "rocket/engine/descriptor.hpp"

namespace rocket::engine {

enum class DeviceKind { Cpu, Sim };

std::string_view to_string(DeviceKind kind) noexcept;
DeviceKind parse_device_kind(std::string_view text);

struct SubmitTicket {
  std::uint64_t sequence = 0;
  Nanos submit_ns = 0;
  // Completion deadline the engine is working towards; equal to submit_ns
  // for engines that complete inline.
  Nanos expected_ns = 0;
};

struct EngineCounters {
  std::uint64_t submitted = 0;
  std::uint64_t completed = 0;
  std::uint64_t bytes = 0;
  std::uint64_t touched_lines = 0;
  std::uint64_t queue_full = 0;
  // Publishes that landed after the modeled deadline (sim only).
  std::uint64_t overruns = 0;
};

class CopyBackend {
 public:
  virtual ~CopyBackend() = default;

  virtual DeviceKind kind() const noexcept = 0;

  // Validates and enqueues `desc`. Returns nullopt, leaving the record
  // untouched, when the engine is at its queue depth.
  virtual std::optional<SubmitTicket> try_submit(const CopyDescriptor& desc) = 0;

  // As try_submit, but QueueFull is raised as Error(QueueFull).
  SubmitTicket submit(const CopyDescriptor& desc);

  EngineCounters counters() const noexcept;
  void reset_counters() noexcept;

 protected:
  void count_submit(std::size_t bytes) noexcept;
  void count_complete(std::uint64_t touched, bool overrun) noexcept;
  void count_queue_full() noexcept;

 private:
  std::atomic<std::uint64_t> submitted_{0};
  std::atomic<std::uint64_t> completed_{0};
  std::atomic<std::uint64_t> bytes_{0};
  std::atomic<std::uint64_t> touched_lines_{0};
  std::atomic<std::uint64_t> queue_full_{0};
  std::atomic<std::uint64_t> overruns_{0};
};

// Reads one byte from each 64-byte line of `dst`; returns the number of
// lines touched.
std::uint64_t inject_touch(std::span<const std::byte> dst) noexcept;

// Plain memcpy of src into the front of dst. Returns elapsed microseconds.
double copy_cpu(std::span<const std::byte> src, std::span<std::byte> dst) noexcept;

}  // namespace rocket::engine
