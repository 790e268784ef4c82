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
#include <span>
#include <string_view>

#include "rocket/common/clock.hpp"

namespace rocket::engine {

enum class CompletionStatus : std::uint32_t { Pending = 0, Complete = 1, Faulted = 2 };

std::string_view to_string(CompletionStatus status) noexcept;

// Completion cell written exactly once by the engine that executes a
// descriptor. The engine stores bytes_done and complete_ns, then publishes
// status with release ordering; a reader that observes a terminal status
// with acquire ordering also observes every destination byte.
struct CompletionRecord {
  std::atomic<CompletionStatus> status{CompletionStatus::Pending};
  // Number of successful status transitions; 1 after completion, never more.
  std::atomic<std::uint32_t> transitions{0};
  std::atomic<std::uint64_t> bytes_done{0};
  std::atomic<Nanos> submit_ns{0};
  std::atomic<Nanos> complete_ns{0};

  // Returns the record to Pending for reuse. Only legal while no engine
  // holds it.
  void reset() noexcept;

  CompletionStatus load() const noexcept { return status.load(std::memory_order_acquire); }
  bool done() const noexcept { return load() != CompletionStatus::Pending; }

  // Engine side. Transitions Pending -> `terminal` at most once; returns
  // false (and changes nothing) if the record was already terminal.
  bool publish(CompletionStatus terminal, std::uint64_t bytes, Nanos at) noexcept;
};

// One offloadable copy of src.size() bytes into the front of dst.
struct CopyDescriptor {
  std::span<const std::byte> src;
  std::span<std::byte> dst;
  bool cache_injection = false;
  CompletionRecord* completion = nullptr;

  std::size_t length() const noexcept { return src.size(); }
};

inline constexpr std::size_t kCopyAlignment = 64;
inline constexpr std::size_t kCacheLine = 64;

// Checks the submission contract and throws:
//   Error(InvalidDescriptor)  zero length, dst too small, no completion
//                             record, or a record that is not Pending
//   Error(OverlappingRanges)  src and dst share bytes
//   Error(Misaligned)         dst not 64-byte aligned
// The source may have any alignment: it is frequently caller-owned memory.
void validate(const CopyDescriptor& desc);

}  // namespace rocket::engine
