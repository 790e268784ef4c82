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

#include "rocket/transport/message.hpp"

namespace rocket::transport {

// Control block at the start of a ring's memory. head and tail are
// free-running counters on separate cache lines; the slot index is
// counter & (capacity - 1).
struct RingControl {
  alignas(64) std::atomic<std::uint64_t> head;
  alignas(64) std::atomic<std::uint64_t> tail;
  alignas(64) std::uint32_t magic;
  std::uint32_t capacity;
  std::uint32_t slot_size;
  std::uint32_t reserved;
};

static_assert(std::atomic<std::uint64_t>::is_always_lock_free,
              "ring counters must be lock-free to live in shared memory");

// Single-producer/single-consumer ring of 64-byte slots over caller-owned
// (usually shared) memory. The object is a view: producer and consumer may
// each hold their own view of the same memory in different processes.
//
// Publication: the producer writes the slot, then stores head with release
// ordering; the consumer loads head with acquire ordering before reading the
// slot. The same pairing runs in reverse on tail so the producer never
// overwrites a slot the consumer is still reading.
class RingQueue {
 public:
  static constexpr std::uint32_t kMagic = 0x474E4952;  // "RING"

  static std::size_t bytes_required(std::uint32_t capacity) noexcept;

  // Formats `memory` as an empty ring. Throws Error(CapacityNotPowerOfTwo)
  // for a zero or non power-of-two capacity and Error(RegionExhausted) if
  // `memory` is too small.
  static RingQueue initialize(std::span<std::byte> memory, std::uint32_t capacity);

  // Attaches to a ring formatted by initialize(). Throws
  // Error(MalformedHeader) if the control block does not validate.
  static RingQueue attach(std::span<std::byte> memory);

  RingQueue() = default;

  // Producer side. Returns false when head - tail == capacity; the ring is
  // left unchanged and the call never blocks.
  bool try_push(const Slot& slot) noexcept;
  bool try_push(const MessageHeader& header) noexcept { return try_push(encode(header)); }

  // Consumer side. Returns nullopt when the ring is empty.
  std::optional<Slot> try_pop() noexcept;

  std::uint32_t capacity() const noexcept { return capacity_; }
  std::uint64_t head() const noexcept;
  std::uint64_t tail() const noexcept;
  // head - tail sampled with acquire loads; exact only when quiescent.
  std::uint64_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  bool valid() const noexcept { return control_ != nullptr; }

 private:
  RingQueue(RingControl* control, std::byte* slots, std::uint32_t capacity) noexcept;

  RingControl* control_ = nullptr;
  std::byte* slots_ = nullptr;
  std::uint32_t capacity_ = 0;
  std::uint64_t mask_ = 0;
  // Producer-local and consumer-local snapshots of the opposite counter.
  // Each is touched by one side only.
  std::uint64_t cached_tail_ = 0;
  std::uint64_t cached_head_ = 0;
};

inline constexpr bool is_power_of_two(std::uint64_t v) noexcept {
  return v != 0 && (v & (v - 1)) == 0;
}

}  // namespace rocket::transport
