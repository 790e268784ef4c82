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

#include "rocket/transport/ring_queue.hpp"

#include <cstring>
#include <new>
#include <string>

#include "rocket/common/error.hpp"

namespace rocket::transport {

std::size_t RingQueue::bytes_required(std::uint32_t capacity) noexcept {
  return sizeof(RingControl) + static_cast<std::size_t>(capacity) * kSlotSize;
}

RingQueue::RingQueue(RingControl* control, std::byte* slots, std::uint32_t capacity) noexcept
    : control_(control), slots_(slots), capacity_(capacity), mask_(capacity - 1) {
  cached_tail_ = control_->tail.load(std::memory_order_acquire);
  cached_head_ = control_->head.load(std::memory_order_acquire);
}

RingQueue RingQueue::initialize(std::span<std::byte> memory, std::uint32_t capacity) {
  if (!is_power_of_two(capacity)) {
    throw Error(Errc::CapacityNotPowerOfTwo,
                "ring capacity " + std::to_string(capacity) + " is not a power of two");
  }
  if (memory.size() < bytes_required(capacity)) {
    throw Error(Errc::RegionExhausted, "ring memory too small for capacity " + std::to_string(capacity));
  }
  if (reinterpret_cast<std::uintptr_t>(memory.data()) % alignof(RingControl) != 0) {
    throw Error(Errc::Misaligned, "ring memory must be 64-byte aligned");
  }
  auto* control = new (memory.data()) RingControl{};
  control->head.store(0, std::memory_order_relaxed);
  control->tail.store(0, std::memory_order_relaxed);
  control->capacity = capacity;
  control->slot_size = static_cast<std::uint32_t>(kSlotSize);
  control->reserved = 0;
  std::memset(memory.data() + sizeof(RingControl), 0, static_cast<std::size_t>(capacity) * kSlotSize);
  std::atomic_thread_fence(std::memory_order_release);
  control->magic = kMagic;
  return RingQueue(control, memory.data() + sizeof(RingControl), capacity);
}

RingQueue RingQueue::attach(std::span<std::byte> memory) {
  if (memory.size() < sizeof(RingControl)) {
    throw Error(Errc::MalformedHeader, "ring memory smaller than its control block");
  }
  auto* control = std::launder(reinterpret_cast<RingControl*>(memory.data()));
  std::atomic_thread_fence(std::memory_order_acquire);
  if (control->magic != kMagic || control->slot_size != kSlotSize || !is_power_of_two(control->capacity) ||
      memory.size() < bytes_required(control->capacity)) {
    throw Error(Errc::MalformedHeader, "ring control block does not validate");
  }
  return RingQueue(control, memory.data() + sizeof(RingControl), control->capacity);
}

bool RingQueue::try_push(const Slot& slot) noexcept {
  const std::uint64_t head = control_->head.load(std::memory_order_relaxed);
  if (head - cached_tail_ >= capacity_) {
    cached_tail_ = control_->tail.load(std::memory_order_acquire);
    if (head - cached_tail_ >= capacity_) {
      return false;
    }
  }
  std::memcpy(slots_ + (head & mask_) * kSlotSize, slot.data(), kSlotSize);
  control_->head.store(head + 1, std::memory_order_release);
  return true;
}

std::optional<Slot> RingQueue::try_pop() noexcept {
  const std::uint64_t tail = control_->tail.load(std::memory_order_relaxed);
  if (tail == cached_head_) {
    cached_head_ = control_->head.load(std::memory_order_acquire);
    if (tail == cached_head_) {
      return std::nullopt;
    }
  }
  Slot out;
  std::memcpy(out.data(), slots_ + (tail & mask_) * kSlotSize, kSlotSize);
  control_->tail.store(tail + 1, std::memory_order_release);
  return out;
}

std::uint64_t RingQueue::head() const noexcept { return control_->head.load(std::memory_order_acquire); }

std::uint64_t RingQueue::tail() const noexcept { return control_->tail.load(std::memory_order_acquire); }

std::uint64_t RingQueue::size() const noexcept {
  // tail re-read until stable so head is bracketed by one tail value;
  // otherwise a concurrent pop/push pair can make the difference exceed
  // capacity or go negative.
  for (;;) {
    const std::uint64_t tail = control_->tail.load(std::memory_order_acquire);
    const std::uint64_t head = control_->head.load(std::memory_order_acquire);
    if (control_->tail.load(std::memory_order_acquire) == tail) {
      return head - tail;
    }
  }
}

}  // namespace rocket::transport
