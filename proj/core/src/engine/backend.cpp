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

#include "rocket/engine/backend.hpp"

#include <cstring>
#include <string>

#include "rocket/common/error.hpp"

namespace rocket::engine {

std::string_view to_string(DeviceKind kind) noexcept {
  return kind == DeviceKind::Cpu ? "cpu" : "sim";
}

DeviceKind parse_device_kind(std::string_view text) {
  if (text == "cpu") {
    return DeviceKind::Cpu;
  }
  if (text == "sim") {
    return DeviceKind::Sim;
  }
  throw Error(Errc::InvalidArgument, "unknown device '" + std::string(text) + "' (expected cpu or sim)");
}

SubmitTicket CopyBackend::submit(const CopyDescriptor& desc) {
  auto ticket = try_submit(desc);
  if (!ticket) {
    throw Error(Errc::QueueFull, "engine queue is at its depth limit");
  }
  return *ticket;
}

EngineCounters CopyBackend::counters() const noexcept {
  EngineCounters c;
  c.submitted = submitted_.load(std::memory_order_relaxed);
  c.completed = completed_.load(std::memory_order_relaxed);
  c.bytes = bytes_.load(std::memory_order_relaxed);
  c.touched_lines = touched_lines_.load(std::memory_order_relaxed);
  c.queue_full = queue_full_.load(std::memory_order_relaxed);
  c.overruns = overruns_.load(std::memory_order_relaxed);
  return c;
}

void CopyBackend::reset_counters() noexcept {
  submitted_.store(0, std::memory_order_relaxed);
  completed_.store(0, std::memory_order_relaxed);
  bytes_.store(0, std::memory_order_relaxed);
  touched_lines_.store(0, std::memory_order_relaxed);
  queue_full_.store(0, std::memory_order_relaxed);
  overruns_.store(0, std::memory_order_relaxed);
}

void CopyBackend::count_submit(std::size_t bytes) noexcept {
  submitted_.fetch_add(1, std::memory_order_relaxed);
  bytes_.fetch_add(bytes, std::memory_order_relaxed);
}

void CopyBackend::count_complete(std::uint64_t touched, bool overrun) noexcept {
  completed_.fetch_add(1, std::memory_order_relaxed);
  if (touched != 0) {
    touched_lines_.fetch_add(touched, std::memory_order_relaxed);
  }
  if (overrun) {
    overruns_.fetch_add(1, std::memory_order_relaxed);
  }
}

void CopyBackend::count_queue_full() noexcept {
  queue_full_.fetch_add(1, std::memory_order_relaxed);
}

std::uint64_t inject_touch(std::span<const std::byte> dst) noexcept {
  const std::size_t lines = (dst.size() + kCacheLine - 1) / kCacheLine;
  const volatile std::byte* p = dst.data();
  std::byte sink{0};
  for (std::size_t i = 0; i < lines; ++i) {
    sink ^= p[i * kCacheLine];
  }
  static_cast<void>(sink);
  return lines;
}

double copy_cpu(std::span<const std::byte> src, std::span<std::byte> dst) noexcept {
  const Nanos t0 = now_ns();
  std::memcpy(dst.data(), src.data(), src.size());
  return ns_to_us(now_ns() - t0);
}

}  // namespace rocket::engine
