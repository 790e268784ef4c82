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
#include <cstdint>

#include "rocket/common/clock.hpp"

namespace rocket::transport {

// Cross-process wake-up primitive placed in shared memory. Producers ring
// after publishing to a ring; an idle consumer sleeps on the sequence word
// with a futex. Rings cost one atomic increment when nobody is asleep.
//
// Consumer protocol:
//   auto seq = bell.sequence();
//   ... poll the rings; if nothing was found ...
//   bell.wait(seq, timeout);
struct Doorbell {
  std::atomic<std::uint32_t> seq;
  std::atomic<std::uint32_t> waiters;

  void init() noexcept {
    seq.store(0, std::memory_order_relaxed);
    waiters.store(0, std::memory_order_relaxed);
  }

  std::uint32_t sequence() const noexcept { return seq.load(std::memory_order_seq_cst); }

  void ring() noexcept;

  // Returns once the sequence differs from `observed`, after `timeout_ns`,
  // or on a spurious wake.
  void wait(std::uint32_t observed, Nanos timeout_ns) noexcept;
};

static_assert(sizeof(std::atomic<std::uint32_t>) == sizeof(std::uint32_t));
static_assert(std::atomic<std::uint32_t>::is_always_lock_free);

}  // namespace rocket::transport
