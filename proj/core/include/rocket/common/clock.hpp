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

namespace rocket {

// Monotonic nanoseconds (CLOCK_MONOTONIC). Comparable across processes on
// the same host, which the transport relies on for queueing timestamps.
using Nanos = std::uint64_t;

Nanos now_ns() noexcept;

inline constexpr Nanos us_to_ns(double us) noexcept {
  return us <= 0.0 ? 0 : static_cast<Nanos>(us * 1000.0 + 0.5);
}

inline constexpr double ns_to_us(Nanos ns) noexcept {
  return static_cast<double>(ns) / 1000.0;
}

// Pause hint for spin loops.
void cpu_relax() noexcept;

// Drops the calling thread's timer slack to 1 ns so short sleeps wake close
// to their deadline. Idempotent per thread.
void enable_fine_timer_slack() noexcept;

// Sleeps until `deadline` on the monotonic clock: an OS sleep for the bulk
// of the interval, then a yield loop for the final few microseconds. The
// yield tail keeps the core available to other runnable threads.
void precise_sleep_until(Nanos deadline) noexcept;
void precise_sleep_for(Nanos duration) noexcept;

// Occupies the calling thread until `deadline` of wall time, yielding the
// core between clock checks. Used for synthetic stage costs: the stage ends
// at its wall deadline regardless of how many cores the host has.
void hold_until(Nanos deadline) noexcept;

}  // namespace rocket
