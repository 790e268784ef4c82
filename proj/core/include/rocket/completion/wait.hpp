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
#include <optional>
#include <string_view>

#include "rocket/common/clock.hpp"
#include "rocket/engine/descriptor.hpp"
#include "rocket/engine/profile.hpp"

namespace rocket::completion {

enum class PollKind { Busy, Lazy, Passive, Hybrid };

std::string_view to_string(PollKind kind) noexcept;
std::optional<PollKind> parse_poll_kind(std::string_view text) noexcept;

struct PollPolicy {
  PollKind kind = PollKind::Hybrid;
  double lazy_period_us = 100.0;
  double passive_cap_us = 25.0;  // at most 25
  double deferral_factor = 0.95;  // in (0, 1)
  std::optional<double> timeout_us;
  // Passive rounds HYBRID performs before it falls back to yield polling.
  std::uint32_t passive_rounds = 4;

  // Throws Error(InvalidArgument) on out-of-range fields.
  void validate() const;
};

struct WaitStats {
  std::uint64_t polls = 0;  // status reads
  double waited_us = 0.0;   // wait() entry to return
  engine::CompletionStatus outcome = engine::CompletionStatus::Pending;
  Nanos observed_ns = 0;    // clock at the read that saw a terminal status
};

// Blocks the caller until `record` leaves PENDING or the policy's timeout
// expires (outcome PENDING). Every policy reads the status once on entry.
//   BUSY     spin with a pause hint between reads
//   LAZY     read on a fixed schedule, lazy_period_us apart
//   PASSIVE  read, then a short OS sleep of passive_cap_us
//   HYBRID   sleep until submit + deferral_factor * estimate(profile, bytes),
//            then passive rounds, then yield polling
// HYBRID uses the record's submit timestamp when it has one, so CPU work
// done between submit and wait is not deferred twice.
WaitStats wait(const engine::CompletionRecord& record, const PollPolicy& policy,
               const engine::EngineProfile& profile, std::size_t bytes);

// HYBRID with an explicit deferral deadline; used for collective waits where
// one sleep covers several outstanding records.
WaitStats wait_deferred(const engine::CompletionRecord& record, const PollPolicy& policy, Nanos defer_until);

}  // namespace rocket::completion
