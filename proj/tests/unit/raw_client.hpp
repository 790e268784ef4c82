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

// Speaks the wire protocol directly, bypassing ClientSession's local checks,
// so tests can send requests the library client would refuse to build.

#include <unistd.h>

#include <optional>
#include <string>

#include "rocket/common/clock.hpp"
#include "rocket/common/error.hpp"
#include "rocket/runtime/job.hpp"
#include "rocket/transport/control_region.hpp"
#include "rocket/transport/queue_pair.hpp"

namespace rocket::testing {

struct RawClient {
  explicit RawClient(const std::string& server) {
    using transport::SlotState;
    ctl = transport::ControlRegion::open(server);
    auto claimed = ctl.claim_slot(static_cast<std::uint64_t>(::getpid()));
    if (!claimed) {
      throw Error(Errc::TooManyClients, "no slot");
    }
    id = *claimed;
    ctl.doorbell().ring();
    const Nanos deadline = now_ns() + 2'000'000'000ULL;
    while (ctl.slot(id).state.load() != static_cast<std::uint32_t>(SlotState::Active)) {
      if (now_ns() > deadline) {
        throw Error(Errc::ServerUnavailable, "slot never became active");
      }
      precise_sleep_for(50'000);
    }
    pair = transport::QueuePair::attach(transport::pair_segment_name(server, id));
  }

  ~RawClient() {
    auto expected = static_cast<std::uint32_t>(transport::SlotState::Active);
    ctl.slot(id).state.compare_exchange_strong(expected,
                                               static_cast<std::uint32_t>(transport::SlotState::Disconnecting));
    ctl.doorbell().ring();
  }

  JobId job(std::uint64_t seq) const { return runtime::make_job_id(id, seq); }

  void send_slot(const transport::Slot& slot) {
    while (!pair.tx().try_push(slot)) {
      precise_sleep_for(10'000);
    }
    ctl.doorbell().ring();
  }

  void send(const transport::MessageHeader& h) { send_slot(transport::encode(h)); }

  std::optional<transport::MessageHeader> recv(Nanos timeout = 2'000'000'000ULL) {
    const Nanos deadline = now_ns() + timeout;
    for (;;) {
      const auto seq = pair.rx_doorbell().sequence();
      if (auto slot = pair.rx().try_pop()) {
        return transport::decode(*slot);
      }
      const Nanos now = now_ns();
      if (now >= deadline) {
        return std::nullopt;
      }
      pair.rx_doorbell().wait(seq, std::min<Nanos>(deadline - now, 10'000'000));
    }
  }

  transport::ControlRegion ctl;
  std::uint32_t id = 0;
  transport::QueuePair pair;
};

}  // namespace rocket::testing
