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

#include "rocket/engine/cpu_backend.hpp"

#include <cstring>

namespace rocket::engine {

std::optional<SubmitTicket> CpuBackend::try_submit(const CopyDescriptor& desc) {
  validate(desc);
  SubmitTicket ticket;
  ticket.sequence = sequence_.fetch_add(1, std::memory_order_relaxed) + 1;
  ticket.submit_ns = now_ns();
  desc.completion->submit_ns.store(ticket.submit_ns, std::memory_order_relaxed);
  count_submit(desc.length());
  std::memcpy(desc.dst.data(), desc.src.data(), desc.length());
  const Nanos done = now_ns();
  ticket.expected_ns = done;
  desc.completion->publish(CompletionStatus::Complete, desc.length(), done);
  count_complete(0, false);
  return ticket;
}

}  // namespace rocket::engine
